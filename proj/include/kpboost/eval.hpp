#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpboost/boosting.hpp"
#include "kpboost/dataset.hpp"

namespace kpboost {

// Misclassification rates per boosting step, evaluated on strong-classifier
// prefixes. Rates are exact rationals miscount/total.
struct ErrorCurvePoint {
    int round = 0;
    int train_miscount = 0;
    int train_total = 0;
    int test_miscount = 0;
    int test_total = 0;
};

std::vector<ErrorCurvePoint> error_curves(const StrongClassifier& sc,
                                          const SplitFeatures& train,
                                          const SplitFeatures& test);

void write_error_curves_csv(const std::vector<ErrorCurvePoint>& curves, const std::string& path);

struct PRPoint {
    int32_t threshold_q16 = 0;
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    bool undefined_precision = false;  // tp + fp == 0, reported as precision 1

    // exact rationals; *_num / *_den
    int64_t precision_num() const { return undefined_precision ? 1 : tp; }
    int64_t precision_den() const { return undefined_precision ? 1 : tp + fp; }
    int64_t recall_num() const { return tp; }
    int64_t recall_den() const { return tp + fn; }
};

// One point per distinct strong output on the test set, swept from the
// highest threshold down (recall non-decreasing along the list).
std::vector<PRPoint> pr_curve(const StrongClassifier& sc, const SplitFeatures& test);

void write_pr_csv(const std::vector<PRPoint>& points, const std::string& path);

// Keypoints of one image matched by at least one model feature, with the
// indices of the features they respond to.
struct RespondingKeypoint {
    Keypoint keypoint;
    std::vector<int> features;
};

std::vector<RespondingKeypoint> responding_keypoints(const StrongClassifier& sc,
                                                     const ImageFeatures& features);

struct HeatmapHit {
    int image = 0;  // index within the positive image list
    int32_t x_fp16 = 0, y_fp16 = 0, scale_fp16 = 0;
};

struct Heatmap {
    int feature = 0;
    int width = 0, height = 0;
    std::vector<uint32_t> counts;  // width * height accumulation grid
    std::vector<HeatmapHit> hits;
};

// Accumulates positions of keypoints responding to one feature across
// positive images of common geometry; mixed geometries are an error.
Heatmap keypoint_heatmap(const StrongClassifier& sc, int feature,
                         const std::vector<std::string>& positive_paths,
                         const DetectorConfig& cfg);

void write_heatmap_csv(const Heatmap& hm, const std::string& path);
GrayImage render_heatmap(const Heatmap& hm);

struct FrameResult {
    std::string path;
    std::vector<RespondingKeypoint> responding;
    double millis = 0;  // wall clock, detection + filtering
    bool ok = true;
};

struct SequenceResult {
    std::vector<FrameResult> frames;
    double mean_millis = 0;  // over frames that loaded
};

// Numbered frames from a directory (numeric-aware filename order). Each
// frame: detect, describe, keep positively-responding keypoints; writes a
// per-frame CSV and, optionally, a PGM overlay into out_dir. Unreadable
// frames are skipped with a warning on stderr.
SequenceResult filter_sequence(const StrongClassifier& sc, const std::string& frame_dir,
                               const DetectorConfig& cfg, const std::string& out_dir,
                               bool overlays);

// (value*10^6)/2^16 etc. rendered as "0.123456": exact decimal printing
// without floating point.
std::string q16_to_decimal(int32_t q16);
std::string ratio_to_decimal(int64_t num, int64_t den);
std::string fp16_to_decimal(int32_t fp16);

void draw_circle(GrayImage& img, int cx, int cy, int r, uint8_t value);

}  // namespace kpboost
