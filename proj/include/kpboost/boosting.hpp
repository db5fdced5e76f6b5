#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpboost/matching.hpp"

// Feature-selecting discrete AdaBoost over "keypoint presence" weak
// classifiers: h answers 1 on an image iff some keypoint of the image has
// a descriptor within SAD distance `threshold` (strict) of the reference
// descriptor. All weights and vote masses are fixed point; training is
// bit-reproducible.

namespace kpboost {

// Example weights carry 48 fractional bits; a full distribution sums to
// kWeightOne (minus sub-ulp truncation dust).
constexpr uint64_t kWeightOne = 1ull << 48;
constexpr int32_t kAlphaOne = 1 << 16;  // Q16 unit for vote weights alpha

struct WeakClassifier {
    Descriptor descriptor;
    int32_t threshold = 0;  // > 0; answers 1 iff image_distance < threshold
    int64_t alpha_q16 = 0;  // vote weight, Q16
    int32_t src_keypoint = -1;  // provenance: pool keypoint id
    int32_t src_image = -1;     // provenance: source image column
};

struct StrongClassifier {
    std::vector<WeakClassifier> rounds;
    int32_t decision_q16 = kAlphaOne / 2;  // positive iff output >= this

    int64_t alpha_sum() const {
        int64_t s = 0;
        for (const auto& w : rounds) s += w.alpha_q16;
        return s;
    }
};

struct RoundLog {
    int round = 0;
    int32_t keypoint_id = -1;
    int32_t source_image = -1;
    int32_t threshold = 0;
    uint64_t err_mass = 0;          // unclamped weighted error numerator
    uint64_t err_mass_clamped = 0;  // after the epsilon clamp
    uint64_t total_mass = 0;        // weight sum the masses are relative to
    int64_t alpha_q16 = 0;
    int32_t train_miscount = 0;  // strong-prefix training errors after this round
    // weighted error of this round's classifier under the updated weights;
    // the AdaBoost fixed point puts it at 1/2
    uint64_t post_err_mass = 0;
    uint64_t post_total_mass = 0;
};

struct TrainingState {
    std::vector<uint64_t> weights;  // Q48, one per training image
    std::vector<uint8_t> labels;
    std::vector<RoundLog> round_log;
    bool stopped_early = false;
    std::string stop_reason;
};

bool evaluate_weak(const WeakClassifier& w, std::span<const Descriptor> image_descriptors);

// Weighted error of "distance < t" for every candidate t of one row, in a
// single merge pass over the pre-sorted row. `order` lists column indices
// by ascending distance. Returns err masses parallel to `candidates`.
void weighted_errors_for_row(std::span<const int32_t> row, std::span<const int32_t> order,
                             std::span<const uint64_t> weights,
                             std::span<const uint8_t> labels,
                             std::span<const int32_t> candidates,
                             std::vector<uint64_t>& err_out);

// Per-row sorted column order and threshold candidates, computed once per
// matrix and reused by every boosting round.
struct SelectionContext {
    const DistanceMatrix* matrix = nullptr;
    std::vector<std::vector<int32_t>> order;       // per row
    std::vector<std::vector<int32_t>> candidates;  // per row

    explicit SelectionContext(const DistanceMatrix& m);
};

struct Selection {
    int32_t keypoint_id = -1;
    int32_t threshold = 0;
    uint64_t err_mass = 0;
};

// Global argmin of weighted error over all (row, candidate) pairs.
// Ties: smaller error, then lower keypoint id, then lower threshold.
Selection select_best(const SelectionContext& ctx, std::span<const uint64_t> weights);
Selection select_best(const DistanceMatrix& matrix, const TrainingState& state);

struct TrainOptions {
    int rounds = 300;
    int32_t decision_q16 = kAlphaOne / 2;
};

// Discrete AdaBoost: uniform initial weights; per round the best
// (keypoint, threshold) pair by weighted error; epsilon clamped to
// [1/(4N), 1 - 1/(4N)]; alpha = (1/2) ln((1-eps)/eps) in Q16; weights
// scaled by exp(-alpha) / exp(+alpha) and renormalized. Stops early when
// the best unclamped error reaches 1/2.
std::pair<StrongClassifier, TrainingState> adaboost_train(const DistanceMatrix& matrix,
                                                          const std::vector<KeypointRecord>& pool,
                                                          const TrainOptions& opts);

// Normalized weighted vote in Q16: (sum alpha_t h_t) * 2^16 / (sum alpha_t).
int32_t strong_output(const StrongClassifier& sc, std::span<const Descriptor> image_descriptors);

bool classify(const StrongClassifier& sc, std::span<const Descriptor> image_descriptors);

// Element t = strong output of the first t+1 rounds.
std::vector<int32_t> vote_trace(const StrongClassifier& sc,
                                std::span<const Descriptor> image_descriptors);

// Weak-classifier bits for every round, cheapest building block for
// prefix evaluation: bits[t] = rounds[t] answers 1 on the image.
std::vector<uint8_t> weak_bits(const StrongClassifier& sc,
                               std::span<const Descriptor> image_descriptors);

}  // namespace kpboost
