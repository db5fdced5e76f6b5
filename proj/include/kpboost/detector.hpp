#pragma once

#include <cstdint>
#include <vector>

#include "kpboost/image.hpp"

// Integer-only Hessian blob detector over a ladder of discrete box-filter
// scales. All positions and scales are fixed point with 1/16 resolution
// (suffix _fp16); every computation path is integer arithmetic, so results
// are bit-identical across runs and platforms.

namespace kpboost {

struct ScaleLevel {
    int index = 0;
    int filter_size = 9;  // odd, 3 * lobe
    int lobe = 3;         // odd
    int norm_shift = 0;   // right-shift equalizing response magnitude across levels
};

// Filter sizes {9, 15, 21, 27, 33, 39, 45, 51}: an arithmetic ladder of
// odd-lobe box filters, one level every 6 pixels instead of octave doubling.
std::vector<ScaleLevel> default_scale_levels();

struct ResponseMap {
    ScaleLevel scale;
    int step = 1;  // sampling stride in pixels
    int grid_w = 0;
    int grid_h = 0;
    std::vector<int32_t> responses;  // grid_w * grid_h, row-major

    bool empty() const { return grid_w <= 0 || grid_h <= 0; }
    int32_t at(int gx, int gy) const { return responses[size_t(gy) * grid_w + gx]; }
    // Pixel coordinates of grid cell centers. origin = (filter_size-1)/2.
    int origin() const { return (scale.filter_size - 1) / 2; }
    int px(int gx) const { return origin() + gx * step; }
    int py(int gy) const { return origin() + gy * step; }
};

struct Keypoint {
    int32_t x_fp16 = 0;      // sub-pixel position, 1/16 px
    int32_t y_fp16 = 0;
    int32_t scale_fp16 = 0;  // blob scale, 1/16 units, ~1.2/9 of the interpolated filter size
    int32_t response = 0;    // normalized Hessian strength at the maximum
};

struct DetectorConfig {
    std::vector<ScaleLevel> levels = default_scale_levels();
    std::vector<int> strides = {1, 1, 2, 2, 4, 4, 4, 4};  // per level
    int32_t threshold = 4000;  // see configs/default.conf
    int max_keypoints = 64;
};

// Normalized integer approximation of det(H) at pixel (x, y):
//   Dxx*Dyy - (81*Dxy^2)/100, right-shifted by the level's norm_shift.
// Box sums are clipped at image borders.
int64_t hessian_response(const IntegralImage& ii, const ScaleLevel& s, int x, int y);

// One map per level; a level whose filter exceeds the image yields an
// empty map. Grid covers centers where the full filter fits:
// dims = floor((image - filter_size) / step) + 1.
std::vector<ResponseMap> build_response_maps(const IntegralImage& ii,
                                             const std::vector<ScaleLevel>& levels,
                                             const std::vector<int>& strides);

struct RawCandidate {
    int level = 0;  // index into the map list
    int gx = 0, gy = 0;
    int px = 0, py = 0;
    int32_t response = 0;
};

// Strict 26-neighbor maxima in the (x, y, scale) volume, thresholded.
// Neighbor maps are probed at their own stride, nearest-grid aligned;
// cells lacking a full 3x3x3 neighborhood and the lowest/highest scale
// levels are discarded.
std::vector<RawCandidate> find_local_maxima(const std::vector<ResponseMap>& maps,
                                            int32_t threshold);

// Parabola-vertex offset (r_below - r_above) / (2*(r_below - 2*r_at + r_above))
// in 1/16 fixed point, truncated toward zero, clamped to [-15/16, 15/16].
// Zero denominator yields 0.
int32_t interpolate_offset_fp16(int64_t r_below, int64_t r_at, int64_t r_above);

// Greedy suppression, strongest response first: a candidate whose circle
// (center, radius = scale) contains -- or is contained by -- a kept
// candidate's circle center within the larger radius is dropped.
// Ties: lower scale, then (y, x).
std::vector<Keypoint> suppress_imbricated(std::vector<Keypoint> candidates);

// Full pipeline: integral -> response maps -> 3D maxima -> quadratic
// interpolation of scale and position -> imbricated suppression -> cap at
// max_keypoints strongest. Deterministic, ordering included.
std::vector<Keypoint> detect_keypoints(const GrayImage& img, const DetectorConfig& cfg);
std::vector<Keypoint> detect_keypoints(const IntegralImage& ii, const DetectorConfig& cfg);

}  // namespace kpboost
