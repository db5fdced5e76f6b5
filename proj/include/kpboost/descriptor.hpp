#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kpboost/detector.hpp"
#include "kpboost/image.hpp"

namespace kpboost {

// 64-D integer descriptor: 4x4 sub-regions (row-major) x 4 components in
// the fixed order (sum dx, sum |dx|, sum dy, sum |dy|). L1-normalized to
// total absolute mass 4096; the all-zero vector describes a uniform patch.
struct Descriptor {
    static constexpr int kSize = 64;
    static constexpr int32_t kNormMass = 4096;

    std::array<int32_t, kSize> values{};

    int32_t operator[](int i) const { return values[i]; }
    int32_t& operator[](int i) { return values[i]; }
    bool operator==(const Descriptor&) const = default;
};

struct GradientSample {
    int32_t dx = 0;
    int32_t dy = 0;
};

// 20x20 Haar responses over a square patch of side 20*scale centered on
// the keypoint. Each sample is a 2s x 2s box pair in gradient convention:
// dx = right half - left half, dy = bottom - top, clipped at image borders.
std::array<GradientSample, 400> sample_gradients(const IntegralImage& ii,
                                                 const Keypoint& kp);

Descriptor compute_descriptor(const IntegralImage& ii, const Keypoint& kp);

// Batch helper, parallel across keypoints.
std::vector<Descriptor> compute_descriptors(const IntegralImage& ii,
                                            const std::vector<Keypoint>& kps);

// Bilinear split of one sample's mass across the (up to) 4 nearest
// sub-region centers along one axis: sample index i in [0, 20) yields
// (first sub-region, weight to it, weight to the next) with weights in
// 1/16 units summing to 16. Exposed for tests.
void axis_weights_fp16(int i, int& sub0, int& w0, int& w1);

}  // namespace kpboost
