#pragma once

// Straight single-threaded counterparts of the OpenMP kernels. Kept as the
// reference the parallel paths are tested against (results must be
// bit-identical) and as the baseline for the kernel benchmark.

#include "kpboost/boosting.hpp"
#include "kpboost/descriptor.hpp"
#include "kpboost/detector.hpp"
#include "kpboost/matching.hpp"

namespace kpboost::serial {

std::vector<ResponseMap> build_response_maps(const IntegralImage& ii,
                                             const std::vector<ScaleLevel>& levels,
                                             const std::vector<int>& strides);

std::vector<Descriptor> compute_descriptors(const IntegralImage& ii,
                                            const std::vector<Keypoint>& kps);

DistanceMatrix build_distance_matrix(const std::vector<KeypointRecord>& pool,
                                     const std::vector<std::vector<Descriptor>>& image_descriptors,
                                     const std::vector<uint8_t>& labels);

Selection select_best(const SelectionContext& ctx, std::span<const uint64_t> weights);

}  // namespace kpboost::serial
