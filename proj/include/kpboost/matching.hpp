#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpboost/descriptor.hpp"
#include "kpboost/detector.hpp"

namespace kpboost {

// Distance of a keypoint to an image with no keypoints at all: one past
// the largest possible SAD of two mass-4096 descriptors.
constexpr int32_t kMaxDist = 2 * Descriptor::kNormMass + 1;

// L1 / sum-of-absolute-differences distance between two descriptors.
int32_t sad_distance(const Descriptor& a, const Descriptor& b);

// Smallest SAD between k and any descriptor of the image; kMaxDist when
// the image has none.
int32_t image_distance(const Descriptor& k, std::span<const Descriptor> image_descriptors);

// A keypoint of the positive pool: where it came from plus its descriptor.
struct KeypointRecord {
    int32_t id = 0;           // ordinal within the pool
    int32_t image_index = 0;  // column of its source (positive) image
    Keypoint keypoint;
    Descriptor descriptor;
};

// Q x N matrix M_ij = image_distance(pool keypoint i, training image j),
// with per-column class labels. Every row has a zero at its source column.
struct DistanceMatrix {
    int32_t q_rows = 0;
    int32_t n_cols = 0;
    std::vector<int32_t> entries;  // row-major
    std::vector<uint8_t> labels;   // n_cols, values {0, 1}

    int32_t at(int i, int j) const { return entries[size_t(i) * n_cols + j]; }
    std::span<const int32_t> row(int i) const {
        return {entries.data() + size_t(i) * n_cols, size_t(n_cols)};
    }
};

DistanceMatrix build_distance_matrix(const std::vector<KeypointRecord>& pool,
                                     const std::vector<std::vector<Descriptor>>& image_descriptors,
                                     const std::vector<uint8_t>& labels);

// Candidate thresholds for one matrix row: bumped floor-midpoints of each
// pair of successive distinct sorted distances, plus the max+1 sentinel
// that makes the accept-everything feature representable. Strictly
// increasing; every achievable non-empty "distance < t" split of the row
// is induced by exactly one candidate.
std::vector<int32_t> threshold_candidates(std::span<const int32_t> row);

// Binary matrix cache, keyed by a content hash of the dataset manifest and
// detector configuration. Layout: magic, key, Q, N (little-endian), then
// row-major int32 entries and N label bytes.
void save_matrix_cache(const DistanceMatrix& m, uint64_t key, const std::string& path);
bool load_matrix_cache(DistanceMatrix& m, uint64_t key, const std::string& path);

uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t seed = 1469598103934665603ull);
uint64_t fnv1a64(const std::string& s, uint64_t seed = 1469598103934665603ull);

}  // namespace kpboost
