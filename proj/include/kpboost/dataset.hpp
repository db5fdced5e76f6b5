#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpboost/config.hpp"
#include "kpboost/matching.hpp"

namespace kpboost {

enum class Split : int8_t { unassigned = -1, train = 0, test = 1 };

struct ManifestEntry {
    std::string path;
    uint8_t label = 0;  // 1 positive, 0 negative
    Split split = Split::unassigned;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    uint32_t seed = 0;  // RNG seed the split was drawn with, 0 if external

    bool has_split() const;
};

// CSV `path,label[,split]`, no header. Label in {0,1}; split in
// {train,test} when present.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

// Stratified random split: per class, round-half-up(fraction * count)
// entries go to train, the rest to test. Deterministic for a fixed seed
// (mt19937 + rejection-sampled Fisher-Yates). Throws when a class would
// end up empty on either side.
void split_dataset(DatasetManifest& m, uint32_t seed, Fraction train_fraction_pos,
                   Fraction train_fraction_neg);

// Detected keypoints and descriptors of one image.
struct ImageFeatures {
    std::vector<Keypoint> keypoints;
    std::vector<Descriptor> descriptors;
};

ImageFeatures extract_features(const GrayImage& img, const DetectorConfig& cfg);

// Loads and processes every entry of the given split (all entries when
// split == unassigned). Parallel across images; output order follows the
// manifest.
struct SplitFeatures {
    std::vector<int> manifest_index;  // position of each column in the manifest
    std::vector<std::vector<Descriptor>> descriptors;
    std::vector<std::vector<Keypoint>> keypoints;
    std::vector<uint8_t> labels;
};

SplitFeatures extract_split_features(const DatasetManifest& m, Split split,
                                     const DetectorConfig& cfg);

// The positive keypoint pool: every keypoint of every positive image of
// the split, ids in (image, detection) order.
std::vector<KeypointRecord> build_positive_pool(const SplitFeatures& f);

// Content hash of the split + detector settings, the matrix cache key.
uint64_t dataset_cache_key(const DatasetManifest& m, Split split, const DetectorConfig& cfg);

}  // namespace kpboost
