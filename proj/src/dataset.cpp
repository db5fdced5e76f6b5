#include "kpboost/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kpboost {

bool DatasetManifest::has_split() const {
    return !entries.empty() &&
           std::all_of(entries.begin(), entries.end(),
                       [](const ManifestEntry& e) { return e.split != Split::unassigned; });
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": unreadable manifest");
    DatasetManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        ManifestEntry e;
        std::string label, split;
        if (!std::getline(row, e.path, ',') || !std::getline(row, label, ','))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected path,label[,split]");
        if (label != "0" && label != "1")
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad label");
        e.label = uint8_t(label == "1");
        if (std::getline(row, split, ',')) {
            if (split == "train")
                e.split = Split::train;
            else if (split == "test")
                e.split = Split::test;
            else
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad split");
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (const ManifestEntry& e : m.entries) {
        out << e.path << ',' << int(e.label);
        if (e.split != Split::unassigned)
            out << ',' << (e.split == Split::train ? "train" : "test");
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": short write");
}

namespace {

// std::uniform_int_distribution is not pinned across standard libraries;
// rejection sampling on raw mt19937 draws is.
uint32_t bounded_draw(std::mt19937& rng, uint32_t n) {
    const uint64_t span = uint64_t(1) << 32;
    const uint64_t limit = span - span % n;
    uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return uint32_t(r % n);
}

void shuffle_indices(std::vector<int>& idx, std::mt19937& rng) {
    for (size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[bounded_draw(rng, uint32_t(i))]);
}

}  // namespace

void split_dataset(DatasetManifest& m, uint32_t seed, Fraction train_fraction_pos,
                   Fraction train_fraction_neg) {
    std::mt19937 rng(seed);
    for (int cls = 1; cls >= 0; --cls) {
        std::vector<int> idx;
        for (int i = 0; i < int(m.entries.size()); ++i)
            if (m.entries[i].label == cls) idx.push_back(i);
        if (idx.empty()) throw std::runtime_error("split: a class has no examples");
        const Fraction frac = cls ? train_fraction_pos : train_fraction_neg;
        const int64_t k = frac.of(int64_t(idx.size()));
        if (k < 1 || k >= int64_t(idx.size()))
            throw std::runtime_error("split: a class would be empty on one side");
        shuffle_indices(idx, rng);
        for (size_t i = 0; i < idx.size(); ++i)
            m.entries[idx[i]].split = int64_t(i) < k ? Split::train : Split::test;
    }
    m.seed = seed;
}

ImageFeatures extract_features(const GrayImage& img, const DetectorConfig& cfg) {
    ImageFeatures f;
    IntegralImage ii = integral(img);
    f.keypoints = detect_keypoints(ii, cfg);
    f.descriptors = compute_descriptors(ii, f.keypoints);
    return f;
}

SplitFeatures extract_split_features(const DatasetManifest& m, Split split,
                                     const DetectorConfig& cfg) {
    SplitFeatures out;
    for (int i = 0; i < int(m.entries.size()); ++i)
        if (split == Split::unassigned || m.entries[i].split == split)
            out.manifest_index.push_back(i);

    const int n = int(out.manifest_index.size());
    out.descriptors.resize(n);
    out.keypoints.resize(n);
    out.labels.resize(n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (int c = 0; c < n; ++c) {
        try {
            const ManifestEntry& e = m.entries[out.manifest_index[c]];
            ImageFeatures f = extract_features(load_image(e.path), cfg);
            out.keypoints[c] = std::move(f.keypoints);
            out.descriptors[c] = std::move(f.descriptors);
            out.labels[c] = e.label;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<KeypointRecord> build_positive_pool(const SplitFeatures& f) {
    std::vector<KeypointRecord> pool;
    for (int c = 0; c < int(f.labels.size()); ++c) {
        if (!f.labels[c]) continue;
        for (size_t k = 0; k < f.keypoints[c].size(); ++k) {
            KeypointRecord r;
            r.id = int32_t(pool.size());
            r.image_index = c;
            r.keypoint = f.keypoints[c][k];
            r.descriptor = f.descriptors[c][k];
            pool.push_back(std::move(r));
        }
    }
    return pool;
}

uint64_t dataset_cache_key(const DatasetManifest& m, Split split, const DetectorConfig& cfg) {
    uint64_t h = fnv1a64(detector_config_string(cfg));
    for (const ManifestEntry& e : m.entries) {
        if (split != Split::unassigned && e.split != split) continue;
        h = fnv1a64(e.path, h);
        uint8_t tag[2] = {e.label, uint8_t(e.split)};
        h = fnv1a64(std::span<const uint8_t>(tag, 2), h);
    }
    return h;
}

}  // namespace kpboost
