#include "kpboost/matching.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <stdexcept>

namespace kpboost {

int32_t sad_distance(const Descriptor& a, const Descriptor& b) {
    int32_t sum = 0;
    for (int i = 0; i < Descriptor::kSize; ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

int32_t image_distance(const Descriptor& k, std::span<const Descriptor> image_descriptors) {
    int32_t best = kMaxDist;
    for (const Descriptor& d : image_descriptors) best = std::min(best, sad_distance(k, d));
    return best;
}

DistanceMatrix build_distance_matrix(const std::vector<KeypointRecord>& pool,
                                     const std::vector<std::vector<Descriptor>>& image_descriptors,
                                     const std::vector<uint8_t>& labels) {
    if (image_descriptors.size() != labels.size())
        throw std::invalid_argument("distance matrix: one label per image required");
    const int n = int(image_descriptors.size());
    for (const KeypointRecord& r : pool) {
        if (r.image_index < 0 || r.image_index >= n)
            throw std::invalid_argument("distance matrix: pool keypoint " +
                                        std::to_string(r.id) +
                                        " references an image absent from the dataset");
        if (labels[r.image_index] != 1)
            throw std::invalid_argument("distance matrix: pool keypoint " +
                                        std::to_string(r.id) +
                                        " sourced from a non-positive image");
    }

    DistanceMatrix m;
    m.q_rows = int32_t(pool.size());
    m.n_cols = n;
    m.labels = labels;
    m.entries.resize(size_t(m.q_rows) * n);
    const int q = int(pool.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < q; ++i) {
        int32_t* row = &m.entries[size_t(i) * n];
        const Descriptor& d = pool[i].descriptor;
        for (int j = 0; j < n; ++j) row[j] = image_distance(d, image_descriptors[j]);
    }
    return m;
}

std::vector<int32_t> threshold_candidates(std::span<const int32_t> row) {
    if (row.empty()) return {};
    std::vector<int32_t> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int32_t> out;
    out.reserve(sorted.size());
    for (size_t k = 0; k + 1 < sorted.size(); ++k) {
        if (sorted[k] == sorted[k + 1]) continue;
        int32_t t = (sorted[k] + sorted[k + 1]) / 2;
        // A floor-midpoint of two adjacent integers lands on the lower one
        // and would not separate them under strict '<'; bump it.
        if (t <= sorted[k]) t = sorted[k] + 1;
        out.push_back(t);
    }
    out.push_back(sorted.back() + 1);
    return out;
}

uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t seed) {
    uint64_t h = seed;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t fnv1a64(const std::string& s, uint64_t seed) {
    return fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()),
                   seed);
}

namespace {

constexpr char kMatrixMagic[8] = {'K', 'P', 'B', 'M', 'T', 'X', '1', '\0'};

void put_u32(std::FILE* f, uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    std::fwrite(b, 1, 4, f);
}

void put_u64(std::FILE* f, uint64_t v) {
    put_u32(f, uint32_t(v));
    put_u32(f, uint32_t(v >> 32));
}

bool get_u32(std::FILE* f, uint32_t& v) {
    uint8_t b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
    return true;
}

bool get_u64(std::FILE* f, uint64_t& v) {
    uint32_t lo, hi;
    if (!get_u32(f, lo) || !get_u32(f, hi)) return false;
    v = uint64_t(lo) | (uint64_t(hi) << 32);
    return true;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

}  // namespace

void save_matrix_cache(const DistanceMatrix& m, uint64_t key, const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    std::fwrite(kMatrixMagic, 1, 8, f.get());
    put_u64(f.get(), key);
    put_u32(f.get(), uint32_t(m.q_rows));
    put_u32(f.get(), uint32_t(m.n_cols));
    for (int32_t e : m.entries) put_u32(f.get(), uint32_t(e));
    if (!m.labels.empty())
        std::fwrite(m.labels.data(), 1, m.labels.size(), f.get());
    if (std::ferror(f.get())) throw std::runtime_error(path + ": short write");
}

bool load_matrix_cache(DistanceMatrix& m, uint64_t key, const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
    if (!f) return false;
    char magic[8];
    if (std::fread(magic, 1, 8, f.get()) != 8 || !std::equal(magic, magic + 8, kMatrixMagic))
        return false;
    uint64_t stored_key;
    uint32_t q, n;
    if (!get_u64(f.get(), stored_key) || !get_u32(f.get(), q) || !get_u32(f.get(), n))
        return false;
    if (stored_key != key) return false;
    DistanceMatrix loaded;
    loaded.q_rows = int32_t(q);
    loaded.n_cols = int32_t(n);
    loaded.entries.resize(size_t(q) * n);
    for (int32_t& e : loaded.entries) {
        uint32_t v;
        if (!get_u32(f.get(), v)) return false;
        e = int32_t(v);
    }
    loaded.labels.resize(n);
    if (n && std::fread(loaded.labels.data(), 1, n, f.get()) != n) return false;
    m = std::move(loaded);
    return true;
}

}  // namespace kpboost
