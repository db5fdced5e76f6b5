#include "kpboost/detector.hpp"

#include <algorithm>
#include <stdexcept>

#include "kpboost/fixed_math.hpp"

namespace kpboost {

std::vector<ScaleLevel> default_scale_levels() {
    // norm_shift = round(log2(filter_size^4)) - 12, so a matched blob keeps
    // roughly the same magnitude at every level.
    static const int shifts[] = {1, 4, 6, 7, 8, 9, 10, 11};
    std::vector<ScaleLevel> levels(8);
    for (int i = 0; i < 8; ++i) {
        levels[i].index = i;
        levels[i].lobe = 3 + 2 * i;
        levels[i].filter_size = 3 * levels[i].lobe;
        levels[i].norm_shift = shifts[i];
    }
    return levels;
}

int64_t hessian_response(const IntegralImage& ii, const ScaleLevel& s, int x, int y) {
    const int l = s.lobe;
    const int half = (s.filter_size - 1) / 2;  // filter_size odd
    const int band = (l - 1) / 2;              // lobe odd

    // Dxx: (2l-1)-tall window, full width, middle l-wide band weighted -2.
    int64_t full_x = box_sum(ii, x - half, y - (l - 1), s.filter_size, 2 * l - 1);
    int64_t mid_x = box_sum(ii, x - band, y - (l - 1), l, 2 * l - 1);
    int64_t dxx = full_x - 3 * mid_x;

    int64_t full_y = box_sum(ii, x - (l - 1), y - half, 2 * l - 1, s.filter_size);
    int64_t mid_y = box_sum(ii, x - (l - 1), y - band, 2 * l - 1, l);
    int64_t dyy = full_y - 3 * mid_y;

    // Dxy: four l x l quadrant squares around the center pixel.
    int64_t dxy = box_sum(ii, x + 1, y - l, l, l) + box_sum(ii, x - l, y + 1, l, l) -
                  box_sum(ii, x - l, y - l, l, l) - box_sum(ii, x + 1, y + 1, l, l);

    // Cross-term weight 0.9^2 as the exact ratio 81/100.
    int64_t det = dxx * dyy - (81 * dxy * dxy) / 100;
    return det >> s.norm_shift;
}

std::vector<ResponseMap> build_response_maps(const IntegralImage& ii,
                                             const std::vector<ScaleLevel>& levels,
                                             const std::vector<int>& strides) {
    if (strides.size() < levels.size())
        throw std::invalid_argument("build_response_maps: one stride per level required");
    std::vector<ResponseMap> maps(levels.size());
    for (size_t li = 0; li < levels.size(); ++li) {
        ResponseMap& m = maps[li];
        m.scale = levels[li];
        m.step = strides[li];
        int nx = (ii.width - m.scale.filter_size) / m.step + 1;
        int ny = (ii.height - m.scale.filter_size) / m.step + 1;
        if (ii.width < m.scale.filter_size || ii.height < m.scale.filter_size) {
            nx = ny = 0;
        }
        m.grid_w = nx;
        m.grid_h = ny;
        m.responses.assign(size_t(std::max(nx, 0)) * std::max(ny, 0), 0);
#pragma omp parallel for schedule(static)
        for (int gy = 0; gy < ny; ++gy) {
            int32_t* row = &m.responses[size_t(gy) * nx];
            const int py = m.py(gy);
            for (int gx = 0; gx < nx; ++gx)
                row[gx] = int32_t(hessian_response(ii, m.scale, m.px(gx), py));
        }
    }
    return maps;
}

namespace {

// Nearest grid index of map m for pixel coordinate p, or -1 when the
// aligned cell lacks an in-grid 3x3 neighborhood.
inline int aligned_index(int p, int origin, int step, int extent) {
    int idx = int(floor_div(p - origin + step / 2, step));
    if (idx < 1 || idx > extent - 2) return -1;
    return idx;
}

inline bool beats_3x3(int32_t r, const ResponseMap& m, int cx, int cy) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (r <= m.at(cx + dx, cy + dy)) return false;
    return true;
}

}  // namespace

std::vector<RawCandidate> find_local_maxima(const std::vector<ResponseMap>& maps,
                                            int32_t threshold) {
    std::vector<RawCandidate> out;
    if (maps.size() < 3) return out;
    std::vector<std::vector<RawCandidate>> per_level(maps.size());
    const int last = int(maps.size()) - 1;

#pragma omp parallel for schedule(dynamic, 1)
    for (int li = 1; li < last; ++li) {
        const ResponseMap& cur = maps[li];
        const ResponseMap& below = maps[li - 1];
        const ResponseMap& above = maps[li + 1];
        if (cur.empty() || below.empty() || above.empty()) continue;
        if (cur.grid_w < 3 || cur.grid_h < 3) continue;
        std::vector<RawCandidate>& found = per_level[li];
        for (int gy = 1; gy + 1 < cur.grid_h; ++gy) {
            for (int gx = 1; gx + 1 < cur.grid_w; ++gx) {
                int32_t r = cur.at(gx, gy);
                if (r <= threshold) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (r <= cur.at(gx + dx, gy + dy)) {
                            is_max = false;
                            break;
                        }
                    }
                if (!is_max) continue;
                const int px = cur.px(gx), py = cur.py(gy);
                int bx = aligned_index(px, below.origin(), below.step, below.grid_w);
                int by = aligned_index(py, below.origin(), below.step, below.grid_h);
                int ax = aligned_index(px, above.origin(), above.step, above.grid_w);
                int ay = aligned_index(py, above.origin(), above.step, above.grid_h);
                if (bx < 0 || by < 0 || ax < 0 || ay < 0) continue;
                if (!beats_3x3(r, below, bx, by) || !beats_3x3(r, above, ax, ay)) continue;
                found.push_back({int(li), gx, gy, px, py, r});
            }
        }
    }
    for (auto& v : per_level)
        out.insert(out.end(), v.begin(), v.end());
    return out;
}

int32_t interpolate_offset_fp16(int64_t r_below, int64_t r_at, int64_t r_above) {
    int64_t den = 2 * (r_below - 2 * r_at + r_above);
    if (den == 0) return 0;
    int64_t d = trunc_div(16 * (r_below - r_above), den);
    return int32_t(std::clamp<int64_t>(d, -15, 15));
}

namespace {

bool stronger(const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.scale_fp16 != b.scale_fp16) return a.scale_fp16 < b.scale_fp16;
    if (a.y_fp16 != b.y_fp16) return a.y_fp16 < b.y_fp16;
    return a.x_fp16 < b.x_fp16;
}

bool imbricated(const Keypoint& a, const Keypoint& b) {
    int64_t dx = int64_t(a.x_fp16) - b.x_fp16;
    int64_t dy = int64_t(a.y_fp16) - b.y_fp16;
    int64_t r = std::max(a.scale_fp16, b.scale_fp16);
    return dx * dx + dy * dy < r * r;
}

}  // namespace

std::vector<Keypoint> suppress_imbricated(std::vector<Keypoint> candidates) {
    std::sort(candidates.begin(), candidates.end(), stronger);
    std::vector<Keypoint> kept;
    kept.reserve(candidates.size());
    for (const Keypoint& c : candidates) {
        bool blocked = false;
        for (const Keypoint& k : kept)
            if (imbricated(k, c)) {
                blocked = true;
                break;
            }
        if (!blocked) kept.push_back(c);
    }
    return kept;
}

std::vector<Keypoint> detect_keypoints(const IntegralImage& ii, const DetectorConfig& cfg) {
    auto maps = build_response_maps(ii, cfg.levels, cfg.strides);
    int non_empty = 0;
    for (const auto& m : maps)
        if (!m.empty()) ++non_empty;
    if (non_empty < 3) return {};

    auto raw = find_local_maxima(maps, cfg.threshold);
    std::vector<Keypoint> cands;
    cands.reserve(raw.size());
    for (const RawCandidate& c : raw) {
        const ResponseMap& cur = maps[c.level];
        const ResponseMap& below = maps[c.level - 1];
        const ResponseMap& above = maps[c.level + 1];
        int bx = aligned_index(c.px, below.origin(), below.step, below.grid_w);
        int by = aligned_index(c.py, below.origin(), below.step, below.grid_h);
        int ax = aligned_index(c.px, above.origin(), above.step, above.grid_w);
        int ay = aligned_index(c.py, above.origin(), above.step, above.grid_h);

        int32_t ds = interpolate_offset_fp16(below.at(bx, by), c.response, above.at(ax, ay));
        int32_t dx = interpolate_offset_fp16(cur.at(c.gx - 1, c.gy), c.response,
                                             cur.at(c.gx + 1, c.gy));
        int32_t dy = interpolate_offset_fp16(cur.at(c.gx, c.gy - 1), c.response,
                                             cur.at(c.gx, c.gy + 1));

        Keypoint kp;
        kp.x_fp16 = 16 * c.px + dx * cur.step;
        kp.y_fp16 = 16 * c.py + dy * cur.step;
        // Interpolated filter size, then sigma = 1.2/9 = 2/15 of it.
        int spacing = above.scale.filter_size - cur.scale.filter_size;
        int32_t size_fp16 = 16 * cur.scale.filter_size + ds * spacing;
        kp.scale_fp16 = int32_t(trunc_div(int64_t(size_fp16) * 2, 15));
        kp.response = c.response;
        cands.push_back(kp);
    }

    auto kept = suppress_imbricated(std::move(cands));
    if (int(kept.size()) > cfg.max_keypoints) kept.resize(cfg.max_keypoints);
    return kept;
}

std::vector<Keypoint> detect_keypoints(const GrayImage& img, const DetectorConfig& cfg) {
    return detect_keypoints(integral(img), cfg);
}

}  // namespace kpboost
