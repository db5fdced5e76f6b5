#include "kpboost/serial_ref.hpp"

#include <stdexcept>

namespace kpboost::serial {

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
        if (ii.width < m.scale.filter_size || ii.height < m.scale.filter_size) nx = ny = 0;
        m.grid_w = nx;
        m.grid_h = ny;
        m.responses.assign(size_t(std::max(nx, 0)) * std::max(ny, 0), 0);
        for (int gy = 0; gy < ny; ++gy)
            for (int gx = 0; gx < nx; ++gx)
                m.responses[size_t(gy) * nx + gx] =
                    int32_t(hessian_response(ii, m.scale, m.px(gx), m.py(gy)));
    }
    return maps;
}

std::vector<Descriptor> compute_descriptors(const IntegralImage& ii,
                                            const std::vector<Keypoint>& kps) {
    std::vector<Descriptor> out(kps.size());
    for (size_t i = 0; i < kps.size(); ++i) out[i] = compute_descriptor(ii, kps[i]);
    return out;
}

DistanceMatrix build_distance_matrix(const std::vector<KeypointRecord>& pool,
                                     const std::vector<std::vector<Descriptor>>& image_descriptors,
                                     const std::vector<uint8_t>& labels) {
    DistanceMatrix m;
    m.q_rows = int32_t(pool.size());
    m.n_cols = int32_t(image_descriptors.size());
    m.labels = labels;
    m.entries.resize(size_t(m.q_rows) * m.n_cols);
    for (int i = 0; i < m.q_rows; ++i)
        for (int j = 0; j < m.n_cols; ++j)
            m.entries[size_t(i) * m.n_cols + j] =
                image_distance(pool[i].descriptor, image_descriptors[j]);
    return m;
}

Selection select_best(const SelectionContext& ctx, std::span<const uint64_t> weights) {
    const DistanceMatrix& m = *ctx.matrix;
    Selection global{-1, 0, ~0ull};
    std::vector<uint64_t> errs;
    for (int i = 0; i < m.q_rows; ++i) {
        weighted_errors_for_row(m.row(i), ctx.order[i], weights, m.labels, ctx.candidates[i],
                                errs);
        for (size_t c = 0; c < errs.size(); ++c) {
            if (errs[c] < global.err_mass) {
                global.err_mass = errs[c];
                global.keypoint_id = i;
                global.threshold = ctx.candidates[i][c];
            }
        }
    }
    return global;
}

}  // namespace kpboost::serial
