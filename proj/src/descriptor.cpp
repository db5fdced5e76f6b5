#include "kpboost/descriptor.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "kpboost/fixed_math.hpp"

namespace kpboost {

std::array<GradientSample, 400> sample_gradients(const IntegralImage& ii,
                                                 const Keypoint& kp) {
    std::array<GradientSample, 400> out{};
    const int32_t s_fp16 = kp.scale_fp16;
    const int s = std::max(1, int(s_fp16 >> 4));  // Haar half-size in pixels
    for (int j = 0; j < 20; ++j) {
        int32_t sy = kp.y_fp16 + int32_t(trunc_div(int64_t(s_fp16) * (2 * j - 19), 2));
        int cy = int(floor_div(sy, 16));
        for (int i = 0; i < 20; ++i) {
            int32_t sx = kp.x_fp16 + int32_t(trunc_div(int64_t(s_fp16) * (2 * i - 19), 2));
            int cx = int(floor_div(sx, 16));
            int64_t left = box_sum(ii, cx - s, cy - s, s, 2 * s);
            int64_t right = box_sum(ii, cx, cy - s, s, 2 * s);
            int64_t top = box_sum(ii, cx - s, cy - s, 2 * s, s);
            int64_t bottom = box_sum(ii, cx - s, cy, 2 * s, s);
            out[j * 20 + i] = {int32_t(right - left), int32_t(bottom - top)};
        }
    }
    return out;
}

void axis_weights_fp16(int i, int& sub0, int& w0, int& w1) {
    // Sub-region centers sit at sample indices 2, 7, 12, 17 (spacing 5).
    if (i <= 2) {
        sub0 = 0;
        w0 = 16;
        w1 = 0;
        return;
    }
    if (i >= 17) {
        sub0 = 3;
        w0 = 16;
        w1 = 0;
        return;
    }
    sub0 = (i - 2) / 5;
    int f = (i - 2) - 5 * sub0;
    w0 = (16 * (5 - f)) / 5;
    w1 = 16 - w0;
}

Descriptor compute_descriptor(const IntegralImage& ii, const Keypoint& kp) {
    auto samples = sample_gradients(ii, kp);

    int64_t acc[64] = {};
    for (int j = 0; j < 20; ++j) {
        int v0, wy0, wy1;
        axis_weights_fp16(j, v0, wy0, wy1);
        for (int i = 0; i < 20; ++i) {
            int u0, wx0, wx1;
            axis_weights_fp16(i, u0, wx0, wx1);
            const GradientSample& g = samples[j * 20 + i];
            if (g.dx == 0 && g.dy == 0) continue;
            const int64_t adx = std::abs(g.dx), ady = std::abs(g.dy);
            const int ws[2] = {wx0, wx1};
            const int vs[2] = {wy0, wy1};
            for (int b = 0; b < 2; ++b) {
                if (vs[b] == 0) continue;
                for (int a = 0; a < 2; ++a) {
                    if (ws[a] == 0) continue;
                    int w = ws[a] * vs[b];  // 1/256 units, sums to 256 per sample
                    int64_t* cell = &acc[((v0 + b) * 4 + (u0 + a)) * 4];
                    cell[0] += w * int64_t(g.dx);
                    cell[1] += w * adx;
                    cell[2] += w * int64_t(g.dy);
                    cell[3] += w * ady;
                }
            }
        }
    }

    int64_t total = 0;
    for (int64_t v : acc) total += std::abs(v);

    Descriptor d;
    if (total == 0) return d;

    // L1-normalize to mass 4096 by truncating integer scaling, then top the
    // truncation deficit back up on the |dx|/|dy| components by largest
    // remainder so the total is exact and |sum d| <= sum |d| stays intact.
    int32_t mass = 0;
    int64_t remainder[64];
    for (int i = 0; i < 64; ++i) {
        int64_t scaled = acc[i] * Descriptor::kNormMass;
        d[i] = int32_t(scaled / total);
        remainder[i] = std::abs(scaled) % total;
        mass += std::abs(d[i]);
    }
    int deficit = Descriptor::kNormMass - mass;
    if (deficit > 0) {
        std::array<int, 32> abs_idx;
        for (int k = 0; k < 32; ++k) abs_idx[k] = 2 * k + 1;  // components 1 and 3
        std::stable_sort(abs_idx.begin(), abs_idx.end(), [&](int a, int b) {
            return remainder[a] > remainder[b];
        });
        for (int k = 0; deficit > 0; k = (k + 1) % 32, --deficit) d[abs_idx[k]] += 1;
    }
    return d;
}

std::vector<Descriptor> compute_descriptors(const IntegralImage& ii,
                                            const std::vector<Keypoint>& kps) {
    std::vector<Descriptor> out(kps.size());
    const int n = int(kps.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) out[i] = compute_descriptor(ii, kps[i]);
    return out;
}

}  // namespace kpboost
