#include "kpboost/boosting.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "kpboost/fixed_math.hpp"

namespace kpboost {

bool evaluate_weak(const WeakClassifier& w, std::span<const Descriptor> image_descriptors) {
    return image_distance(w.descriptor, image_descriptors) < w.threshold;
}

void weighted_errors_for_row(std::span<const int32_t> row, std::span<const int32_t> order,
                             std::span<const uint64_t> weights,
                             std::span<const uint8_t> labels,
                             std::span<const int32_t> candidates,
                             std::vector<uint64_t>& err_out) {
    // err(t) = (negative mass below t) + (positive mass at or above t).
    uint64_t pos_total = 0;
    for (size_t j = 0; j < weights.size(); ++j)
        if (labels[j]) pos_total += weights[j];

    err_out.assign(candidates.size(), 0);
    uint64_t neg_below = 0, pos_below = 0;
    size_t r = 0;
    for (size_t c = 0; c < candidates.size(); ++c) {
        const int32_t t = candidates[c];
        while (r < order.size() && row[order[r]] < t) {
            const int32_t j = order[r];
            if (labels[j])
                pos_below += weights[j];
            else
                neg_below += weights[j];
            ++r;
        }
        err_out[c] = neg_below + (pos_total - pos_below);
    }
}

SelectionContext::SelectionContext(const DistanceMatrix& m) : matrix(&m) {
    order.resize(m.q_rows);
    candidates.resize(m.q_rows);
    const int q = m.q_rows;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < q; ++i) {
        auto row = m.row(i);
        std::vector<int32_t> idx(m.n_cols);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int32_t a, int32_t b) { return row[a] < row[b]; });
        order[i] = std::move(idx);
        candidates[i] = threshold_candidates(row);
    }
}

Selection select_best(const SelectionContext& ctx, std::span<const uint64_t> weights) {
    const DistanceMatrix& m = *ctx.matrix;
    std::vector<Selection> per_row(m.q_rows);
    const int q = m.q_rows;
#pragma omp parallel
    {
        std::vector<uint64_t> errs;
#pragma omp for schedule(static)
        for (int i = 0; i < q; ++i) {
            weighted_errors_for_row(m.row(i), ctx.order[i], weights, m.labels,
                                    ctx.candidates[i], errs);
            Selection best{int32_t(i), 0, ~0ull};
            for (size_t c = 0; c < errs.size(); ++c) {
                if (errs[c] < best.err_mass) {
                    best.err_mass = errs[c];
                    best.threshold = ctx.candidates[i][c];
                }
            }
            per_row[i] = best;
        }
    }
    // Deterministic reduction regardless of thread count: rows scanned in
    // id order, strict improvement only, so ties keep the lowest id.
    Selection global{-1, 0, ~0ull};
    for (const Selection& s : per_row)
        if (s.err_mass < global.err_mass) global = s;
    return global;
}

Selection select_best(const DistanceMatrix& matrix, const TrainingState& state) {
    SelectionContext ctx(matrix);
    return select_best(ctx, state.weights);
}

namespace {

std::vector<uint64_t> uniform_weights(int n) {
    std::vector<uint64_t> w(n, kWeightOne / n);
    // Hand the division remainder to the first examples so the total is
    // exactly kWeightOne.
    uint64_t rem = kWeightOne % n;
    for (uint64_t i = 0; i < rem; ++i) w[i] += 1;
    return w;
}

void renormalize(std::vector<uint64_t>& w) {
    unsigned __int128 sum = 0;
    for (uint64_t v : w) sum += v;
    if (sum == 0) throw std::runtime_error("adaboost: weight mass collapsed");
    for (uint64_t& v : w)
        v = uint64_t(((unsigned __int128)v << 48) / sum);
}

}  // namespace

std::pair<StrongClassifier, TrainingState> adaboost_train(const DistanceMatrix& matrix,
                                                          const std::vector<KeypointRecord>& pool,
                                                          const TrainOptions& opts) {
    if (opts.rounds < 1) throw std::invalid_argument("adaboost: round count must be >= 1");
    if (int32_t(pool.size()) != matrix.q_rows)
        throw std::invalid_argument("adaboost: pool size does not match matrix rows");
    const int n = matrix.n_cols;
    int positives = 0;
    for (uint8_t y : matrix.labels) positives += y;
    if (positives == 0 || positives == n)
        throw std::invalid_argument("adaboost: training set needs both classes");

    SelectionContext ctx(matrix);
    TrainingState state;
    state.labels = matrix.labels;
    state.weights = uniform_weights(n);

    StrongClassifier sc;
    sc.decision_q16 = opts.decision_q16;
    std::vector<int64_t> votes(n, 0);  // Q16 alpha mass voting positive, per example
    int64_t alpha_sum = 0;

    for (int t = 0; t < opts.rounds; ++t) {
        uint64_t total = std::accumulate(state.weights.begin(), state.weights.end(), uint64_t(0));
        Selection sel = select_best(ctx, state.weights);

        if (2 * sel.err_mass >= total) {
            state.stopped_early = true;
            state.stop_reason = "no weak classifier beats chance at round " +
                                std::to_string(t + 1);
            break;
        }

        // Clamp epsilon away from 0 so alpha stays finite on separable data.
        const uint64_t eps_min = total / uint64_t(4 * n);
        uint64_t err_c = std::clamp<uint64_t>(sel.err_mass, std::max<uint64_t>(eps_min, 1),
                                              total - std::max<uint64_t>(eps_min, 1));

        const int64_t alpha = half_ln_ratio_q16(total - err_c, err_c);
        const uint64_t up = sqrt_ratio_q32(total - err_c, err_c);  // exp(+alpha)
        const uint64_t down = sqrt_ratio_q32(err_c, total - err_c);  // exp(-alpha)

        const KeypointRecord& src = pool[sel.keypoint_id];
        WeakClassifier wc;
        wc.descriptor = src.descriptor;
        wc.threshold = sel.threshold;
        wc.alpha_q16 = alpha;
        wc.src_keypoint = src.id;
        wc.src_image = src.image_index;
        sc.rounds.push_back(wc);
        alpha_sum += alpha;

        auto row = matrix.row(sel.keypoint_id);
        for (int j = 0; j < n; ++j) {
            const bool h = row[j] < sel.threshold;
            const bool correct = (h == (state.labels[j] != 0));
            const uint64_t mult = correct ? down : up;
            state.weights[j] = uint64_t(((unsigned __int128)state.weights[j] * mult) >> 32);
            if (h) votes[j] += alpha;
        }
        renormalize(state.weights);

        int miscount = 0;
        uint64_t post_err = 0, post_total = 0;
        for (int j = 0; j < n; ++j) {
            const bool pos = 2 * votes[j] >= alpha_sum;
            miscount += int(pos != (state.labels[j] != 0));
            const bool h = row[j] < sel.threshold;
            post_total += state.weights[j];
            if (h != (state.labels[j] != 0)) post_err += state.weights[j];
        }

        state.round_log.push_back({t + 1, src.id, src.image_index, sel.threshold, sel.err_mass,
                                   err_c, total, alpha, miscount, post_err, post_total});
    }

    if (sc.rounds.empty())
        throw std::runtime_error("adaboost: no usable round (stopped immediately)");
    return {std::move(sc), std::move(state)};
}

int32_t strong_output(const StrongClassifier& sc, std::span<const Descriptor> image_descriptors) {
    int64_t vote = 0, total = 0;
    for (const WeakClassifier& w : sc.rounds) {
        total += w.alpha_q16;
        if (evaluate_weak(w, image_descriptors)) vote += w.alpha_q16;
    }
    if (total == 0) return 0;
    return int32_t((vote << 16) / total);
}

bool classify(const StrongClassifier& sc, std::span<const Descriptor> image_descriptors) {
    return strong_output(sc, image_descriptors) >= sc.decision_q16;
}

std::vector<uint8_t> weak_bits(const StrongClassifier& sc,
                               std::span<const Descriptor> image_descriptors) {
    std::vector<uint8_t> bits(sc.rounds.size());
    for (size_t t = 0; t < sc.rounds.size(); ++t)
        bits[t] = evaluate_weak(sc.rounds[t], image_descriptors) ? 1 : 0;
    return bits;
}

std::vector<int32_t> vote_trace(const StrongClassifier& sc,
                                std::span<const Descriptor> image_descriptors) {
    auto bits = weak_bits(sc, image_descriptors);
    std::vector<int32_t> trace(sc.rounds.size());
    int64_t vote = 0, total = 0;
    for (size_t t = 0; t < sc.rounds.size(); ++t) {
        total += sc.rounds[t].alpha_q16;
        if (bits[t]) vote += sc.rounds[t].alpha_q16;
        trace[t] = total ? int32_t((vote << 16) / total) : 0;
    }
    return trace;
}

}  // namespace kpboost
