#include "kpboost/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace kpboost {

std::string ratio_to_decimal(int64_t num, int64_t den) {
    if (den == 0) return "0.000000";
    int64_t scaled = num * 1000000 / den;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%06lld", (long long)(scaled / 1000000),
                  (long long)(scaled % 1000000));
    return buf;
}

std::string q16_to_decimal(int32_t q16) { return ratio_to_decimal(q16, 65536); }

std::string fp16_to_decimal(int32_t fp16) {
    bool neg = fp16 < 0;
    int32_t v = neg ? -fp16 : fp16;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%d.%04d", neg ? "-" : "", v / 16, (v % 16) * 625);
    return buf;
}

namespace {

// h_t bits for every image of a split, one descriptor pass per image.
std::vector<std::vector<uint8_t>> split_weak_bits(const StrongClassifier& sc,
                                                  const SplitFeatures& f) {
    const int n = int(f.descriptors.size());
    std::vector<std::vector<uint8_t>> bits(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < n; ++j) bits[j] = weak_bits(sc, f.descriptors[j]);
    return bits;
}

int prefix_miscount(const StrongClassifier& sc, const std::vector<uint8_t>& labels,
                    const std::vector<int64_t>& votes, int64_t alpha_sum) {
    int miscount = 0;
    for (size_t j = 0; j < labels.size(); ++j) {
        const bool pos =
            alpha_sum > 0 && ((votes[j] << 16) / alpha_sum) >= sc.decision_q16;
        miscount += int(pos != (labels[j] != 0));
    }
    return miscount;
}

}  // namespace

std::vector<ErrorCurvePoint> error_curves(const StrongClassifier& sc,
                                          const SplitFeatures& train,
                                          const SplitFeatures& test) {
    auto train_bits = split_weak_bits(sc, train);
    auto test_bits = split_weak_bits(sc, test);

    const int T = int(sc.rounds.size());
    std::vector<ErrorCurvePoint> out(T);
    std::vector<int64_t> train_votes(train.labels.size(), 0);
    std::vector<int64_t> test_votes(test.labels.size(), 0);
    int64_t alpha_sum = 0;
    for (int t = 0; t < T; ++t) {
        const int64_t a = sc.rounds[t].alpha_q16;
        alpha_sum += a;
        for (size_t j = 0; j < train_votes.size(); ++j)
            if (train_bits[j][t]) train_votes[j] += a;
        for (size_t j = 0; j < test_votes.size(); ++j)
            if (test_bits[j][t]) test_votes[j] += a;
        out[t].round = t + 1;
        out[t].train_total = int(train.labels.size());
        out[t].test_total = int(test.labels.size());
        out[t].train_miscount = prefix_miscount(sc, train.labels, train_votes, alpha_sum);
        out[t].test_miscount = prefix_miscount(sc, test.labels, test_votes, alpha_sum);
    }
    return out;
}

void write_error_curves_csv(const std::vector<ErrorCurvePoint>& curves, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "round,train_error,test_error\n";
    for (const auto& p : curves)
        out << p.round << ',' << ratio_to_decimal(p.train_miscount, p.train_total) << ','
            << ratio_to_decimal(p.test_miscount, p.test_total) << '\n';
    if (!out) throw std::runtime_error(path + ": short write");
}

std::vector<PRPoint> pr_curve(const StrongClassifier& sc, const SplitFeatures& test) {
    const int n = int(test.descriptors.size());
    std::vector<int32_t> outputs(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int j = 0; j < n; ++j) outputs[j] = strong_output(sc, test.descriptors[j]);

    std::vector<int32_t> thresholds(outputs);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    int64_t total_pos = 0;
    for (uint8_t y : test.labels) total_pos += y;
    const int64_t total_neg = n - total_pos;

    std::vector<PRPoint> out;
    out.reserve(thresholds.size());
    for (int32_t th : thresholds) {
        PRPoint p;
        p.threshold_q16 = th;
        for (int j = 0; j < n; ++j) {
            const bool pos = outputs[j] >= th;
            if (pos && test.labels[j]) ++p.tp;
            if (pos && !test.labels[j]) ++p.fp;
        }
        p.fn = total_pos - p.tp;
        p.tn = total_neg - p.fp;
        p.undefined_precision = (p.tp + p.fp) == 0;
        out.push_back(p);
    }
    return out;
}

void write_pr_csv(const std::vector<PRPoint>& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "threshold,precision,recall,tp,fp,fn,tn\n";
    for (const PRPoint& p : points)
        out << q16_to_decimal(p.threshold_q16) << ','
            << ratio_to_decimal(p.precision_num(), p.precision_den()) << ','
            << ratio_to_decimal(p.recall_num(), p.recall_den()) << ',' << p.tp << ',' << p.fp
            << ',' << p.fn << ',' << p.tn << '\n';
    if (!out) throw std::runtime_error(path + ": short write");
}

std::vector<RespondingKeypoint> responding_keypoints(const StrongClassifier& sc,
                                                     const ImageFeatures& features) {
    std::vector<RespondingKeypoint> out;
    for (size_t k = 0; k < features.keypoints.size(); ++k) {
        RespondingKeypoint r;
        r.keypoint = features.keypoints[k];
        for (size_t f = 0; f < sc.rounds.size(); ++f)
            if (sad_distance(sc.rounds[f].descriptor, features.descriptors[k]) <
                sc.rounds[f].threshold)
                r.features.push_back(int(f));
        if (!r.features.empty()) out.push_back(std::move(r));
    }
    return out;
}

Heatmap keypoint_heatmap(const StrongClassifier& sc, int feature,
                         const std::vector<std::string>& positive_paths,
                         const DetectorConfig& cfg) {
    if (feature < 0 || feature >= int(sc.rounds.size()))
        throw std::invalid_argument("heatmap: feature index out of range");
    const WeakClassifier& w = sc.rounds[feature];

    Heatmap hm;
    hm.feature = feature;
    const int n = int(positive_paths.size());
    std::vector<std::vector<HeatmapHit>> per_image(n);
    std::vector<std::pair<int, int>> geom(n, {0, 0});
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        try {
            GrayImage img = load_image(positive_paths[i]);
            geom[i] = {img.width, img.height};
            ImageFeatures f = extract_features(img, cfg);
            for (size_t k = 0; k < f.keypoints.size(); ++k)
                if (sad_distance(w.descriptor, f.descriptors[k]) < w.threshold)
                    per_image[i].push_back({i, f.keypoints[k].x_fp16, f.keypoints[k].y_fp16,
                                            f.keypoints[k].scale_fp16});
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (int i = 0; i < n; ++i) {
        if (geom[i] != geom[0])
            throw std::runtime_error("heatmap: mixed image geometries (" + positive_paths[i] +
                                     ")");
    }
    hm.width = n ? geom[0].first : 0;
    hm.height = n ? geom[0].second : 0;
    hm.counts.assign(size_t(hm.width) * hm.height, 0);
    for (auto& v : per_image)
        for (const HeatmapHit& h : v) {
            hm.hits.push_back(h);
            int x = std::clamp(h.x_fp16 / 16, 0, hm.width - 1);
            int y = std::clamp(h.y_fp16 / 16, 0, hm.height - 1);
            hm.counts[size_t(y) * hm.width + x] += 1;
        }
    return hm;
}

void write_heatmap_csv(const Heatmap& hm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "image,x,y,scale\n";
    for (const HeatmapHit& h : hm.hits)
        out << h.image << ',' << fp16_to_decimal(h.x_fp16) << ',' << fp16_to_decimal(h.y_fp16)
            << ',' << fp16_to_decimal(h.scale_fp16) << '\n';
    if (!out) throw std::runtime_error(path + ": short write");
}

GrayImage render_heatmap(const Heatmap& hm) {
    GrayImage img;
    img.width = std::max(hm.width, 1);
    img.height = std::max(hm.height, 1);
    img.pixels.assign(size_t(img.width) * img.height, 0);
    uint32_t peak = 0;
    for (uint32_t c : hm.counts) peak = std::max(peak, c);
    if (peak == 0) return img;
    for (size_t i = 0; i < hm.counts.size(); ++i)
        img.pixels[i] = uint8_t((uint64_t(hm.counts[i]) * 255) / peak);
    return img;
}

void draw_circle(GrayImage& img, int cx, int cy, int r, uint8_t value) {
    auto plot = [&](int x, int y) {
        if (x >= 0 && x < img.width && y >= 0 && y < img.height)
            img.pixels[size_t(y) * img.width + x] = value;
    };
    if (r < 1) r = 1;
    int x = r, y = 0, err = 1 - r;
    while (x >= y) {
        plot(cx + x, cy + y); plot(cx - x, cy + y);
        plot(cx + x, cy - y); plot(cx - x, cy - y);
        plot(cx + y, cy + x); plot(cx - y, cy + x);
        plot(cx + y, cy - x); plot(cx - y, cy - x);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

namespace {

// "frame9.pgm" before "frame10.pgm": compare embedded numbers numerically.
bool natural_less(const std::string& a, const std::string& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit((unsigned char)a[i]) && std::isdigit((unsigned char)b[j])) {
            size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit((unsigned char)a[i2])) ++i2;
            while (j2 < b.size() && std::isdigit((unsigned char)b[j2])) ++j2;
            std::string na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            na.erase(0, std::min(na.find_first_not_of('0'), na.size() - 1));
            nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size() - 1));
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

}  // namespace

SequenceResult filter_sequence(const StrongClassifier& sc, const std::string& frame_dir,
                               const DetectorConfig& cfg, const std::string& out_dir,
                               bool overlays) {
    std::vector<std::string> frames;
    for (const auto& entry : fs::directory_iterator(frame_dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png") frames.push_back(entry.path().string());
    }
    std::sort(frames.begin(), frames.end(), natural_less);
    if (!out_dir.empty()) fs::create_directories(out_dir);

    SequenceResult result;
    double total_ms = 0;
    int timed = 0;
    for (const std::string& path : frames) {
        FrameResult fr;
        fr.path = path;
        GrayImage img;
        try {
            img = load_image(path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: skipping frame: %s\n", e.what());
            fr.ok = false;
            result.frames.push_back(std::move(fr));
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        ImageFeatures feat = extract_features(img, cfg);
        fr.responding = responding_keypoints(sc, feat);
        auto t1 = std::chrono::steady_clock::now();
        fr.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
        total_ms += fr.millis;
        ++timed;

        if (!out_dir.empty()) {
            const std::string stem = fs::path(path).stem().string();
            std::ofstream csv(fs::path(out_dir) / (stem + ".csv"), std::ios::binary);
            csv << "x,y,scale,features\n";
            for (const RespondingKeypoint& r : fr.responding) {
                csv << fp16_to_decimal(r.keypoint.x_fp16) << ','
                    << fp16_to_decimal(r.keypoint.y_fp16) << ','
                    << fp16_to_decimal(r.keypoint.scale_fp16) << ',';
                for (size_t k = 0; k < r.features.size(); ++k)
                    csv << (k ? " " : "") << r.features[k];
                csv << '\n';
            }
            if (overlays) {
                GrayImage overlay = img;
                for (const RespondingKeypoint& r : fr.responding)
                    draw_circle(overlay, r.keypoint.x_fp16 / 16, r.keypoint.y_fp16 / 16,
                                r.keypoint.scale_fp16 / 16, 255);
                save_pgm(overlay, (fs::path(out_dir) / (stem + ".overlay.pgm")).string());
            }
        }
        result.frames.push_back(std::move(fr));
    }
    result.mean_millis = timed ? total_ms / timed : 0;
    return result;
}

}  // namespace kpboost
