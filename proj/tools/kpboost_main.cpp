// kpboost: train and run boosted keypoint-presence categorizers.
//
// Subcommands: keypoints, train, eval, pr-curve, heatmap, filter-seq.
// A flat key=value config file provides defaults; flags override it.
// KPBOOST_THREADS caps OpenMP parallelism.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kpboost/dataset.hpp"
#include "kpboost/eval.hpp"
#include "kpboost/model_io.hpp"

namespace fs = std::filesystem;
using namespace kpboost;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string manifest_path;
    std::string model_path;
    std::string out_dir = ".";
    std::string cache_path;
    std::optional<uint32_t> seed;
    std::optional<int> rounds;
    std::optional<int> max_keypoints;
    std::optional<int32_t> hessian_threshold;
};

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty() ? RunConfig{} : load_config(a.config_path);
    if (a.seed) cfg.seed = *a.seed;
    if (a.rounds) cfg.rounds = *a.rounds;
    if (a.max_keypoints) cfg.detector.max_keypoints = *a.max_keypoints;
    if (a.hessian_threshold) cfg.detector.threshold = *a.hessian_threshold;
    return cfg;
}

void add_common_flags(CLI::App* cmd, CommonArgs& a, bool with_training) {
    cmd->add_option("--config", a.config_path, "key=value config file");
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--max-keypoints", a.max_keypoints, "cap keypoints per image");
    cmd->add_option("--hessian-threshold", a.hessian_threshold, "detector response threshold");
    if (with_training) {
        cmd->add_option("--seed", a.seed, "RNG seed for the train/test split");
        cmd->add_option("--rounds", a.rounds, "boosting rounds");
    }
}

// Splits in place when the manifest does not already carry split flags.
void ensure_split(DatasetManifest& m, const RunConfig& cfg) {
    if (m.has_split()) return;
    split_dataset(m, cfg.seed, cfg.train_fraction_pos, cfg.train_fraction_neg);
}

void write_round_log(const TrainingState& st, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "round,keypoint,image,threshold,epsilon,alpha,train_error\n";
    for (const RoundLog& r : st.round_log) {
        out << r.round << ',' << r.keypoint_id << ',' << r.source_image << ',' << r.threshold
            << ',' << ratio_to_decimal(int64_t(r.err_mass), int64_t(r.total_mass)) << ','
            << ratio_to_decimal(r.alpha_q16, 65536) << ','
            << ratio_to_decimal(r.train_miscount, int64_t(st.labels.size())) << '\n';
    }
}

int cmd_keypoints(const std::string& image_path, const CommonArgs& args,
                  const std::string& out_file) {
    RunConfig cfg = resolve_config(args);
    GrayImage img = load_image(image_path);
    IntegralImage ii = integral(img);
    auto kps = detect_keypoints(ii, cfg.detector);
    auto descs = compute_descriptors(ii, kps);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file, std::ios::binary);
        if (!file) throw std::runtime_error(out_file + ": cannot open for writing");
        out = &file;
    }
    *out << "# x,y,scale,response,descriptor\n";
    for (size_t i = 0; i < kps.size(); ++i) {
        *out << fp16_to_decimal(kps[i].x_fp16) << ',' << fp16_to_decimal(kps[i].y_fp16) << ','
             << fp16_to_decimal(kps[i].scale_fp16) << ',' << kps[i].response << ',';
        for (int d = 0; d < Descriptor::kSize; ++d) *out << (d ? " " : "") << descs[i][d];
        *out << '\n';
    }
    return 0;
}

int cmd_train(const CommonArgs& args) {
    if (args.manifest_path.empty() || args.model_path.empty())
        throw std::runtime_error("train: --manifest and --model are required");
    RunConfig cfg = resolve_config(args);
    DatasetManifest manifest = load_manifest(args.manifest_path);
    ensure_split(manifest, cfg);
    fs::create_directories(args.out_dir);
    save_manifest(manifest, (fs::path(args.out_dir) / "manifest_split.csv").string());

    SplitFeatures train = extract_split_features(manifest, Split::train, cfg.detector);
    std::vector<KeypointRecord> pool = build_positive_pool(train);
    std::fprintf(stderr, "train: %zu images, positive pool %zu keypoints\n",
                 train.labels.size(), pool.size());

    const uint64_t key = dataset_cache_key(manifest, Split::train, cfg.detector);
    DistanceMatrix matrix;
    if (args.cache_path.empty() || !load_matrix_cache(matrix, key, args.cache_path)) {
        matrix = build_distance_matrix(pool, train.descriptors, train.labels);
        if (!args.cache_path.empty()) save_matrix_cache(matrix, key, args.cache_path);
    }

    TrainOptions opts;
    opts.rounds = cfg.rounds;
    opts.decision_q16 = cfg.decision_q16;
    auto [model, state] = adaboost_train(matrix, pool, opts);
    save_model(model, args.model_path);
    write_round_log(state, (fs::path(args.out_dir) / "round_log.csv").string());
    if (state.stopped_early)
        std::fprintf(stderr, "train: stopped early: %s\n", state.stop_reason.c_str());
    std::fprintf(stderr, "train: %zu rounds, final train error %s\n", model.rounds.size(),
                 state.round_log.empty()
                     ? "n/a"
                     : ratio_to_decimal(state.round_log.back().train_miscount,
                                        int64_t(state.labels.size()))
                           .c_str());
    return 0;
}

int cmd_eval(const CommonArgs& args, bool curves_too) {
    if (args.manifest_path.empty() || args.model_path.empty())
        throw std::runtime_error("eval: --manifest and --model are required");
    RunConfig cfg = resolve_config(args);
    StrongClassifier model = load_model(args.model_path);
    DatasetManifest manifest = load_manifest(args.manifest_path);
    ensure_split(manifest, cfg);
    fs::create_directories(args.out_dir);

    SplitFeatures test = extract_split_features(manifest, Split::test, cfg.detector);
    if (curves_too) {
        SplitFeatures train = extract_split_features(manifest, Split::train, cfg.detector);
        auto curves = error_curves(model, train, test);
        write_error_curves_csv(curves,
                               (fs::path(args.out_dir) / "error_curves.csv").string());
        if (!curves.empty())
            std::fprintf(stderr, "eval: final train error %s, test error %s\n",
                         ratio_to_decimal(curves.back().train_miscount,
                                          curves.back().train_total)
                             .c_str(),
                         ratio_to_decimal(curves.back().test_miscount, curves.back().test_total)
                             .c_str());
    }
    auto pr = pr_curve(model, test);
    write_pr_csv(pr, (fs::path(args.out_dir) / "pr_curve.csv").string());
    return 0;
}

int cmd_heatmap(int feature, const CommonArgs& args) {
    if (args.manifest_path.empty() || args.model_path.empty())
        throw std::runtime_error("heatmap: --manifest and --model are required");
    RunConfig cfg = resolve_config(args);
    StrongClassifier model = load_model(args.model_path);
    DatasetManifest manifest = load_manifest(args.manifest_path);

    // Positive training images when the manifest carries split flags,
    // otherwise every positive image.
    std::vector<std::string> paths;
    for (const ManifestEntry& e : manifest.entries)
        if (e.label == 1 && (!manifest.has_split() || e.split == Split::train))
            paths.push_back(e.path);

    Heatmap hm = keypoint_heatmap(model, feature, paths, cfg.detector);
    fs::create_directories(args.out_dir);
    char stem[64];
    std::snprintf(stem, sizeof stem, "heatmap_%03d", feature);
    write_heatmap_csv(hm, (fs::path(args.out_dir) / (std::string(stem) + ".csv")).string());
    save_pgm(render_heatmap(hm),
             (fs::path(args.out_dir) / (std::string(stem) + ".pgm")).string());
    std::fprintf(stderr, "heatmap: feature %d, %zu hits over %zu images\n", feature,
                 hm.hits.size(), paths.size());
    return 0;
}

int cmd_filter_seq(const std::string& frame_dir, const CommonArgs& args) {
    if (args.model_path.empty()) throw std::runtime_error("filter-seq: --model is required");
    RunConfig cfg = resolve_config(args);
    StrongClassifier model = load_model(args.model_path);
    SequenceResult res = filter_sequence(model, frame_dir, cfg.detector, args.out_dir,
                                         cfg.overlays);
    for (const FrameResult& f : res.frames)
        if (f.ok)
            std::fprintf(stderr, "frame %s: %zu responding keypoints, %.2f ms\n",
                         f.path.c_str(), f.responding.size(), f.millis);
    std::fprintf(stderr, "filter-seq: mean per-frame detect+filter %.2f ms\n", res.mean_millis);
    std::printf("%.3f\n", res.mean_millis);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("KPBOOST_THREADS")) {
        int n = std::atoi(threads);
        if (n >= 1) omp_set_num_threads(n);
    }

    CLI::App app{"Boosted keypoint-presence object categorization"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string image_path, frame_dir, kp_out_file;
    int feature = 0;

    CLI::App* kp = app.add_subcommand("keypoints", "Detect keypoints and print descriptors");
    kp->add_option("image", image_path, "input image (PGM or PNG)")->required();
    kp->add_option("--out", kp_out_file, "write listing to a file instead of stdout");
    kp->add_option("--config", args.config_path, "key=value config file");
    kp->add_option("--max-keypoints", args.max_keypoints, "cap keypoints per image");
    kp->add_option("--hessian-threshold", args.hessian_threshold,
                   "detector response threshold");

    CLI::App* tr = app.add_subcommand("train", "Train a model from a dataset manifest");
    add_common_flags(tr, args, true);
    tr->add_option("--manifest", args.manifest_path, "dataset manifest CSV")->required();
    tr->add_option("--model", args.model_path, "model file to write")->required();
    tr->add_option("--cache", args.cache_path, "distance-matrix cache file");

    CLI::App* ev = app.add_subcommand("eval", "Error curves and PR curve on the test split");
    add_common_flags(ev, args, true);
    ev->add_option("--manifest", args.manifest_path, "dataset manifest CSV")->required();
    ev->add_option("--model", args.model_path, "trained model file")->required();

    CLI::App* pr = app.add_subcommand("pr-curve", "PR curve on the test split");
    add_common_flags(pr, args, true);
    pr->add_option("--manifest", args.manifest_path, "dataset manifest CSV")->required();
    pr->add_option("--model", args.model_path, "trained model file")->required();

    CLI::App* hm = app.add_subcommand("heatmap",
                                      "Accumulate responding-keypoint positions for a feature");
    hm->add_option("feature", feature, "model feature index")->required();
    add_common_flags(hm, args, false);
    hm->add_option("--manifest", args.manifest_path, "dataset manifest CSV")->required();
    hm->add_option("--model", args.model_path, "trained model file")->required();

    CLI::App* seq = app.add_subcommand("filter-seq",
                                       "Keep positively-responding keypoints per frame");
    seq->add_option("dir", frame_dir, "directory of numbered frames")->required();
    add_common_flags(seq, args, false);
    seq->add_option("--model", args.model_path, "trained model file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (kp->parsed()) return cmd_keypoints(image_path, args, kp_out_file);
        if (tr->parsed()) return cmd_train(args);
        if (ev->parsed()) return cmd_eval(args, true);
        if (pr->parsed()) return cmd_eval(args, false);
        if (hm->parsed()) return cmd_heatmap(feature, args);
        if (seq->parsed()) return cmd_filter_seq(frame_dir, args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
