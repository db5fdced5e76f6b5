// kpboost-synth: generate a deterministic synthetic dataset or frame
// sequence for trying the pipeline without real data.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "synth.hpp"

using namespace kpboost;

int main(int argc, char** argv) {
    CLI::App app{"Synthetic dataset / sequence generator"};
    app.require_subcommand(1);

    std::string dir = "synth_data", category = "car";
    int positives = 100, negatives = 100, frames = 20, width = 320, height = 240;
    uint32_t seed = 7;

    CLI::App* ds = app.add_subcommand("dataset", "car- or pedestrian-style labeled images");
    ds->add_option("--out", dir, "output directory")->capture_default_str();
    ds->add_option("--category", category, "car | pedestrian")->capture_default_str();
    ds->add_option("--positives", positives, "positive image count")->capture_default_str();
    ds->add_option("--negatives", negatives, "negative image count")->capture_default_str();
    ds->add_option("--seed", seed, "generator seed")->capture_default_str();

    CLI::App* sq = app.add_subcommand("sequence", "numbered frames with a moving target");
    sq->add_option("--out", dir, "output directory")->capture_default_str();
    sq->add_option("--frames", frames, "frame count")->capture_default_str();
    sq->add_option("--width", width, "frame width")->capture_default_str();
    sq->add_option("--height", height, "frame height")->capture_default_str();
    sq->add_option("--seed", seed, "generator seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ds->parsed()) {
            synth::Category cat;
            if (category == "car")
                cat = synth::Category::car;
            else if (category == "pedestrian")
                cat = synth::Category::pedestrian;
            else
                throw std::runtime_error("unknown category: " + category);
            DatasetManifest m = synth::write_dataset(dir, cat, positives, negatives, seed);
            save_manifest(m, dir + "/manifest.csv");
            std::printf("%s/manifest.csv: %d positives, %d negatives\n", dir.c_str(),
                        positives, negatives);
        } else if (sq->parsed()) {
            synth::write_sequence(dir, frames, width, height, seed);
            std::printf("%s: %d frames %dx%d\n", dir.c_str(), frames, width, height);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
