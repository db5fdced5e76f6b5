#pragma once

#include <cstdint>
#include <string>

#include "kpboost/detector.hpp"

namespace kpboost {

// Exact rational, parsed from "a/b" or decimal literals like "0.64".
struct Fraction {
    int64_t num = 1;
    int64_t den = 2;

    // round-half-up of n * num / den
    int64_t of(int64_t n) const { return (n * num + den / 2) / den; }
};

Fraction parse_fraction(const std::string& s);

struct RunConfig {
    DetectorConfig detector;
    int rounds = 300;
    uint32_t seed = 42;
    Fraction train_fraction_pos{64, 100};
    Fraction train_fraction_neg{644, 1000};
    int32_t decision_q16 = 32768;
    bool overlays = true;
};

// Flat key=value file ('#' comments). Unknown keys are rejected.
RunConfig load_config(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

// Stable serialization of the detector settings, used to key the distance
// matrix cache.
std::string detector_config_string(const DetectorConfig& d);

}  // namespace kpboost
