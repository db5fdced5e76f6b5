#include "kpboost/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kpboost {

Fraction parse_fraction(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        int64_t num = std::stoll(s.substr(0, slash));
        int64_t den = std::stoll(s.substr(slash + 1));
        if (den <= 0 || num < 0) throw std::invalid_argument("bad fraction: " + s);
        return {num, den};
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        int64_t num = std::stoll(s);
        if (num < 0) throw std::invalid_argument("bad fraction: " + s);
        return {num, 1};
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_digits = s.size() - dot - 1;
    if (frac_digits == 0 || frac_digits > 9) throw std::invalid_argument("bad fraction: " + s);
    int64_t den = 1;
    for (size_t i = 0; i < frac_digits; ++i) den *= 10;
    int64_t num = std::stoll(digits);
    if (num < 0) throw std::invalid_argument("bad fraction: " + s);
    return {num, den};
}

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "hessian_threshold") {
        cfg.detector.threshold = std::stoi(value);
    } else if (key == "max_keypoints") {
        cfg.detector.max_keypoints = std::stoi(value);
        if (cfg.detector.max_keypoints < 1)
            throw std::invalid_argument("max_keypoints must be >= 1");
    } else if (key == "scale_levels") {
        int n = std::stoi(value);
        auto all = default_scale_levels();
        if (n < 3 || n > int(all.size()))
            throw std::invalid_argument("scale_levels must be in [3, 8]");
        cfg.detector.levels.assign(all.begin(), all.begin() + n);
        cfg.detector.strides.resize(n);
    } else if (key == "strides") {
        auto v = parse_int_list(value);
        if (v.size() != cfg.detector.levels.size())
            throw std::invalid_argument("strides: one value per scale level required");
        for (int s : v)
            if (s < 1) throw std::invalid_argument("strides must be >= 1");
        cfg.detector.strides = v;
    } else if (key == "rounds") {
        cfg.rounds = std::stoi(value);
        if (cfg.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    } else if (key == "seed") {
        cfg.seed = uint32_t(std::stoul(value));
    } else if (key == "train_fraction_pos") {
        cfg.train_fraction_pos = parse_fraction(value);
    } else if (key == "train_fraction_neg") {
        cfg.train_fraction_neg = parse_fraction(value);
    } else if (key == "decision_threshold") {
        Fraction f = parse_fraction(value);
        cfg.decision_q16 = int32_t(f.of(65536));
        if (cfg.decision_q16 < 0 || cfg.decision_q16 > 65536)
            throw std::invalid_argument("decision_threshold must be in [0, 1]");
    } else if (key == "overlays") {
        cfg.overlays = std::stoi(value) != 0;
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": unreadable config file");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        try {
            apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

std::string detector_config_string(const DetectorConfig& d) {
    std::ostringstream out;
    out << "levels=";
    for (const ScaleLevel& s : d.levels)
        out << s.filter_size << ">>" << s.norm_shift << ",";
    out << ";strides=";
    for (int s : d.strides) out << s << ",";
    out << ";threshold=" << d.threshold << ";max_keypoints=" << d.max_keypoints;
    return out.str();
}

}  // namespace kpboost
