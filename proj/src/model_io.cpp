#include "kpboost/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kpboost {

std::string model_to_string(const StrongClassifier& sc) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "kpboost-model v1 rounds=%zu norm=%d decision=%d/65536\n",
                  sc.rounds.size(), Descriptor::kNormMass, sc.decision_q16);
    out += buf;
    for (const WeakClassifier& w : sc.rounds) {
        std::snprintf(buf, sizeof buf, "alpha=%" PRId64 "/65536 thr=%d src=%d:%d\n",
                      w.alpha_q16, w.threshold, w.src_image, w.src_keypoint);
        out += buf;
        for (int i = 0; i < Descriptor::kSize; ++i) {
            std::snprintf(buf, sizeof buf, i ? " %d" : "%d", w.descriptor[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

StrongClassifier model_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("model: empty file");

    size_t rounds = 0;
    int norm = 0;
    int32_t decision = 0;
    if (std::sscanf(line.c_str(), "kpboost-model v1 rounds=%zu norm=%d decision=%d/65536",
                    &rounds, &norm, &decision) != 3)
        throw std::runtime_error("model: bad header: " + line);
    if (norm != Descriptor::kNormMass)
        throw std::runtime_error("model: unsupported normalization mass");

    StrongClassifier sc;
    sc.decision_q16 = decision;
    sc.rounds.reserve(rounds);
    for (size_t t = 0; t < rounds; ++t) {
        if (!std::getline(in, line))
            throw std::runtime_error("model: truncated at round " + std::to_string(t + 1));
        WeakClassifier w;
        if (std::sscanf(line.c_str(), "alpha=%" SCNd64 "/65536 thr=%d src=%d:%d",
                        &w.alpha_q16, &w.threshold, &w.src_image, &w.src_keypoint) != 4)
            throw std::runtime_error("model: bad round line: " + line);
        if (!std::getline(in, line))
            throw std::runtime_error("model: missing descriptor at round " + std::to_string(t + 1));
        std::istringstream ds(line);
        for (int i = 0; i < Descriptor::kSize; ++i)
            if (!(ds >> w.descriptor[i]))
                throw std::runtime_error("model: short descriptor at round " +
                                         std::to_string(t + 1));
        int32_t extra;
        if (ds >> extra)
            throw std::runtime_error("model: descriptor too long at round " + std::to_string(t + 1));
        sc.rounds.push_back(w);
    }
    return sc;
}

void save_model(const StrongClassifier& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << model_to_string(sc);
    if (!out) throw std::runtime_error(path + ": short write");
}

StrongClassifier load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": unreadable file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

}  // namespace kpboost
