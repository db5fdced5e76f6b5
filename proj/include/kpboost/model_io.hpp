#pragma once

#include <string>

#include "kpboost/boosting.hpp"

namespace kpboost {

// Line-oriented text model format, bit-exact round trip:
//   kpboost-model v1 rounds=<T> norm=4096 decision=<num>/65536
// then per round
//   alpha=<int>/65536 thr=<int> src=<img>:<kp>
//   <64 space-separated descriptor integers>
void save_model(const StrongClassifier& sc, const std::string& path);
StrongClassifier load_model(const std::string& path);

std::string model_to_string(const StrongClassifier& sc);
StrongClassifier model_from_string(const std::string& text);

}  // namespace kpboost
