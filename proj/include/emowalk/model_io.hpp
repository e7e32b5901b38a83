#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "emowalk/baseline.hpp"
#include "emowalk/forest.hpp"
#include "emowalk/logistic.hpp"

// Plain-text model files. Line-oriented, whitespace-separated tokens, first
// line "emowalk-model <version>". Doubles use the shortest round-trip form,
// so save/load reproduces predictions exactly.
//
//   emowalk-model 1
//   kind forest | logistic | most_frequent
//   classes <k> <label>...
//   ... kind-specific body, see model_io.cpp ...
//   end
namespace emowalk::learners {

inline constexpr int kModelFormatVersion = 1;

using TrainedModel = std::variant<MostFrequentModel, LogisticModel, ForestModel>;

std::string save_model(const TrainedModel& model);
TrainedModel load_model(std::string_view content);

Prediction predict(const TrainedModel& model, const Matrix& X);

/// "n_trees=100 max_depth=none ..." as produced by HyperParams::to_string().
HyperParams parse_hyperparams(std::string_view s);

}  // namespace emowalk::learners
