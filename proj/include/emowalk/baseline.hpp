#pragma once

#include <vector>

#include "emowalk/dataset.hpp"

namespace emowalk::learners {

/// Always predicts the most frequent training label; probabilities are the
/// training prior and never depend on the features.
struct MostFrequentModel {
  int majority_label = 0;
  std::vector<int> classes;
  std::vector<double> prior;  // aligned with classes
};

/// Ties go to the numerically smallest label.
MostFrequentModel fit_most_frequent(const Dataset& train);
Prediction predict_most_frequent(const MostFrequentModel& model, const Matrix& X);

}  // namespace emowalk::learners
