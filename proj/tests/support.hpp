#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emowalk/dataset.hpp"
#include "emowalk/experiment.hpp"
#include "emowalk/rng.hpp"

namespace testing {

using emowalk::Matrix;
using emowalk::learners::Dataset;

/// n rows, d columns of N(0,1) plus a label-dependent shift on column 0.
inline Dataset random_dataset(emowalk::rng::Engine& eng, std::size_t n, std::size_t d, std::vector<int> labels,
                              double shift = 1.0) {
  Dataset data;
  data.X = Matrix(n, d);
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i % labels.size()];
    data.y[i] = y;
    for (std::size_t j = 0; j < d; ++j) data.X(i, j) = emowalk::rng::normal(eng);
    data.X(i, 0) += shift * y;
  }
  return data;
}

/// Values drawn from a small grid so ties and repeated values occur.
inline Dataset coarse_dataset(emowalk::rng::Engine& eng, std::size_t n, std::size_t d, int n_classes) {
  Dataset data;
  data.X = Matrix(n, d);
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.y[i] = static_cast<int>(i % static_cast<std::size_t>(n_classes)) - 1;
    for (std::size_t j = 0; j < d; ++j)
      data.X(i, j) = static_cast<double>(emowalk::rng::uniform_int(eng, 0, 4)) + 0.5 * data.y[i] * (j == 0);
  }
  return data;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("emowalk_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Reference binary / ternary accuracy means and lifts, per condition:
/// {baseline, logistic, forest, tuned forest} and {logistic, forest, tuned} lifts.
struct PrintedCondition {
  double acc[4];
  double lift[3];
};

inline const PrintedCondition kBinaryTable[3] = {
    {{0.512, 0.818, 0.853, 0.871}, {0.306, 0.341, 0.359}},
    {{0.508, 0.749, 0.808, 0.827}, {0.241, 0.300, 0.320}},
    {{0.520, 0.850, 0.891, 0.901}, {0.329, 0.371, 0.381}},
};

inline const PrintedCondition kTernaryTable[3] = {
    {{0.343, 0.635, 0.724, 0.760}, {0.292, 0.381, 0.417}},
    {{0.340, 0.592, 0.685, 0.721}, {0.252, 0.345, 0.381}},
    {{0.348, 0.711, 0.782, 0.809}, {0.363, 0.434, 0.461}},
};

/// Two users per condition whose accuracies average to the printed means.
inline std::vector<emowalk::eval::UserEvaluation> table_fixture(const PrintedCondition (&table)[3],
                                                                emowalk::eval::Task task) {
  std::vector<emowalk::eval::UserEvaluation> out;
  for (int c = 0; c < 3; ++c) {
    for (int u = 0; u < 2; ++u) {
      emowalk::eval::UserEvaluation e;
      e.participant_id = "U" + std::to_string(u);
      e.condition = c;
      e.task = task;
      for (std::size_t m = 0; m < 4; ++m) {
        const double spread = u == 0 ? -0.01 : 0.01;
        e.metrics[m] = {0.5, table[c].acc[m], table[c].acc[m] + spread};
      }
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace testing
