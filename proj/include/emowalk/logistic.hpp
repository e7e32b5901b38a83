#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emowalk/dataset.hpp"

namespace emowalk::learners {

struct LogisticOptions {
  double reg_strength = 1.0;  // L2 weight; objective uses reg_strength / (2n) * |w|^2
  int max_iters = 1000;
  double tol = 1e-6;  // stop once the gradient norm drops below this
};

/// One-vs-rest logistic regression on standardized features. A two-class
/// problem keeps a single weight vector scoring the larger label.
struct LogisticModel {
  std::vector<int> classes;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;  // 0 marks a zero-variance feature, standardized to 0
  std::vector<std::vector<double>> weights;
  std::vector<double> intercepts;
  std::vector<int> iterations;  // per binary problem, for diagnostics
};

LogisticModel fit_logistic(const Dataset& train, const LogisticOptions& opts = {});
Prediction predict_logistic(const LogisticModel& model, const Matrix& X);

double sigmoid(double z) noexcept;

/// Regularized mean negative log-likelihood of a binary problem with
/// targets in {0, 1}:
///   (1/n) sum softplus(z_i) - t_i z_i + reg / (2n) |w|^2,   z_i = w.x_i + b.
/// Fills the gradient when the outputs are non-null.
double logistic_objective(const Matrix& X, std::span<const double> targets, std::span<const double> w, double b,
                          double reg_strength, std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);

}  // namespace emowalk::learners
