#include "emowalk/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emowalk/errors.hpp"

namespace emowalk::learners {

namespace {

double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Matrix standardize(const Matrix& X, std::span<const double> mean, std::span<const double> scale) {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c)
      out(r, c) = scale[c] > 0.0 ? (X(r, c) - mean[c]) / scale[c] : 0.0;
  return out;
}

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
  int iterations = 0;
};

// Gradient descent with Armijo backtracking; the step grows again after each
// accepted move.
BinaryFit fit_binary(const Matrix& Xs, std::span<const double> targets, const LogisticOptions& opts) {
  const std::size_t d = Xs.cols();
  BinaryFit fit;
  fit.w.assign(d, 0.0);
  std::vector<double> gw(d), w_try(d);
  double gb = 0.0;
  double f = logistic_objective(Xs, targets, fit.w, fit.b, opts.reg_strength, &gw, &gb);
  double step = 1.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    double gnorm2 = gb * gb;
    for (double g : gw) gnorm2 += g * g;
    if (std::sqrt(gnorm2) < opts.tol) break;
    fit.iterations = it + 1;

    double f_try = 0.0, b_try = 0.0;
    while (true) {
      for (std::size_t j = 0; j < d; ++j) w_try[j] = fit.w[j] - step * gw[j];
      b_try = fit.b - step * gb;
      f_try = logistic_objective(Xs, targets, w_try, b_try, opts.reg_strength);
      if (f_try <= f - 0.5 * step * gnorm2 || step < 1e-12) break;
      step *= 0.5;
    }
    if (step < 1e-12) break;
    fit.w.swap(w_try);
    fit.b = b_try;
    f = logistic_objective(Xs, targets, fit.w, fit.b, opts.reg_strength, &gw, &gb);
    step = std::min(step * 2.0, 1e6);
  }
  return fit;
}

double linear(std::span<const double> w, double b, std::span<const double> x) noexcept {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return z;
}

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_objective(const Matrix& X, std::span<const double> targets, std::span<const double> w, double b,
                          double reg_strength, std::vector<double>* grad_w, double* grad_b) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  if (grad_w) grad_w->assign(d, 0.0);
  double gb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = X.row(i);
    const double z = linear(w, b, x);
    loss += softplus(z) - targets[i] * z;
    if (grad_w) {
      const double r = sigmoid(z) - targets[i];
      for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += r * x[j];
      gb += r;
    }
  }
  double wsq = 0.0;
  for (double v : w) wsq += v * v;
  loss = loss * inv_n + 0.5 * reg_strength * inv_n * wsq;
  if (grad_w) {
    for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] = (*grad_w)[j] * inv_n + reg_strength * inv_n * w[j];
    if (grad_b) *grad_b = gb * inv_n;
  }
  return loss;
}

LogisticModel fit_logistic(const Dataset& train, const LogisticOptions& opts) {
  train.validate();
  if (train.size() == 0) throw EmptyDataset("logistic regression needs training rows");
  if (opts.reg_strength < 0.0) throw InvalidConfig("reg_strength must be non-negative");
  if (opts.max_iters < 0) throw InvalidConfig("max_iters must be non-negative");
  LogisticModel m;
  m.classes = classes_of(train.y);
  if (m.classes.size() < 2) throw SingleClassDataset("logistic regression needs at least two classes");

  const std::size_t n = train.size(), d = train.X.cols();
  m.feature_mean.assign(d, 0.0);
  m.feature_scale.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0;
    bool constant = true;
    for (std::size_t r = 0; r < n; ++r) {
      s += train.X(r, c);
      constant = constant && train.X(r, c) == train.X(0, c);
    }
    if (constant) {
      m.feature_mean[c] = train.X(0, c);
      continue;
    }
    const double mean = s / static_cast<double>(n);
    double v = 0.0;
    for (std::size_t r = 0; r < n; ++r) v += (train.X(r, c) - mean) * (train.X(r, c) - mean);
    m.feature_mean[c] = mean;
    m.feature_scale[c] = std::sqrt(v / static_cast<double>(n));
  }
  const Matrix Xs = standardize(train.X, m.feature_mean, m.feature_scale);

  // Binary: one problem for the larger label. Otherwise one per class.
  std::vector<int> positives;
  if (m.classes.size() == 2)
    positives.push_back(m.classes.back());
  else
    positives = m.classes;
  std::vector<double> targets(n);
  for (int pos : positives) {
    for (std::size_t i = 0; i < n; ++i) targets[i] = train.y[i] == pos ? 1.0 : 0.0;
    auto fit = fit_binary(Xs, targets, opts);
    m.weights.push_back(std::move(fit.w));
    m.intercepts.push_back(fit.b);
    m.iterations.push_back(fit.iterations);
  }
  return m;
}

Prediction predict_logistic(const LogisticModel& model, const Matrix& X) {
  if (X.rows() > 0 && X.cols() != model.feature_mean.size())
    throw DimensionMismatch("logistic model expects " + std::to_string(model.feature_mean.size()) + " features, got " +
                            std::to_string(X.cols()));
  const Matrix Xs = standardize(X, model.feature_mean, model.feature_scale);
  const std::size_t k = model.classes.size();
  Prediction p;
  p.classes = model.classes;
  p.labels.resize(X.rows());
  p.proba = Matrix(X.rows(), k);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto row = p.proba.row(r);
    if (k == 2) {
      const double pos = sigmoid(linear(model.weights[0], model.intercepts[0], Xs.row(r)));
      row[0] = 1.0 - pos;
      row[1] = pos;
    } else {
      // sigma(z_c) / sum_j sigma(z_j), computed from log-sigmoids so that
      // large negative scores cannot underflow the denominator to zero
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        row[c] = -softplus(-linear(model.weights[c], model.intercepts[c], Xs.row(r)));
        top = std::max(top, row[c]);
      }
      double total = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        row[c] = std::exp(row[c] - top);
        total += row[c];
      }
      for (std::size_t c = 0; c < k; ++c) row[c] /= total;
    }
    // first maximum = smallest label on ties
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    p.labels[r] = model.classes[static_cast<std::size_t>(best)];
  }
  return p;
}

}  // namespace emowalk::learners
