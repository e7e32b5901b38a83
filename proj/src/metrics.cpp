#include "emowalk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "emowalk/errors.hpp"
#include "emowalk/text.hpp"

namespace emowalk::eval {

namespace {

void check_pair(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw LengthMismatch(std::string(what) + ": inputs differ in length");
  if (a == 0) throw EmptyInput(std::string(what) + ": empty input");
}

double mean_of(std::span<const double> v) {
  // sorted summation keeps the result independent of input order
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double t = 0.0;
  for (double x : s) t += x;
  return t / static_cast<double>(s.size());
}

}  // namespace

std::string to_string(Task t) { return t == Task::Binary ? "binary" : "ternary"; }

Task parse_task(std::string_view s) {
  if (s == "binary") return Task::Binary;
  if (s == "ternary") return Task::Ternary;
  throw InvalidConfig("task must be binary or ternary, got '" + std::string(s) + "'");
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true.size(), y_pred.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true.size(), y_pred.size(), "weighted_f1");
  const auto classes = learners::classes_of(y_true);
  const auto n = static_cast<double>(y_true.size());
  double total = 0.0;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c, p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double support = static_cast<double>(tp + fn);
    const double prec = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double rec = static_cast<double>(tp) / support;
    const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    total += support / n * f1;
  }
  return total;
}

double binary_auc(std::span<const int> labels, int positive_label, std::span<const double> scores) {
  check_pair(labels.size(), scores.size(), "roc_auc");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk groups of equal score in ascending order; every positive beats every
  // negative in lower groups and ties with the negatives of its own group.
  std::uint64_t n_pos = 0, n_neg = 0, neg_below = 0, wins = 0, ties = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t gp = 0, gn = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] == positive_label ? ++gp : ++gn;
      ++j;
    }
    wins += gp * neg_below;
    ties += gp * gn;
    neg_below += gn;
    n_pos += gp;
    n_neg += gn;
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw SingleClassTruth("AUC needs both positive and negative examples");
  return static_cast<double>(2 * wins + ties) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double roc_auc(std::span<const int> y_true, const learners::Prediction& pred, Task task) {
  check_pair(y_true.size(), pred.proba.rows(), "roc_auc");
  std::vector<double> scores(y_true.size());
  const auto one_vs_rest = [&](std::size_t col) {
    for (std::size_t i = 0; i < y_true.size(); ++i) scores[i] = pred.proba(i, col);
    return binary_auc(y_true, pred.classes[col], scores);
  };
  if (pred.classes.size() < 2) throw SingleClassTruth("AUC needs a model with at least two classes");
  if (task == Task::Binary) {
    if (pred.classes.size() != 2) throw DimensionMismatch("binary AUC needs exactly two classes");
    return one_vs_rest(1);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < pred.classes.size(); ++c) total += one_vs_rest(c);
  return total / static_cast<double>(pred.classes.size());
}

double user_lift(std::span<const double> model_acc, std::span<const double> baseline_acc) {
  check_pair(model_acc.size(), baseline_acc.size(), "user_lift");
  return mean_of(model_acc) - mean_of(baseline_acc);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences) {
  struct Item {
    double mag;
    bool positive;
  };
  std::vector<Item> items;
  for (double d : differences)
    if (std::abs(d) > kWilcoxonTieTolerance) items.push_back({std::abs(d), d > 0.0});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.mag < b.mag; });

  WilcoxonResult res;
  res.n = items.size();
  if (res.n == 0) return res;  // no evidence either way: p = 1

  // Doubled mid-ranks are integers: positions i..j (1-based) get i + j.
  std::vector<std::uint64_t> rank2(items.size());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j + 1 < items.size() && items[j + 1].mag - items[j].mag <= kWilcoxonTieTolerance) ++j;
    for (std::size_t k = i; k <= j; ++k) rank2[k] = (i + 1) + (j + 1);
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::uint64_t w2 = 0, total2 = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    total2 += rank2[i];
    if (items[i].positive) w2 += rank2[i];
  }
  res.w_plus = static_cast<double>(w2) / 2.0;

  if (res.n <= kWilcoxonExactMax) {
    // counts[s] = number of sign assignments whose doubled positive rank sum is s
    std::vector<double> counts(total2 + 1, 0.0);
    counts[0] = 1.0;
    std::uint64_t reach = 0;
    for (std::uint64_t r : rank2) {
      for (std::uint64_t s = reach + 1; s-- > 0;)
        if (counts[s] != 0.0) counts[s + r] += counts[s];
      reach += r;
    }
    double lower = 0.0, upper = 0.0;
    for (std::uint64_t s = 0; s <= total2; ++s) {
      if (s <= w2) lower += counts[s];
      if (s >= w2) upper += counts[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(res.n));
    res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    res.exact = true;
    return res;
  }

  const auto n = static_cast<double>(res.n);
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  res.exact = false;
  if (var <= 0.0) return res;
  const double z = (res.w_plus - mean) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return res;
}

double paired_significance(std::span<const double> model_acc, std::span<const double> baseline_acc) {
  if (model_acc.size() != baseline_acc.size()) throw LengthMismatch("paired_significance: inputs differ in length");
  if (model_acc.size() < 5) throw TooFewPairs("paired_significance needs at least 5 pairs");
  std::vector<double> diff(model_acc.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = model_acc[i] - baseline_acc[i];
  return wilcoxon_signed_rank(diff).p_value;
}

std::string render_cell(double mean, double std) {
  return text::fixed(mean, 3) + " (" + text::fixed(std, 3) + ")";
}

std::string render_p(double p) { return p < 0.0005 ? "0.000" : text::fixed(p, 3); }

std::string render_percent(double fraction) { return text::fixed(fraction * 100.0, 2) + "%"; }

}  // namespace emowalk::eval
