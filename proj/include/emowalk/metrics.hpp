#pragma once

#include <span>
#include <string>

#include "emowalk/dataset.hpp"

namespace emowalk::eval {

enum class Task { Binary, Ternary };

std::string to_string(Task t);
Task parse_task(std::string_view s);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Support-weighted mean of per-class F1; a class with precision + recall = 0
/// contributes F1 = 0.
double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred);

/// Mann-Whitney AUC of `scores` with `positive_label` as the positive class:
/// correctly ordered (positive, negative) pairs count 1, tied pairs 1/2.
/// Throws SingleClassTruth when either side is empty.
double binary_auc(std::span<const int> labels, int positive_label, std::span<const double> scores);

/// Binary task: AUC of the larger label's probability column. Ternary: the
/// unweighted mean of the one-vs-rest AUCs of every class in `pred.classes`.
double roc_auc(std::span<const int> y_true, const learners::Prediction& pred, Task task);

/// mean(model) - mean(baseline), over the same users.
double user_lift(std::span<const double> model_acc, std::span<const double> baseline_acc);

struct WilcoxonResult {
  double w_plus = 0.0;  // sum of ranks of positive differences
  std::size_t n = 0;    // pairs left after dropping zero differences
  double p_value = 1.0;
  bool exact = true;
};

/// Differences with |d| <= this are treated as zero, and |d| values closer
/// than this as tied.
inline constexpr double kWilcoxonTieTolerance = 1e-12;
/// Exact null distribution up to this many non-zero differences.
inline constexpr std::size_t kWilcoxonExactMax = 25;

/// Two-sided Wilcoxon signed-rank test on paired differences.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);

/// p-value of wilcoxon_signed_rank(model - baseline). Needs at least 5 pairs.
double paired_significance(std::span<const double> model_acc, std::span<const double> baseline_acc);

/// "0.871 (0.073)"
std::string render_cell(double mean, double std);
/// Three decimals; anything below 0.0005 prints as "0.000".
std::string render_p(double p);
/// 0.86633 -> "86.63%"
std::string render_percent(double fraction);

}  // namespace emowalk::eval
