#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emowalk/features.hpp"
#include "emowalk/logistic.hpp"
#include "emowalk/metrics.hpp"
#include "emowalk/tuning.hpp"

// Personal-model experiment: every user-condition gets its own models,
// evaluated with one stratified k-fold split shared by all four models.
namespace emowalk::eval {

enum class ModelKind : std::size_t { Baseline, Logistic, ForestDefault, ForestTuned };
inline constexpr std::size_t kModelCount = 4;
inline constexpr std::array<ModelKind, kModelCount> kAllModels{ModelKind::Baseline, ModelKind::Logistic,
                                                               ModelKind::ForestDefault, ModelKind::ForestTuned};

/// "baseline", "logistic", "forest_default", "forest_tuned"
std::string to_string(ModelKind m);
ModelKind parse_model(std::string_view s);
/// Row label as printed in the summary tables.
std::string display_name(ModelKind m);

struct MetricSet {
  double auc = 0.0;
  double f1_weighted = 0.0;
  double accuracy = 0.0;
};

struct UserData {
  std::string participant_id;
  int condition = 0;
  std::vector<features::FeatureVector> windows;
};

struct Protocol {
  int k = 5;
  std::uint64_t seed = 42;
  int n_iter = 50;
  tuning::SearchSpace space;
  tuning::FoldMode fold_mode = tuning::FoldMode::Shuffled;
  learners::LogisticOptions logistic;
  learners::HyperParams default_forest = learners::default_forest_params();
  unsigned threads = 1;
};

struct UserEvaluation {
  std::string participant_id;
  int condition = 0;
  Task task = Task::Binary;
  std::size_t n_windows = 0;
  std::array<MetricSet, kModelCount> metrics{};             // fold means
  std::array<std::vector<MetricSet>, kModelCount> folds{};  // per-fold raw scores
  std::vector<learners::HyperParams> tuned_params;          // chosen per fold

  const MetricSet& of(ModelKind m) const { return metrics[static_cast<std::size_t>(m)]; }
};

struct SkipRecord {
  std::string participant_id;
  int condition = 0;
  Task task = Task::Binary;
  std::string reason;
};

struct ExperimentResult {
  std::vector<UserEvaluation> evaluations;
  std::vector<SkipRecord> skipped;
};

/// Seed used for one user-condition: derive(run seed, hash(participant), condition).
std::uint64_t user_seed(std::uint64_t run_seed, const std::string& participant_id, int condition);

/// Binary keeps only happy and sad windows; ternary keeps all three.
std::vector<features::FeatureVector> select_task(std::span<const features::FeatureVector> windows, Task task);

/// Users whose data cannot be split are skipped with a reason; the rest of
/// the run continues. Results come back in input order.
ExperimentResult run_personal_experiment(std::span<const UserData> users, Task task, const Protocol& protocol);

struct SummaryRow {
  int condition = 0;
  ModelKind model = ModelKind::Baseline;
  std::size_t n_users = 0;
  MetricSet mean;
  MetricSet std;  // sample (n - 1) standard deviation across users
  std::optional<double> user_lift;
  std::optional<double> p_value;
};

struct StudySummary {
  Task task = Task::Binary;
  std::vector<SummaryRow> rows;  // ordered by condition, then model
  /// Per model: mean over conditions of the per-condition mean accuracy.
  std::array<double, kModelCount> cross_condition_accuracy{};

  const SummaryRow* find(int condition, ModelKind model) const;
};

/// One summary per task present in `evals`, binary first. Cells do not depend
/// on user order.
std::vector<StudySummary> summarize_study(std::span<const UserEvaluation> evals);

}  // namespace emowalk::eval
