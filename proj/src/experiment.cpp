#include "emowalk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "emowalk/baseline.hpp"
#include "emowalk/errors.hpp"
#include "emowalk/forest.hpp"
#include "emowalk/ingest.hpp"
#include "emowalk/parallel.hpp"
#include "emowalk/rng.hpp"

namespace emowalk::eval {

namespace {

MetricSet score(std::span<const int> y_true, const learners::Prediction& pred, Task task) {
  return {roc_auc(y_true, pred, task), weighted_f1(y_true, pred.labels), accuracy(y_true, pred.labels)};
}

struct Prepared {
  learners::Dataset data;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;
  std::string skip_reason;
};

struct FoldOutcome {
  std::array<MetricSet, kModelCount> metrics{};
  learners::HyperParams tuned;
  std::string error;
};

Prepared prepare(const UserData& user, Task task, const Protocol& p) {
  Prepared out;
  out.seed = user_seed(p.seed, user.participant_id, user.condition);
  out.data = learners::make_dataset(select_task(user.windows, task));
  const auto classes = learners::classes_of(out.data.y);
  const std::size_t needed = task == Task::Binary ? 2 : 3;
  if (classes.size() < needed) {
    out.skip_reason = "SingleClassDataset: " + std::to_string(classes.size()) + " of " + std::to_string(needed) +
                      " classes present";
    return out;
  }
  try {
    out.folds = tuning::stratified_kfold(out.data.y, p.k, rng::derive(out.seed, {0}), p.fold_mode);
  } catch (const TooFewPerClass& e) {
    out.skip_reason = std::string("TooFewPerClass: ") + e.what();
    return out;
  }
  // The tuned forest cross-validates inside each training part, which needs
  // k members per class there too.
  for (std::size_t f = 0; f < out.folds.size(); ++f) {
    std::map<int, std::size_t> counts;
    for (std::size_t i : tuning::training_indices(out.folds, f)) ++counts[out.data.y[i]];
    for (const auto& [label, c] : counts) {
      if (c < static_cast<std::size_t>(p.k)) {
        out.skip_reason = "TooFewPerClass: class " + std::to_string(label) + " has " + std::to_string(c) +
                          " training windows in fold " + std::to_string(f + 1) + ", fewer than k = " +
                          std::to_string(p.k) + " needed for tuning";
        return out;
      }
    }
  }
  return out;
}

FoldOutcome run_fold(const Prepared& prep, std::size_t fold, Task task, const Protocol& p) {
  const auto train_idx = tuning::training_indices(prep.folds, fold);
  const auto& test_idx = prep.folds[fold];
  std::vector<std::size_t> overlap;
  std::set_intersection(train_idx.begin(), train_idx.end(), test_idx.begin(), test_idx.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) throw std::logic_error("fold leakage: training and test indices overlap");

  const auto train = learners::subset(prep.data, train_idx);
  const auto test = learners::subset(prep.data, test_idx);
  const auto f = static_cast<std::uint64_t>(fold);

  FoldOutcome out;
  auto& m = out.metrics;
  m[static_cast<std::size_t>(ModelKind::Baseline)] =
      score(test.y, learners::predict_most_frequent(learners::fit_most_frequent(train), test.X), task);
  m[static_cast<std::size_t>(ModelKind::Logistic)] =
      score(test.y, learners::predict_logistic(learners::fit_logistic(train, p.logistic), test.X), task);
  m[static_cast<std::size_t>(ModelKind::ForestDefault)] =
      score(test.y,
            learners::predict_random_forest(
                learners::fit_random_forest(train, p.default_forest, rng::derive(prep.seed, {1, f})), test.X),
            task);

  // Tuning sees only the training part of this fold.
  tuning::SearchOptions so;
  so.n_iter = p.n_iter;
  so.k = p.k;
  so.fold_mode = p.fold_mode;
  const auto search = tuning::random_search(train, p.space, so, rng::derive(prep.seed, {2, f}));
  out.tuned = search.best;
  m[static_cast<std::size_t>(ModelKind::ForestTuned)] =
      score(test.y,
            learners::predict_random_forest(
                learners::fit_random_forest(train, search.best, rng::derive(prep.seed, {3, f})), test.X),
            task);
  return out;
}

double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double t = 0.0;
  for (double x : v) t += x;
  return t / static_cast<double>(v.size());
}

double sorted_sample_std(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double m = sorted_mean(v);
  double t = 0.0;
  for (double x : v) t += (x - m) * (x - m);
  return std::sqrt(t / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Baseline: return "baseline";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::ForestDefault: return "forest_default";
    case ModelKind::ForestTuned: return "forest_tuned";
  }
  return "?";
}

ModelKind parse_model(std::string_view s) {
  for (auto m : kAllModels)
    if (to_string(m) == s) return m;
  throw DataError("unknown model '" + std::string(s) + "'");
}

std::string display_name(ModelKind m) {
  switch (m) {
    case ModelKind::Baseline: return "Baseline";
    case ModelKind::Logistic: return "Logistic Regression";
    case ModelKind::ForestDefault: return "Random Forest";
    case ModelKind::ForestTuned: return "Random Forest with Hyperparameter Tuning";
  }
  return "?";
}

std::uint64_t user_seed(std::uint64_t run_seed, const std::string& participant_id, int condition) {
  return rng::derive(run_seed, {rng::hash_string(participant_id), static_cast<std::uint64_t>(condition)});
}

std::vector<features::FeatureVector> select_task(std::span<const features::FeatureVector> windows, Task task) {
  std::vector<features::FeatureVector> out;
  for (const auto& w : windows)
    if (task == Task::Ternary || w.emotion != ingest::kNeutral) out.push_back(w);
  return out;
}

ExperimentResult run_personal_experiment(std::span<const UserData> users, Task task, const Protocol& protocol) {
  if (protocol.k < 2) throw InvalidConfig("k must be at least 2");
  protocol.space.validate();
  protocol.default_forest.validate();

  std::vector<Prepared> prepared;
  prepared.reserve(users.size());
  std::vector<std::pair<std::size_t, std::size_t>> units;  // (user, fold)
  for (std::size_t u = 0; u < users.size(); ++u) {
    prepared.push_back(prepare(users[u], task, protocol));
    if (prepared.back().skip_reason.empty())
      for (std::size_t f = 0; f < prepared.back().folds.size(); ++f) units.emplace_back(u, f);
  }

  std::vector<FoldOutcome> outcomes(units.size());
  parallel_for(units.size(), protocol.threads, [&](std::size_t i) {
    const auto [u, f] = units[i];
    try {
      outcomes[i] = run_fold(prepared[u], f, task, protocol);
    } catch (const DataError& e) {
      outcomes[i].error = e.what();
    }
  });

  ExperimentResult result;
  std::size_t next = 0;
  for (std::size_t u = 0; u < users.size(); ++u) {
    const auto& prep = prepared[u];
    if (!prep.skip_reason.empty()) {
      result.skipped.push_back({users[u].participant_id, users[u].condition, task, prep.skip_reason});
      continue;
    }
    UserEvaluation ev;
    ev.participant_id = users[u].participant_id;
    ev.condition = users[u].condition;
    ev.task = task;
    ev.n_windows = prep.data.size();
    std::string error;
    for (std::size_t f = 0; f < prep.folds.size(); ++f, ++next) {
      const auto& o = outcomes[next];
      if (!o.error.empty() && error.empty()) error = "fold " + std::to_string(f + 1) + ": " + o.error;
      for (std::size_t m = 0; m < kModelCount; ++m) ev.folds[m].push_back(o.metrics[m]);
      ev.tuned_params.push_back(o.tuned);
    }
    if (!error.empty()) {
      result.skipped.push_back({ev.participant_id, ev.condition, task, error});
      continue;
    }
    for (std::size_t m = 0; m < kModelCount; ++m) {
      const auto& fs = ev.folds[m];
      MetricSet mean;
      for (const auto& s : fs) {
        mean.auc += s.auc;
        mean.f1_weighted += s.f1_weighted;
        mean.accuracy += s.accuracy;
      }
      const auto n = static_cast<double>(fs.size());
      ev.metrics[m] = {mean.auc / n, mean.f1_weighted / n, mean.accuracy / n};
    }
    result.evaluations.push_back(std::move(ev));
  }
  return result;
}

const SummaryRow* StudySummary::find(int condition, ModelKind model) const {
  for (const auto& r : rows)
    if (r.condition == condition && r.model == model) return &r;
  return nullptr;
}

std::vector<StudySummary> summarize_study(std::span<const UserEvaluation> evals) {
  std::map<std::pair<Task, int>, std::vector<const UserEvaluation*>> groups;
  for (const auto& e : evals) groups[{e.task, e.condition}].push_back(&e);

  std::vector<StudySummary> out;
  for (const auto& [key, members] : groups) {
    const auto [task, condition] = key;
    if (members.size() < 2)
      throw TooFewUsers("task " + to_string(task) + " condition " + std::to_string(condition) + " has " +
                        std::to_string(members.size()) + " user(s); at least 2 are needed");
    if (out.empty() || out.back().task != task) out.push_back(StudySummary{task, {}, {}});
    auto& summary = out.back();

    const auto column = [&](ModelKind m, double MetricSet::*field) {
      std::vector<double> v;
      for (const auto* e : members) v.push_back(e->of(m).*field);
      return v;
    };
    const auto baseline_acc = column(ModelKind::Baseline, &MetricSet::accuracy);
    for (auto m : kAllModels) {
      SummaryRow row;
      row.condition = condition;
      row.model = m;
      row.n_users = members.size();
      const auto auc = column(m, &MetricSet::auc);
      const auto f1 = column(m, &MetricSet::f1_weighted);
      const auto acc = column(m, &MetricSet::accuracy);
      row.mean = {sorted_mean(auc), sorted_mean(f1), sorted_mean(acc)};
      row.std = {sorted_sample_std(auc), sorted_sample_std(f1), sorted_sample_std(acc)};
      if (m != ModelKind::Baseline) {
        row.user_lift = user_lift(acc, baseline_acc);
        if (members.size() >= 5) {
          // pair order does not matter: the signed-rank statistic is a sum over pairs
          row.p_value = paired_significance(acc, baseline_acc);
        }
      }
      summary.rows.push_back(row);
    }
  }

  for (auto& summary : out) {
    for (auto m : kAllModels) {
      std::vector<double> per_condition;
      for (const auto& r : summary.rows)
        if (r.model == m) per_condition.push_back(r.mean.accuracy);
      summary.cross_condition_accuracy[static_cast<std::size_t>(m)] = sorted_mean(per_condition);
    }
  }
  return out;
}

}  // namespace emowalk::eval
