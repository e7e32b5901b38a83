#include "emowalk/results.hpp"

#include <algorithm>
#include <cstdio>

#include <yaml-cpp/yaml.h>

#include "emowalk/errors.hpp"
#include "emowalk/model_io.hpp"
#include "emowalk/text.hpp"

namespace emowalk::results {

namespace {

using eval::kAllModels;
using eval::MetricSet;
using eval::ModelKind;

std::string num(double v) { return text::format_double(v); }

void emit_metrics(YAML::Emitter& out, const MetricSet& m) {
  out << YAML::Key << "auc" << YAML::Value << num(m.auc);
  out << YAML::Key << "f1_weighted" << YAML::Value << num(m.f1_weighted);
  out << YAML::Key << "accuracy" << YAML::Value << num(m.accuracy);
}

[[noreturn]] void malformed(const std::string& what) { throw DataError("results file: " + what); }

const YAML::Node& need(const YAML::Node& parent, const char* key, YAML::Node& slot) {
  slot = parent[key];
  if (!slot) malformed(std::string("missing '") + key + "'");
  return slot;
}

std::string get_string(const YAML::Node& parent, const char* key) {
  YAML::Node n;
  need(parent, key, n);
  if (!n.IsScalar()) malformed(std::string("'") + key + "' is not a scalar");
  return n.Scalar();
}

double get_double(const YAML::Node& parent, const char* key) {
  const auto s = get_string(parent, key);
  const auto v = text::parse_double(s);
  if (!v) malformed(std::string("'") + key + "' is not a number: " + s);
  return *v;
}

long long get_int(const YAML::Node& parent, const char* key) {
  const auto s = get_string(parent, key);
  const auto v = text::parse_int(s);
  if (!v) malformed(std::string("'") + key + "' is not an integer: " + s);
  return *v;
}

MetricSet read_metrics(const YAML::Node& n) {
  return {get_double(n, "auc"), get_double(n, "f1_weighted"), get_double(n, "accuracy")};
}

std::string lift_cell(const std::optional<double>& v) { return v ? num(*v) : ""; }

}  // namespace

std::string write_results_yaml(const ResultsFile& r) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "format" << YAML::Value << "emowalk-results";
  out << YAML::Key << "version" << YAML::Value << kResultsFormatVersion;
  out << YAML::Key << "seed" << YAML::Value << r.info.seed;
  out << YAML::Key << "config_digest" << YAML::Value << YAML::DoubleQuoted << r.info.config_digest;
  out << YAML::Key << "catalog_version" << YAML::Value << r.info.catalog_version;

  const auto& p = r.info.protocol;
  out << YAML::Key << "protocol" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "k" << YAML::Value << p.k;
  out << YAML::Key << "n_iter" << YAML::Value << p.n_iter;
  out << YAML::Key << "fold_mode" << YAML::Value << tuning::to_string(p.fold_mode);
  out << YAML::Key << "default_forest" << YAML::Value << p.default_forest.to_string();
  out << YAML::Key << "logistic" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "reg_strength" << YAML::Value << num(p.logistic.reg_strength);
  out << YAML::Key << "max_iters" << YAML::Value << p.logistic.max_iters;
  out << YAML::Key << "tol" << YAML::Value << num(p.logistic.tol);
  out << YAML::EndMap;
  out << YAML::Key << "search_space" << YAML::Value << YAML::BeginMap;
  const auto space_text = tuning::format_search_space(p.space);
  text::LineReader space(space_text);
  std::string_view line;
  while (space.next(line)) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    out << YAML::Key << std::string(text::trim(line.substr(0, eq))) << YAML::Value
        << std::string(text::trim(line.substr(eq + 1)));
  }
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "evaluations" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : r.evaluations) {
    out << YAML::BeginMap;
    out << YAML::Key << "participant_id" << YAML::Value << YAML::DoubleQuoted << e.participant_id;
    out << YAML::Key << "condition" << YAML::Value << e.condition;
    out << YAML::Key << "task" << YAML::Value << eval::to_string(e.task);
    out << YAML::Key << "n_windows" << YAML::Value << e.n_windows;
    out << YAML::Key << "models" << YAML::Value << YAML::BeginMap;
    for (auto m : kAllModels) {
      const auto i = static_cast<std::size_t>(m);
      out << YAML::Key << eval::to_string(m) << YAML::Value << YAML::BeginMap;
      emit_metrics(out, e.metrics[i]);
      out << YAML::Key << "folds" << YAML::Value << YAML::BeginSeq;
      for (const auto& f : e.folds[i]) {
        out << YAML::Flow << YAML::BeginMap;
        emit_metrics(out, f);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
    out << YAML::Key << "tuned_params" << YAML::Value << YAML::BeginSeq;
    for (const auto& hp : e.tuned_params) out << hp.to_string();
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "skipped" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : r.skipped) {
    out << YAML::BeginMap;
    out << YAML::Key << "participant_id" << YAML::Value << YAML::DoubleQuoted << s.participant_id;
    out << YAML::Key << "condition" << YAML::Value << s.condition;
    out << YAML::Key << "task" << YAML::Value << eval::to_string(s.task);
    out << YAML::Key << "reason" << YAML::Value << YAML::DoubleQuoted << s.reason;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  if (!out.good()) throw std::logic_error("yaml emitter: " + out.GetLastError());
  return std::string(out.c_str()) + "\n";
}

ResultsFile read_results_yaml(std::string_view content) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(content));
  } catch (const YAML::Exception& e) {
    throw MalformedRow(static_cast<std::size_t>(e.mark.line + 1), "results file: " + e.msg);
  }
  if (!doc.IsMap()) malformed("top level is not a mapping");
  if (get_string(doc, "format") != "emowalk-results") malformed("format is not emowalk-results");
  if (get_int(doc, "version") != kResultsFormatVersion)
    malformed("unsupported version " + get_string(doc, "version"));

  ResultsFile r;
  try {
    const auto seed = get_int(doc, "seed");
    if (seed < 0) malformed("negative seed");
    r.info.seed = static_cast<std::uint64_t>(seed);
    r.info.config_digest = get_string(doc, "config_digest");
    r.info.catalog_version = static_cast<int>(get_int(doc, "catalog_version"));

    if (const auto p = doc["protocol"]) {
      auto& pr = r.info.protocol;
      pr.k = static_cast<int>(get_int(p, "k"));
      pr.n_iter = static_cast<int>(get_int(p, "n_iter"));
      pr.fold_mode = tuning::parse_fold_mode(get_string(p, "fold_mode"));
      pr.default_forest = learners::parse_hyperparams(get_string(p, "default_forest"));
      YAML::Node lg;
      need(p, "logistic", lg);
      pr.logistic.reg_strength = get_double(lg, "reg_strength");
      pr.logistic.max_iters = static_cast<int>(get_int(lg, "max_iters"));
      pr.logistic.tol = get_double(lg, "tol");
      YAML::Node sp;
      need(p, "search_space", sp);
      std::string space;
      for (const auto& kv : sp) space += kv.first.Scalar() + " = " + kv.second.Scalar() + "\n";
      pr.space = tuning::parse_search_space(space);
    }
  } catch (const ConfigError& e) {
    malformed(std::string("protocol: ") + e.what());
  }

  YAML::Node evals;
  need(doc, "evaluations", evals);
  if (!evals.IsSequence() && !evals.IsNull()) malformed("'evaluations' is not a list");
  for (const auto& n : evals) {
    eval::UserEvaluation e;
    e.participant_id = get_string(n, "participant_id");
    e.condition = static_cast<int>(get_int(n, "condition"));
    try {
      e.task = eval::parse_task(get_string(n, "task"));
    } catch (const ConfigError& err) {
      malformed(err.what());
    }
    if (n["n_windows"]) e.n_windows = static_cast<std::size_t>(get_int(n, "n_windows"));
    YAML::Node models;
    need(n, "models", models);
    for (auto m : kAllModels) {
      const auto name = eval::to_string(m);
      const auto mn = models[name];
      if (!mn) malformed(e.participant_id + ": missing model '" + name + "'");
      const auto i = static_cast<std::size_t>(m);
      e.metrics[i] = read_metrics(mn);
      if (const auto folds = mn["folds"])
        for (const auto& f : folds) e.folds[i].push_back(read_metrics(f));
    }
    if (const auto tp = n["tuned_params"]) {
      for (const auto& s : tp) {
        try {
          e.tuned_params.push_back(learners::parse_hyperparams(s.Scalar()));
        } catch (const ConfigError& err) {
          malformed(e.participant_id + ": " + err.what());
        }
      }
    }
    r.evaluations.push_back(std::move(e));
  }

  if (const auto skipped = doc["skipped"]) {
    for (const auto& n : skipped) {
      eval::SkipRecord s;
      s.participant_id = get_string(n, "participant_id");
      s.condition = static_cast<int>(get_int(n, "condition"));
      try {
        s.task = eval::parse_task(get_string(n, "task"));
      } catch (const ConfigError& err) {
        malformed(err.what());
      }
      s.reason = get_string(n, "reason");
      r.skipped.push_back(std::move(s));
    }
  }
  return r;
}

std::string provenance_line(const RunInfo& info) {
  return "# seed=" + std::to_string(info.seed) + " config=" + info.config_digest;
}

std::string summary_csv(const eval::StudySummary& summary) {
  std::string out = "condition,model,auc_mean,auc_std,f1_mean,f1_std,acc_mean,acc_std,user_lift,p_value\n";
  for (const auto& row : summary.rows) {
    out += std::to_string(row.condition) + "," + eval::to_string(row.model) + "," + num(row.mean.auc) + "," +
           num(row.std.auc) + "," + num(row.mean.f1_weighted) + "," + num(row.std.f1_weighted) + "," +
           num(row.mean.accuracy) + "," + num(row.std.accuracy) + "," + lift_cell(row.user_lift) + "," +
           lift_cell(row.p_value) + "\n";
  }
  return out;
}

std::string boxplot_csv(std::span<const eval::UserEvaluation> evals, eval::Task task) {
  std::vector<const eval::UserEvaluation*> rows;
  for (const auto& e : evals)
    if (e.task == task) rows.push_back(&e);
  std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return std::tie(a->condition, a->participant_id) < std::tie(b->condition, b->participant_id);
  });
  std::string out = "condition,model,participant_id,accuracy\n";
  for (auto m : kAllModels)
    for (const auto* e : rows)
      out += std::to_string(e->condition) + "," + eval::to_string(m) + "," + e->participant_id + "," +
             num(e->of(m).accuracy) + "\n";
  return out;
}

std::string summary_text(const eval::StudySummary& summary) {
  char buf[256];
  std::string out = eval::to_string(summary.task) + " task\n";
  std::snprintf(buf, sizeof buf, "%-9s  %-40s  %-14s  %-14s  %-14s  %-9s  %s\n", "condition", "model", "AUC", "F1",
                "Accuracy", "User Lift", "P-value");
  out += buf;
  for (const auto& row : summary.rows) {
    const auto lift = row.user_lift ? text::fixed(*row.user_lift, 3) : std::string();
    const auto p = row.p_value ? eval::render_p(*row.p_value) : std::string();
    std::snprintf(buf, sizeof buf, "%-9d  %-40s  %-14s  %-14s  %-14s  %-9s  %s\n", row.condition,
                  eval::display_name(row.model).c_str(), eval::render_cell(row.mean.auc, row.std.auc).c_str(),
                  eval::render_cell(row.mean.f1_weighted, row.std.f1_weighted).c_str(),
                  eval::render_cell(row.mean.accuracy, row.std.accuracy).c_str(), lift.c_str(), p.c_str());
    out += buf;
  }
  out += "\nmean accuracy across conditions\n";
  for (auto m : kAllModels) {
    std::snprintf(buf, sizeof buf, "  %-40s  %s\n", eval::display_name(m).c_str(),
                  eval::render_percent(summary.cross_condition_accuracy[static_cast<std::size_t>(m)]).c_str());
    out += buf;
  }
  return out;
}

}  // namespace emowalk::results
