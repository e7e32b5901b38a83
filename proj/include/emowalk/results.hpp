#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emowalk/experiment.hpp"

// Results file (YAML) and the summary/boxplot exports derived from it.
namespace emowalk::results {

inline constexpr int kResultsFormatVersion = 1;

struct RunInfo {
  std::uint64_t seed = 0;
  std::string config_digest;
  int catalog_version = 0;
  eval::Protocol protocol;  // threads is not recorded
};

struct ResultsFile {
  RunInfo info;
  std::vector<eval::UserEvaluation> evaluations;
  std::vector<eval::SkipRecord> skipped;
};

std::string write_results_yaml(const ResultsFile& results);

/// DataError when the document is not a results file of a known version.
ResultsFile read_results_yaml(std::string_view content);

/// "# seed=42 config=0123456789abcdef"
std::string provenance_line(const RunInfo& info);

/// condition,model,auc_mean,auc_std,f1_mean,f1_std,acc_mean,acc_std,user_lift,p_value
std::string summary_csv(const eval::StudySummary& summary);

/// condition,model,participant_id,accuracy; one row per user and model.
std::string boxplot_csv(std::span<const eval::UserEvaluation> evals, eval::Task task);

/// Table-style rendering: "0.871 (0.073)" cells, lift and p to three decimals,
/// then the cross-condition mean accuracy of every model.
std::string summary_text(const eval::StudySummary& summary);

}  // namespace emowalk::results
