#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "emowalk/config.hpp"
#include "emowalk/results.hpp"

// The CLI stages. Each returns its artifacts in memory; nothing touches the
// output directory until commit().
namespace emowalk::stages {

struct Artifact {
  std::filesystem::path relative;
  std::string content;
};
using Artifacts = std::vector<Artifact>;

/// Writes every artifact under `out_dir` (temp file + rename per file).
void commit(const std::filesystem::path& out_dir, const Artifacts& artifacts);

results::RunInfo run_info(const config::RunConfig& cfg);

/// Encoding + raw dir -> walking/<participant>_c<condition>.csv.
Artifacts walkgen(const config::RunConfig& cfg, std::vector<std::string>& warnings);

/// Walking CSVs in `walking_dir` -> features/<stem>.csv.
Artifacts featex(const config::RunConfig& cfg, const std::filesystem::path& walking_dir);

/// Feature CSVs in `features_dir`, one user-condition per file.
std::vector<eval::UserData> load_features(const config::RunConfig& cfg, const std::filesystem::path& features_dir);

/// Personal-model experiment for every selected task -> results.yaml.
results::ResultsFile evaluate(const config::RunConfig& cfg, std::span<const eval::UserData> users);
Artifacts evaluate_artifacts(const results::ResultsFile& results);

/// Summary and boxplot exports for every task in the results file.
Artifacts report(const results::ResultsFile& results);

/// Random search on a single feature file, every candidate with its fold
/// scores -> tune_<stem>_<task>.yaml. The search seed is
/// derive(user_seed(seed, participant, condition), {2}).
Artifacts tune(const config::RunConfig& cfg, const std::filesystem::path& feature_file, eval::Task task);

/// encoding.csv, raw/<participant>.csv and manifest.txt.
Artifacts synth(const config::RunConfig& cfg);

/// walkgen -> featex -> evaluate -> report, each stage reading the previous
/// stage's files under cfg.output_dir.
void run_all(const config::RunConfig& cfg, std::vector<std::string>& warnings);

}  // namespace emowalk::stages
