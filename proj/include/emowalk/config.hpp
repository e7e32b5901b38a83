#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "emowalk/experiment.hpp"
#include "emowalk/features.hpp"
#include "emowalk/pipeline.hpp"
#include "emowalk/synth.hpp"

// Run configuration: INI-style sections of key = value lines.
//
//   [paths]      encoding, raw_dir, output_dir
//   [ingest]     delimiter (one character or "tab"), strict, prefix.<code> = <condition>
//   [windowing]  window_len, overlap, frequency_rate
//   [protocol]   task (binary|ternary|both), k, n_iter, seed, fold_mode, threads
//   [logistic]   reg_strength, max_iters, tol
//   [forest]     n_trees, max_depth, min_samples_split, min_samples_leaf, max_features, bootstrap
//   [search]     same keys as a search-space file
//   [synth]      n_users, conditions, walk_duration_s, sample_rate_hz, separability, seed
namespace emowalk::config {

enum class TaskSelection { Binary, Ternary, Both };

std::vector<eval::Task> tasks_of(TaskSelection t);

struct RunConfig {
  std::filesystem::path encoding;
  std::filesystem::path raw_dir;
  std::filesystem::path output_dir;
  pipeline::IngestOptions ingest;
  features::WindowingConfig windowing;
  eval::Protocol protocol;
  TaskSelection task = TaskSelection::Both;
  synth::SynthSpec synth;
};

/// Sets one value; InvalidConfig for unknown keys or unparsable values.
void set_value(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

/// "section.key=value", as given on the command line.
void apply_override(RunConfig& cfg, std::string_view assignment);

RunConfig parse_config(std::string_view content, RunConfig base = {});

/// Every setting that can change an artifact, one "section.key = value" per
/// line. Paths and thread count are left out.
std::string canonical(const RunConfig& cfg);

/// hex_digest(canonical(cfg))
std::string digest(const RunConfig& cfg);

}  // namespace emowalk::config
