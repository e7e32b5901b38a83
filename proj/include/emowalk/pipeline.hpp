#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "emowalk/experiment.hpp"
#include "emowalk/features.hpp"
#include "emowalk/ingest.hpp"
#include "emowalk/synth.hpp"

// Glue between the file formats and the experiment: encoding + raw streams
// to walking data, walking data to per-user feature vectors.
namespace emowalk::pipeline {

struct IngestOptions {
  char delimiter = ',';
  bool strict = true;
  ingest::PrefixMap prefixes = ingest::default_prefix_map();
};

struct ParticipantWalks {
  ingest::EncodingRecord record;
  std::vector<ingest::WalkingSample> samples;
};

struct WalkingSet {
  std::vector<ParticipantWalks> participants;  // encoding-row order
  std::vector<std::string> warnings;
};

/// Pairs every encoding row with its one raw file in `raw_dir`.
WalkingSet load_walking(const std::filesystem::path& encoding, const std::filesystem::path& raw_dir,
                        const IngestOptions& opts, unsigned threads = 1);

/// Same, from in-memory contents (raw_csv[i] belongs to encoding row i).
WalkingSet walking_from_contents(std::string_view encoding_csv, const std::vector<std::string>& raw_csv,
                                 const IngestOptions& opts, unsigned threads = 1);

/// segment -> denoise -> extract, in window order.
std::vector<features::FeatureVector> featurize(std::span<const ingest::WalkingSample> samples,
                                               const features::WindowingConfig& cfg);

std::vector<eval::UserData> user_features(const WalkingSet& walking, const features::WindowingConfig& cfg,
                                          unsigned threads = 1);

/// Synthetic cohort straight to per-user features, through the file formats.
std::vector<eval::UserData> cohort_features(const synth::Cohort& cohort, const features::WindowingConfig& cfg,
                                            unsigned threads = 1);

/// File stem for a participant's per-condition output, e.g. "EW2_c0".
std::string output_stem(const std::string& participant_id, int condition);

/// Inverse of output_stem; nullopt when the stem does not end in "_c<digit>".
std::optional<std::pair<std::string, int>> parse_output_stem(std::string_view stem);

}  // namespace emowalk::pipeline
