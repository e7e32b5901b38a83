#include "emowalk/pipeline.hpp"

#include <functional>

#include "emowalk/errors.hpp"
#include "emowalk/parallel.hpp"
#include "emowalk/text.hpp"

namespace emowalk::pipeline {

namespace {

ParticipantWalks slice(const ingest::EncodingRecord& rec, std::string_view raw_csv, const std::string& source,
                       const IngestOptions& opts, std::vector<std::string>& warnings) {
  ingest::RawParseOptions ro;
  ro.delimiter = opts.delimiter;
  ro.strict = opts.strict;
  ingest::RawStream raw;
  try {
    raw = ingest::parse_raw_stream(raw_csv, ro);
  } catch (const MalformedRow& e) {
    throw MalformedRow(e.line(), source + ": " + e.what());
  }
  for (auto& w : raw.warnings) warnings.push_back(source + ": " + w);
  auto walking = ingest::build_walking_data(raw.samples, rec);
  for (auto& w : walking.warnings) warnings.push_back(rec.participant_id + ": " + w);
  return {rec, std::move(walking.samples)};
}

WalkingSet assemble(const std::vector<ingest::EncodingRecord>& records, const IngestOptions& opts, unsigned threads,
                    const std::function<std::pair<std::string, std::string>(std::size_t)>& source_of) {
  std::vector<ParticipantWalks> out(records.size());
  std::vector<std::vector<std::string>> warn(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto [name, content] = source_of(i);
    out[i] = slice(records[i], content, name, opts, warn[i]);
  });
  WalkingSet set;
  set.participants = std::move(out);
  for (auto& w : warn) set.warnings.insert(set.warnings.end(), w.begin(), w.end());
  return set;
}

}  // namespace

WalkingSet load_walking(const std::filesystem::path& encoding, const std::filesystem::path& raw_dir,
                        const IngestOptions& opts, unsigned threads) {
  const std::string content = text::read_file(encoding);
  std::vector<ingest::EncodingRecord> records;
  try {
    records = ingest::parse_encoding(content, opts.delimiter, opts.prefixes);
  } catch (const MalformedRow& e) {
    throw MalformedRow(e.line(), encoding.string() + ": " + e.what());
  }
  if (!std::filesystem::is_directory(raw_dir)) throw DataError("raw directory not found: " + raw_dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& rec : records) {
    const auto found = ingest::find_participant_files(raw_dir, rec.participant_id);
    if (found.empty()) throw DataError("no raw file for participant " + rec.participant_id + " in " + raw_dir.string());
    if (found.size() > 1)
      throw DataError("several raw files match participant " + rec.participant_id + ": " + found[0].string() +
                      ", " + found[1].string());
    files.push_back(found.front());
  }
  return assemble(records, opts, threads, [&](std::size_t i) {
    return std::pair{files[i].string(), text::read_file(files[i])};
  });
}

WalkingSet walking_from_contents(std::string_view encoding_csv, const std::vector<std::string>& raw_csv,
                                 const IngestOptions& opts, unsigned threads) {
  const auto records = ingest::parse_encoding(encoding_csv, opts.delimiter, opts.prefixes);
  if (records.size() != raw_csv.size())
    throw LengthMismatch("encoding has " + std::to_string(records.size()) + " rows but " +
                         std::to_string(raw_csv.size()) + " raw streams were given");
  return assemble(records, opts, threads, [&](std::size_t i) {
    return std::pair{records[i].participant_id, raw_csv[i]};
  });
}

std::vector<features::FeatureVector> featurize(std::span<const ingest::WalkingSample> samples,
                                               const features::WindowingConfig& cfg) {
  std::vector<features::FeatureVector> out;
  for (auto& w : features::segment_windows(samples, cfg))
    out.push_back(features::extract_features(features::denoise_accel(std::move(w))));
  return out;
}

std::vector<eval::UserData> user_features(const WalkingSet& walking, const features::WindowingConfig& cfg,
                                          unsigned threads) {
  cfg.validate();
  std::vector<eval::UserData> out(walking.participants.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto& p = walking.participants[i];
    out[i] = {p.record.participant_id, p.record.decoding.condition, featurize(p.samples, cfg)};
  });
  return out;
}

std::vector<eval::UserData> cohort_features(const synth::Cohort& cohort, const features::WindowingConfig& cfg,
                                            unsigned threads) {
  std::vector<std::string> raw;
  for (const auto& p : cohort.participants) raw.push_back(p.raw_csv);
  return user_features(walking_from_contents(cohort.encoding_csv, raw, {}, threads), cfg, threads);
}

std::string output_stem(const std::string& participant_id, int condition) {
  return participant_id + "_c" + std::to_string(condition);
}

std::optional<std::pair<std::string, int>> parse_output_stem(std::string_view stem) {
  const auto at = stem.rfind("_c");
  if (at == std::string_view::npos || at == 0 || at + 3 != stem.size()) return std::nullopt;
  const char c = stem.back();
  if (c < '0' || c > '2') return std::nullopt;
  return std::pair{std::string(stem.substr(0, at)), c - '0'};
}

}  // namespace emowalk::pipeline
