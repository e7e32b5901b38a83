#include "emowalk/stages.hpp"

#include <algorithm>

#include <yaml-cpp/yaml.h>

#include "emowalk/errors.hpp"
#include "emowalk/parallel.hpp"
#include "emowalk/pipeline.hpp"
#include "emowalk/rng.hpp"
#include "emowalk/text.hpp"

namespace emowalk::stages {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> csv_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw EmptyInput("no .csv files in " + dir.string());
  return out;
}

std::pair<std::string, int> stem_of(const fs::path& file) {
  const auto parsed = pipeline::parse_output_stem(file.stem().string());
  if (!parsed) throw DataError(file.string() + ": file name must look like <participant>_c<condition>.csv");
  return *parsed;
}

template <typename Fn>
auto with_file(const fs::path& file, Fn&& fn) {
  try {
    return fn(text::read_file(file));
  } catch (const MalformedRow& e) {
    throw MalformedRow(e.line(), file.string() + ": " + e.what());
  }
}

std::string stamp(const config::RunConfig& cfg, std::string body) {
  return results::provenance_line(run_info(cfg)) + "\n" + body;
}

unsigned threads_of(const config::RunConfig& cfg) {
  return cfg.protocol.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.protocol.threads;
}

}  // namespace

void commit(const fs::path& out_dir, const Artifacts& artifacts) {
  for (const auto& a : artifacts) {
    const auto path = out_dir / a.relative;
    fs::create_directories(path.parent_path());
    text::write_file_atomic(path, a.content);
  }
}

results::RunInfo run_info(const config::RunConfig& cfg) {
  results::RunInfo info;
  info.seed = cfg.protocol.seed;
  info.config_digest = config::digest(cfg);
  info.catalog_version = features::kCatalogVersion;
  info.protocol = cfg.protocol;
  return info;
}

Artifacts walkgen(const config::RunConfig& cfg, std::vector<std::string>& warnings) {
  const auto set = pipeline::load_walking(cfg.encoding, cfg.raw_dir, cfg.ingest, threads_of(cfg));
  warnings.insert(warnings.end(), set.warnings.begin(), set.warnings.end());
  Artifacts out;
  for (const auto& p : set.participants) {
    const auto stem = pipeline::output_stem(p.record.participant_id, p.record.decoding.condition);
    if (std::any_of(out.begin(), out.end(), [&](const Artifact& a) { return a.relative.stem() == stem; }))
      throw DataError("encoding lists participant " + p.record.participant_id + " twice for condition " +
                      std::to_string(p.record.decoding.condition));
    out.push_back({fs::path("walking") / (stem + ".csv"),
                   stamp(cfg, ingest::write_walking_csv(p.samples, cfg.ingest.delimiter))});
  }
  return out;
}

Artifacts featex(const config::RunConfig& cfg, const fs::path& walking_dir) {
  cfg.windowing.validate();
  const auto files = csv_files(walking_dir);
  Artifacts out(files.size());
  parallel_for(files.size(), threads_of(cfg), [&](std::size_t i) {
    stem_of(files[i]);
    const auto samples =
        with_file(files[i], [&](const std::string& c) { return ingest::read_walking_csv(c, cfg.ingest.delimiter); });
    const auto rows = pipeline::featurize(samples, cfg.windowing);
    out[i] = {fs::path("features") / files[i].filename(),
              stamp(cfg, features::write_feature_csv(rows, cfg.ingest.delimiter))};
  });
  return out;
}

std::vector<eval::UserData> load_features(const config::RunConfig& cfg, const fs::path& features_dir) {
  const auto files = csv_files(features_dir);
  std::vector<eval::UserData> users(files.size());
  parallel_for(files.size(), threads_of(cfg), [&](std::size_t i) {
    const auto [pid, condition] = stem_of(files[i]);
    users[i].participant_id = pid;
    users[i].condition = condition;
    users[i].windows =
        with_file(files[i], [&](const std::string& c) { return features::read_feature_csv(c, cfg.ingest.delimiter); });
    for (const auto& w : users[i].windows)
      if (w.condition != condition)
        throw DataError(files[i].string() + ": rows carry condition " + std::to_string(w.condition) +
                        " but the file name says " + std::to_string(condition));
  });
  return users;
}

results::ResultsFile evaluate(const config::RunConfig& cfg, std::span<const eval::UserData> users) {
  results::ResultsFile r;
  r.info = run_info(cfg);
  auto protocol = cfg.protocol;
  protocol.threads = threads_of(cfg);
  for (auto task : config::tasks_of(cfg.task)) {
    auto res = eval::run_personal_experiment(users, task, protocol);
    std::move(res.evaluations.begin(), res.evaluations.end(), std::back_inserter(r.evaluations));
    std::move(res.skipped.begin(), res.skipped.end(), std::back_inserter(r.skipped));
  }
  return r;
}

Artifacts evaluate_artifacts(const results::ResultsFile& results) {
  return {{"results.yaml", results::write_results_yaml(results)}};
}

Artifacts report(const results::ResultsFile& results) {
  Artifacts out;
  const auto head = results::provenance_line(results.info) + "\n";
  for (const auto& summary : eval::summarize_study(results.evaluations)) {
    const auto task = eval::to_string(summary.task);
    out.push_back({"summary_" + task + ".csv", head + results::summary_csv(summary)});
    out.push_back({"boxplot_" + task + ".csv", head + results::boxplot_csv(results.evaluations, summary.task)});
    out.push_back({"summary_" + task + ".txt", head + results::summary_text(summary)});
  }
  return out;
}

Artifacts tune(const config::RunConfig& cfg, const fs::path& feature_file, eval::Task task) {
  const auto [pid, condition] = stem_of(feature_file);
  const auto windows = with_file(
      feature_file, [&](const std::string& c) { return features::read_feature_csv(c, cfg.ingest.delimiter); });
  const auto data = learners::make_dataset(eval::select_task(windows, task));
  const auto seed = rng::derive(eval::user_seed(cfg.protocol.seed, pid, condition), {2});
  tuning::SearchOptions opts;
  opts.n_iter = cfg.protocol.n_iter;
  opts.k = cfg.protocol.k;
  opts.fold_mode = cfg.protocol.fold_mode;
  opts.threads = threads_of(cfg);
  const auto search = tuning::random_search(data, cfg.protocol.space, opts, seed);

  YAML::Emitter y;
  y << YAML::BeginMap;
  y << YAML::Key << "format" << YAML::Value << "emowalk-tune";
  y << YAML::Key << "version" << YAML::Value << 1;
  y << YAML::Key << "seed" << YAML::Value << cfg.protocol.seed;
  y << YAML::Key << "config_digest" << YAML::Value << YAML::DoubleQuoted << config::digest(cfg);
  y << YAML::Key << "search_seed" << YAML::Value << seed;
  y << YAML::Key << "participant_id" << YAML::Value << YAML::DoubleQuoted << pid;
  y << YAML::Key << "condition" << YAML::Value << condition;
  y << YAML::Key << "task" << YAML::Value << eval::to_string(task);
  y << YAML::Key << "n_windows" << YAML::Value << data.y.size();
  y << YAML::Key << "k" << YAML::Value << opts.k;
  y << YAML::Key << "n_iter" << YAML::Value << opts.n_iter;
  y << YAML::Key << "fold_mode" << YAML::Value << tuning::to_string(opts.fold_mode);
  y << YAML::Key << "best_index" << YAML::Value << search.best_index;
  y << YAML::Key << "best" << YAML::Value << search.best.to_string();
  y << YAML::Key << "candidates" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : search.all) {
    y << YAML::BeginMap;
    y << YAML::Key << "index" << YAML::Value << c.sample_index;
    y << YAML::Key << "params" << YAML::Value << c.params.to_string();
    y << YAML::Key << "mean_accuracy" << YAML::Value << text::format_double(c.mean_score);
    y << YAML::Key << "fold_accuracy" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double s : c.fold_scores) y << text::format_double(s);
    y << YAML::EndSeq;
    y << YAML::EndMap;
  }
  y << YAML::EndSeq;
  y << YAML::EndMap;
  return {{"tune_" + feature_file.stem().string() + "_" + eval::to_string(task) + ".yaml",
           std::string(y.c_str()) + "\n"}};
}

Artifacts synth(const config::RunConfig& cfg) {
  auto spec = cfg.synth;
  spec.window_len = cfg.windowing.window_len;
  const auto cohort = synth::generate_cohort(spec);
  Artifacts out;
  std::string manifest = "# seed=" + std::to_string(spec.seed) + " config=" + config::digest(cfg) + "\n";
  out.push_back({"encoding.csv", cohort.encoding_csv});
  manifest += "encoding.csv\n";
  for (const auto& p : cohort.participants) {
    const auto rel = fs::path("raw") / (p.participant_id + ".csv");
    out.push_back({rel, p.raw_csv});
    manifest += rel.generic_string() + "\n";
  }
  out.push_back({"manifest.txt", manifest});
  return out;
}

void run_all(const config::RunConfig& cfg, std::vector<std::string>& warnings) {
  const auto& dir = cfg.output_dir;
  commit(dir, walkgen(cfg, warnings));
  commit(dir, featex(cfg, dir / "walking"));
  const auto users = load_features(cfg, dir / "features");
  commit(dir, evaluate_artifacts(evaluate(cfg, users)));
  commit(dir, report(results::read_results_yaml(text::read_file(dir / "results.yaml"))));
}

}  // namespace emowalk::stages
