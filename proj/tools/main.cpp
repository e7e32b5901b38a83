#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emowalk/errors.hpp"
#include "emowalk/stages.hpp"
#include "emowalk/text.hpp"

namespace fs = std::filesystem;
using namespace emowalk;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  int threads = -1;
  long long seed = -1;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--config", c.config_file, "Configuration file ([section] key = value)")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "Override one setting, section.key=value (repeatable)");
  app->add_option("--threads", c.threads, "Worker threads, 0 = all cores")->check(CLI::Range(0, 1024));
  app->add_option("--seed", c.seed, "Run seed (protocol.seed and synth.seed)")->check(CLI::NonNegativeNumber);
  if (with_out) app->add_option("-o,--out", c.out, "Output directory (paths.output_dir)");
}

config::RunConfig load(const Common& c) {
  config::RunConfig cfg;
  if (!c.config_file.empty()) cfg = config::parse_config(text::read_file(c.config_file));
  for (const auto& o : c.overrides) config::apply_override(cfg, o);
  if (c.threads >= 0) cfg.protocol.threads = static_cast<unsigned>(c.threads);
  if (c.seed >= 0) {
    cfg.protocol.seed = static_cast<std::uint64_t>(c.seed);
    cfg.synth.seed = static_cast<std::uint64_t>(c.seed);
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

fs::path need_out(const config::RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw InvalidConfig("no output directory: pass --out or set paths.output_dir");
  return cfg.output_dir;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion recognition from wearable walking data: ingest, features, personal models, evaluation."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common c;
  std::string encoding, raw_dir, walking_dir, features_dir, results_file, feature_file, task_name = "binary";

  auto* walkgen = app.add_subcommand("walkgen", "Encoding file + raw streams -> walking/<participant>_c<condition>.csv");
  add_common(walkgen, c);
  walkgen->add_option("--encoding", encoding, "Encoding file (paths.encoding)");
  walkgen->add_option("--raw-dir", raw_dir, "Directory of raw participant files (paths.raw_dir)");

  auto* featex = app.add_subcommand("featex", "Walking CSVs -> features/<stem>.csv, one row per window");
  add_common(featex, c);
  featex->add_option("--walking-dir", walking_dir, "Directory written by walkgen")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Feature CSVs -> results.yaml (personal models per user)");
  add_common(evaluate, c);
  evaluate->add_option("--features-dir", features_dir, "Directory written by featex")->required();

  auto* tune = app.add_subcommand("tune", "Random-search audit on one feature file -> tune_<stem>_<task>.yaml");
  add_common(tune, c);
  tune->add_option("--features", feature_file, "One feature CSV named <participant>_c<condition>.csv")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--task", task_name, "binary or ternary")->check(CLI::IsMember({"binary", "ternary"}));

  auto* synth = app.add_subcommand("synth", "Synthetic cohort -> encoding.csv, raw/, manifest.txt");
  add_common(synth, c);

  auto* report = app.add_subcommand("report", "results.yaml -> summary_<task>.csv/.txt, boxplot_<task>.csv");
  add_common(report, c);
  report->add_option("--results", results_file, "Results file written by evaluate")->required();

  auto* run_all = app.add_subcommand("run-all", "walkgen, featex, evaluate and report in one go");
  add_common(run_all, c);
  run_all->add_option("--encoding", encoding, "Encoding file (paths.encoding)");
  run_all->add_option("--raw-dir", raw_dir, "Directory of raw participant files (paths.raw_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    auto cfg = load(c);
    if (!encoding.empty()) cfg.encoding = encoding;
    if (!raw_dir.empty()) cfg.raw_dir = raw_dir;
    std::vector<std::string> warnings;

    if (walkgen->parsed()) {
      if (cfg.encoding.empty() || cfg.raw_dir.empty()) throw InvalidConfig("walkgen needs --encoding and --raw-dir");
      const auto out = need_out(cfg);
      const auto artifacts = stages::walkgen(cfg, warnings);
      print_warnings(warnings);
      stages::commit(out, artifacts);
    } else if (featex->parsed()) {
      stages::commit(need_out(cfg), stages::featex(cfg, walking_dir));
    } else if (evaluate->parsed()) {
      const auto out = need_out(cfg);
      const auto results = stages::evaluate(cfg, stages::load_features(cfg, features_dir));
      for (const auto& s : results.skipped)
        std::cerr << "skipped " << s.participant_id << " condition " << s.condition << " "
                  << eval::to_string(s.task) << ": " << s.reason << "\n";
      stages::commit(out, stages::evaluate_artifacts(results));
    } else if (tune->parsed()) {
      stages::commit(need_out(cfg), stages::tune(cfg, feature_file, eval::parse_task(task_name)));
    } else if (synth->parsed()) {
      stages::commit(need_out(cfg), stages::synth(cfg));
    } else if (report->parsed()) {
      const auto out = need_out(cfg);
      stages::commit(out, stages::report(results::read_results_yaml(text::read_file(results_file))));
    } else if (run_all->parsed()) {
      if (cfg.encoding.empty() || cfg.raw_dir.empty()) throw InvalidConfig("run-all needs --encoding and --raw-dir");
      need_out(cfg);
      stages::run_all(cfg, warnings);
      print_warnings(warnings);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
