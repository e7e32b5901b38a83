#include <doctest.h>

#include "emowalk/config.hpp"
#include "emowalk/errors.hpp"
#include "emowalk/results.hpp"
#include "emowalk/stages.hpp"
#include "emowalk/text.hpp"
#include "support.hpp"

using namespace emowalk;
using namespace emowalk::config;

TEST_CASE("config file sections and overrides") {
  const auto cfg = parse_config(R"(# run settings
[paths]
encoding = data/encoding.csv
raw_dir = data/raw

[ingest]
delimiter = tab
strict = false
prefix.MW = 2

[windowing]
window_len = 128   # samples
overlap = 0.25

[protocol]
task = ternary
k = 4
n_iter = 10
seed = 99
fold_mode = blocked
threads = 3

[logistic]
reg_strength = 0.5

[forest]
n_trees = 150
max_depth = 8
max_features = 0.5

[search]
n_trees = 20..40
max_depth = none

[synth]
n_users = 5
conditions = 0,2
separability = 0.5
)");
  CHECK(cfg.encoding == "data/encoding.csv");
  CHECK(cfg.ingest.delimiter == '\t');
  CHECK_FALSE(cfg.ingest.strict);
  CHECK(cfg.ingest.prefixes.at("MW") == 2);
  CHECK(cfg.windowing.window_len == 128);
  CHECK(parse_config("[ingest]\ndelimiter = ;\n").ingest.delimiter == ';');
  CHECK(cfg.windowing.overlap == 0.25);
  CHECK(cfg.task == TaskSelection::Ternary);
  CHECK(cfg.protocol.k == 4);
  CHECK(cfg.protocol.seed == 99);
  CHECK(cfg.protocol.fold_mode == tuning::FoldMode::Blocked);
  CHECK(cfg.protocol.threads == 3);
  CHECK(cfg.protocol.logistic.reg_strength == 0.5);
  CHECK(cfg.protocol.default_forest.n_trees == 150);
  CHECK(*cfg.protocol.default_forest.max_depth == 8);
  CHECK(cfg.protocol.space.n_trees == tuning::IntRange{20, 40});
  CHECK(cfg.protocol.space.allow_unlimited_depth);
  CHECK(cfg.protocol.space.min_samples_split == tuning::SearchSpace{}.min_samples_split);
  CHECK(cfg.synth.conditions == std::vector<int>{0, 2});

  auto over = cfg;
  apply_override(over, "protocol.k=6");
  apply_override(over, "search.bootstrap=true");
  CHECK(over.protocol.k == 6);
  CHECK(over.protocol.space.bootstrap == std::vector<bool>{true});
  CHECK(over.protocol.space.n_trees == tuning::IntRange{20, 40});
}

TEST_CASE("config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(parse_config("k = 5\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_config("[protocol]\nk = two\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_config("[protocol]\ncolour = red\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_config("[nowhere]\nk = 2\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_config("[protocol\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_config("[protocol]\njust text\n"), InvalidConfig);
  CHECK_THROWS_AS(apply_override(cfg, "protocol.k"), InvalidConfig);
  CHECK_THROWS_AS(apply_override(cfg, "k=3"), InvalidConfig);
  CHECK_THROWS_AS(apply_override(cfg, "ingest.delimiter=;;"), InvalidConfig);
  CHECK_THROWS_AS(apply_override(cfg, "forest.max_features=2"), InvalidConfig);
  try {
    parse_config("[protocol]\n\nk = x\n");
  } catch (const InvalidConfig& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("digest ignores paths and threads only") {
  RunConfig a;
  auto b = a;
  b.encoding = "elsewhere.csv";
  b.output_dir = "out";
  b.protocol.threads = 8;
  CHECK(digest(a) == digest(b));
  CHECK(digest(a).size() == 16);
  b.protocol.seed = 1;
  CHECK(digest(a) != digest(b));
  b = a;
  apply_override(b, "search.n_trees=50..60");
  CHECK(digest(a) != digest(b));
  b = a;
  apply_override(b, "windowing.overlap=0");
  CHECK(digest(a) != digest(b));
  CHECK(canonical(parse_config("[protocol]\nseed = 42\n")) == canonical(a));
}

TEST_CASE("results YAML round-trip") {
  results::ResultsFile r;
  r.info = stages::run_info(RunConfig{});
  eval::UserEvaluation e;
  e.participant_id = "EW:2 #x";
  e.condition = 1;
  e.task = eval::Task::Ternary;
  e.n_windows = 42;
  for (std::size_t m = 0; m < eval::kModelCount; ++m) {
    e.metrics[m] = {0.1 * m, 1.0 / 3, 2.0 / 7};
    e.folds[m] = {{0.5, 0.25, 0.125}, {1.0 / 9, 0.0, 1.0}};
  }
  e.tuned_params = {learners::default_forest_params()};
  r.evaluations.push_back(e);
  r.skipped.push_back({"EW9", 0, eval::Task::Binary, "TooFewPerClass: class -1 has 2 windows"});

  const auto text = results::write_results_yaml(r);
  const auto back = results::read_results_yaml(text);
  CHECK(results::write_results_yaml(back) == text);
  REQUIRE(back.evaluations.size() == 1);
  CHECK(back.evaluations[0].participant_id == e.participant_id);
  CHECK(back.evaluations[0].metrics[1].f1_weighted == e.metrics[1].f1_weighted);
  CHECK(back.evaluations[0].folds[2][1].auc == e.folds[2][1].auc);
  CHECK(back.evaluations[0].tuned_params == e.tuned_params);
  CHECK(back.skipped[0].reason == r.skipped[0].reason);
  CHECK(back.info.config_digest == r.info.config_digest);
  CHECK(back.info.protocol.space == r.info.protocol.space);

  CHECK_THROWS_AS(results::read_results_yaml("format: other\n"), DataError);
  CHECK_THROWS_AS(results::read_results_yaml("a: [\n"), DataError);
}

TEST_CASE("summary CSV columns and boxplot rows") {
  auto evals = testing::table_fixture(testing::kBinaryTable, eval::Task::Binary);
  const auto s = eval::summarize_study(evals);
  const auto csv = results::summary_csv(s.at(0));
  CHECK(csv.starts_with("condition,model,auc_mean,auc_std,f1_mean,f1_std,acc_mean,acc_std,user_lift,p_value\n"));
  text::LineReader reader(csv);
  std::string_view line;
  std::size_t rows = 0;
  while (reader.next(line))
    if (!line.empty()) {
      CHECK(text::split(line, ',').size() == 10);
      ++rows;
    }
  CHECK(rows == 13);

  const auto box = results::boxplot_csv(evals, eval::Task::Binary);
  CHECK(box.starts_with("condition,model,participant_id,accuracy\n"));
  CHECK(std::count(box.begin(), box.end(), '\n') == 1 + 4 * 6);
  CHECK(results::boxplot_csv(evals, eval::Task::Ternary) == "condition,model,participant_id,accuracy\n");

  const auto txt = results::summary_text(s.at(0));
  CHECK(txt.find("Random Forest with Hyperparameter Tuning") != std::string::npos);
  CHECK(txt.find("0.871 (0.014)") != std::string::npos);
}
