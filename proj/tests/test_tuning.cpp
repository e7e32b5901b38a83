#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "emowalk/errors.hpp"
#include "emowalk/tuning.hpp"
#include "support.hpp"

using namespace emowalk;
using namespace emowalk::tuning;
using doctest::Approx;

namespace {

void check_partition(const std::vector<std::vector<std::size_t>>& folds, std::span<const int> y, int k) {
  REQUIRE(folds.size() == static_cast<std::size_t>(k));
  std::vector<std::size_t> all;
  for (const auto& f : folds) {
    CHECK(std::is_sorted(f.begin(), f.end()));
    all.insert(all.end(), f.begin(), f.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(y.size());
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(all == expect);
  for (int c : learners::classes_of(y)) {
    std::size_t lo = y.size(), hi = 0;
    for (const auto& f : folds) {
      const auto n = static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [&](std::size_t i) { return y[i] == c; }));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(hi - lo <= 1);
  }
  std::size_t lo = y.size(), hi = 0;
  for (const auto& f : folds) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  CHECK(hi - lo <= 1);
}

}  // namespace

TEST_CASE("stratified folds") {
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = i < 5 ? 1 : -1;
  auto folds = stratified_kfold(y, 5, 1);
  check_partition(folds, y, 5);
  for (const auto& f : folds) CHECK(f.size() == 2);

  std::vector<int> eight{1, 1, 1, 1, -1, -1, -1, -1};
  for (const auto& f : stratified_kfold(eight, 4, 9)) {
    REQUIRE(f.size() == 2);
    CHECK(eight[f[0]] != eight[f[1]]);
  }

  std::vector<int> small{1, 1, 1, 1, 1, -1};
  CHECK_THROWS_AS(stratified_kfold(small, 5, 1), TooFewPerClass);
  CHECK_THROWS_AS(stratified_kfold(y, 1, 1), InvalidConfig);
}

TEST_CASE("fold properties on random label vectors") {
  rng::Engine eng(44);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng::uniform_index(eng, 5));
    const int n_classes = 2 + static_cast<int>(rng::uniform_index(eng, 2));
    std::vector<int> y;
    for (int c = 0; c < n_classes; ++c) {
      const auto n = static_cast<std::size_t>(k) + rng::uniform_index(eng, 20);
      y.insert(y.end(), n, c - 1);
    }
    rng::shuffle(eng, std::span<int>(y));
    const auto mode = t % 2 ? FoldMode::Blocked : FoldMode::Shuffled;
    const auto folds = stratified_kfold(y, k, static_cast<std::uint64_t>(t), mode);
    check_partition(folds, y, k);
    CHECK(stratified_kfold(y, k, static_cast<std::uint64_t>(t), mode) == folds);
    for (std::size_t i = 0; i < folds.size(); ++i) {
      const auto train = training_indices(folds, i);
      std::vector<std::size_t> both;
      std::set_intersection(train.begin(), train.end(), folds[i].begin(), folds[i].end(), std::back_inserter(both));
      CHECK(both.empty());
      CHECK(train.size() + folds[i].size() == y.size());
    }
  }
}

TEST_CASE("blocked folds are contiguous per class") {
  std::vector<int> y(20, 1);
  std::fill(y.begin() + 10, y.end(), -1);
  const auto folds = stratified_kfold(y, 5, 0, FoldMode::Blocked);
  for (const auto& f : folds) {
    REQUIRE(f.size() == 4);
    CHECK(f[1] == f[0] + 1);
    CHECK(f[3] == f[2] + 1);
  }
}

TEST_CASE("sampled hyperparameters") {
  SearchSpace sp;
  const auto a = sample_hyperparams(sp, 20, 5);
  CHECK(a.size() == 20);
  CHECK(sample_hyperparams(sp, 20, 5) == a);
  for (const auto& hp : a) {
    CHECK(hp.n_trees >= 50);
    CHECK(hp.n_trees <= 500);
    if (hp.max_depth) CHECK((*hp.max_depth >= 5 && *hp.max_depth <= 30));
    CHECK((hp.min_samples_split >= 2 && hp.min_samples_split <= 20));
    CHECK((hp.min_samples_leaf >= 1 && hp.min_samples_leaf <= 10));
    CHECK(std::find(sp.max_features.begin(), sp.max_features.end(), hp.max_features) != sp.max_features.end());
    CHECK_NOTHROW(hp.validate());
  }

  SearchSpace one;
  one.n_trees = {10, 10};
  one.max_depth = {3, 3};
  one.allow_unlimited_depth = false;
  one.min_samples_split = {4, 4};
  one.min_samples_leaf = {2, 2};
  one.max_features = {MaxFeatures::log2()};
  one.bootstrap = {false};
  const auto same = sample_hyperparams(one, 7, 1);
  CHECK(same.size() == 7);
  for (const auto& hp : same) CHECK(hp == same.front());

  SearchSpace empty;
  empty.bootstrap.clear();
  CHECK_THROWS_AS(sample_hyperparams(empty, 3, 1), EmptySpace);
  empty = {};
  empty.n_trees = {5, 4};
  CHECK_THROWS_AS(sample_hyperparams(empty, 3, 1), EmptySpace);
  CHECK_THROWS_AS(sample_hyperparams(sp, 0, 1), InvalidConfig);
}

TEST_CASE("search space text") {
  const auto sp = parse_search_space("# comment\nn_trees = 10..20\nmax_depth = none\nmax_features = sqrt,0.5\nbootstrap = false\n");
  CHECK(sp.n_trees == IntRange{10, 20});
  CHECK(sp.allow_unlimited_depth);
  CHECK(sp.max_depth.lo > sp.max_depth.hi);
  CHECK(sp.max_features == std::vector<MaxFeatures>{MaxFeatures::sqrt(), MaxFeatures::of(0.5)});
  CHECK(sp.bootstrap == std::vector<bool>{false});
  CHECK(sp.min_samples_leaf == SearchSpace{}.min_samples_leaf);
  CHECK(parse_search_space(format_search_space(sp)) == sp);
  CHECK(parse_search_space(format_search_space(SearchSpace{})) == SearchSpace{});
  CHECK_THROWS_AS(parse_search_space("n_trees = 0..5\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_search_space("colour = red\n"), InvalidConfig);
  CHECK_THROWS_AS(parse_search_space("min_samples_split = 1..4\n"), InvalidConfig);
}

TEST_CASE("cross-validation score") {
  Dataset d;
  d.X = Matrix(0, 2);
  for (int i = 0; i < 30; ++i) {
    d.X.push_row(std::vector<double>{i < 15 ? -1.0 - i : 1.0 + i, 0.0});
    d.y.push_back(i < 15 ? -1 : 1);
  }
  HyperParams hp;
  hp.n_trees = 10;
  const auto r = cross_val_score(d, hp, 5, 3, 0);
  CHECK(r.fold_scores.size() == 5);
  CHECK(r.mean_score == 1.0);

  rng::Engine eng(3);
  const auto noisy = testing::random_dataset(eng, 40, 3, {-1, 1}, 0.3);
  const auto n = cross_val_score(noisy, hp, 4, 8, 2);
  double sum = 0.0;
  for (double s : n.fold_scores) sum += s;
  CHECK(n.mean_score == Approx(sum / 4));
  CHECK(n.mean_score >= *std::min_element(n.fold_scores.begin(), n.fold_scores.end()));
  CHECK(n.mean_score <= *std::max_element(n.fold_scores.begin(), n.fold_scores.end()));
  CHECK(n.sample_index == 2);
}

TEST_CASE("random search argmax, ties and determinism") {
  rng::Engine eng(19);
  const auto d = testing::random_dataset(eng, 40, 4, {-1, 1}, 0.8);
  SearchSpace sp;
  sp.n_trees = {5, 20};
  SearchOptions opts;
  opts.n_iter = 6;
  opts.k = 4;
  const auto r = random_search(d, sp, opts, 77);
  REQUIRE(r.all.size() == 6);
  for (std::size_t i = 0; i < r.all.size(); ++i) {
    CHECK(r.all[i].sample_index == i);
    CHECK(r.all[r.best_index].mean_score >= r.all[i].mean_score);
    if (r.all[i].mean_score == r.all[r.best_index].mean_score) CHECK(i >= r.best_index);
  }
  CHECK(r.best == r.all[r.best_index].params);

  opts.threads = 3;
  const auto again = random_search(d, sp, opts, 77);
  CHECK(again.best_index == r.best_index);
  for (std::size_t i = 0; i < r.all.size(); ++i) CHECK(again.all[i].fold_scores == r.all[i].fold_scores);

  opts.n_iter = 1;
  CHECK(random_search(d, sp, opts, 5).best_index == 0);

  SearchSpace flat;
  flat.n_trees = {3, 3};
  flat.max_depth = {1, 1};
  flat.allow_unlimited_depth = false;
  flat.min_samples_split = {2, 2};
  flat.min_samples_leaf = {1, 1};
  flat.max_features = {MaxFeatures::of(1.0)};
  flat.bootstrap = {false};
  opts.n_iter = 4;
  CHECK(random_search(d, flat, opts, 5).best_index == 0);
}

TEST_CASE("random search picks the dominating config") {
  // AND of two coordinates: one split reaches 0.75, two reach 1.
  Dataset d;
  d.X = Matrix(0, 2);
  for (int i = 0; i < 40; ++i) {
    const double a = i % 2, b = (i / 2) % 2;
    d.X.push_row(std::vector<double>{a, b});
    d.y.push_back(a > 0.5 && b > 0.5 ? 1 : -1);
  }
  SearchSpace sp;
  sp.n_trees = {1, 1};
  sp.max_depth = {1, 2};
  sp.allow_unlimited_depth = false;
  sp.min_samples_split = {2, 2};
  sp.min_samples_leaf = {1, 1};
  sp.max_features = {MaxFeatures::of(1.0)};
  sp.bootstrap = {false};
  SearchOptions opts;
  opts.n_iter = 8;
  opts.k = 4;
  const auto r = random_search(d, sp, opts, 12);
  REQUIRE(std::any_of(r.all.begin(), r.all.end(), [](const CVResult& c) { return *c.params.max_depth == 2; }));
  CHECK(*r.best.max_depth == 2);
  CHECK(r.all[r.best_index].mean_score == 1.0);
}
