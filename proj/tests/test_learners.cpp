#include <doctest.h>

#include <cmath>

#include "emowalk/baseline.hpp"
#include "emowalk/errors.hpp"
#include "emowalk/forest.hpp"
#include "emowalk/logistic.hpp"
#include "emowalk/model_io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace emowalk;
using namespace emowalk::learners;
using doctest::Approx;

namespace {

Dataset labels_only(std::vector<int> y) {
  Dataset d;
  d.X = Matrix(y.size(), 2, 0.0);
  d.y = std::move(y);
  return d;
}

void check_rows_sum_to_one(const Prediction& p) {
  for (std::size_t r = 0; r < p.proba.rows(); ++r) {
    double s = 0.0;
    for (double v : p.proba.row(r)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

}  // namespace

TEST_CASE("most frequent baseline") {
  auto m = fit_most_frequent(labels_only({1, 1, -1}));
  CHECK(m.majority_label == 1);
  CHECK(m.classes == std::vector<int>{-1, 1});
  CHECK(m.prior[0] == Approx(1.0 / 3));
  CHECK(m.prior[1] == Approx(2.0 / 3));

  CHECK(fit_most_frequent(labels_only({1, -1})).majority_label == -1);
  m = fit_most_frequent(labels_only({0, 0, 0}));
  CHECK(m.majority_label == 0);
  CHECK(m.prior == std::vector<double>{1.0});
  CHECK_THROWS_AS(fit_most_frequent(labels_only({})), EmptyDataset);

  m = fit_most_frequent(labels_only({1, 1, -1}));
  const auto p = predict_most_frequent(m, Matrix(5, 2, 3.0));
  CHECK(p.labels == std::vector<int>(5, 1));
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(p.proba(r, 0) == Approx(1.0 / 3));
    CHECK(p.proba(r, 1) == Approx(2.0 / 3));
  }
  CHECK(predict_most_frequent(m, Matrix(0, 2)).labels.empty());
  const auto q = predict_most_frequent(m, Matrix(5, 2, -7.0));
  CHECK(q.labels == p.labels);
  CHECK(q.proba == p.proba);
}

TEST_CASE("baseline accuracy identity") {
  rng::Engine eng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> train(1 + rng::uniform_index(eng, 30)), test(1 + rng::uniform_index(eng, 30));
    for (auto& v : train) v = static_cast<int>(rng::uniform_index(eng, 3)) - 1;
    for (auto& v : test) v = static_cast<int>(rng::uniform_index(eng, 3)) - 1;
    const auto m = fit_most_frequent(labels_only(train));
    const auto p = predict_most_frequent(m, Matrix(test.size(), 2));
    std::size_t hits = 0, freq = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      hits += p.labels[i] == test[i];
      freq += test[i] == m.majority_label;
    }
    CHECK(hits == freq);
  }
}

TEST_CASE("logistic fits separable 1-D data") {
  Dataset d;
  d.X = Matrix(0, 1);
  for (int i = 1; i <= 10; ++i) {
    d.X.push_row(std::vector<double>{-static_cast<double>(i)});
    d.y.push_back(-1);
    d.X.push_row(std::vector<double>{static_cast<double>(i)});
    d.y.push_back(1);
  }
  const auto m = fit_logistic(d);
  const auto p = predict_logistic(m, d.X);
  CHECK(p.labels == d.y);
  check_rows_sum_to_one(p);

  CHECK_THROWS_AS(fit_logistic(labels_only({1, 1, 1})), SingleClassDataset);
}

TEST_CASE("logistic hand-set weights") {
  LogisticModel m;
  m.classes = {-1, 1};
  m.feature_mean = {0.0};
  m.feature_scale = {1.0};
  m.weights = {{0.0}};
  m.intercepts = {std::log(3.0)};
  Matrix X(2, 1);
  X(1, 0) = 100.0;
  const auto p = predict_logistic(m, X);
  CHECK(p.proba(0, 1) == Approx(0.75).epsilon(1e-15));
  CHECK(p.proba(1, 1) == Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid(0.0) == 0.5);

  m.weights = {{0.7}};
  double last = 0.0;
  for (double x = -5; x <= 5; x += 0.25) {
    Matrix one(1, 1, x);
    const double v = predict_logistic(m, one).proba(0, 1);
    CHECK(v >= last);
    last = v;
  }
  CHECK_THROWS_AS(predict_logistic(m, Matrix(1, 3)), DimensionMismatch);
}

TEST_CASE("logistic gradient matches central differences") {
  rng::Engine eng(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 10, d = 5;
    Matrix X(n, d);
    std::vector<double> targets(n), w(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) X(i, j) = rng::normal(eng);
      targets[i] = static_cast<double>(rng::uniform_index(eng, 2));
    }
    for (auto& v : w) v = rng::normal(eng);
    const double b = rng::normal(eng);
    const double reg = rng::uniform01(eng) * 2;
    std::vector<double> gw;
    double gb = 0.0;
    logistic_objective(X, targets, w, b, reg, &gw, &gb);
    const double h = 1e-5;
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < d) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (logistic_objective(X, targets, wp, bp, reg) - logistic_objective(X, targets, wm, bm, reg)) / (2 * h);
      const double an = j < d ? gw[j] : gb;
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("probability rows of every family sum to one") {
  rng::Engine eng(12);
  for (auto labels : {std::vector<int>{-1, 1}, std::vector<int>{-1, 0, 1}}) {
    const auto train = testing::random_dataset(eng, 60, 6, labels);
    const auto test = testing::random_dataset(eng, 40, 6, labels);
    check_rows_sum_to_one(predict_most_frequent(fit_most_frequent(train), test.X));
    check_rows_sum_to_one(predict_logistic(fit_logistic(train), test.X));
    HyperParams hp;
    hp.n_trees = 15;
    check_rows_sum_to_one(predict_random_forest(fit_random_forest(train, hp, 1), test.X));
  }
}

TEST_CASE("gini") {
  CHECK(gini(std::vector<int>{1, 1, -1, -1}) == Approx(0.5));
  CHECK(gini(std::vector<int>{1, 1, 1, 1}) == 0.0);
  CHECK(gini(std::vector<int>{-1, 0, 1}) == Approx(2.0 / 3));
}

TEST_CASE("memorizing tree") {
  rng::Engine eng(2);
  const auto d = testing::random_dataset(eng, 50, 4, {-1, 0, 1}, 0.1);
  HyperParams hp;
  hp.n_trees = 1;
  hp.bootstrap = false;
  hp.max_features = MaxFeatures::of(1.0);
  const auto f = fit_random_forest(d, hp, 3);
  CHECK(predict_random_forest(f, d.X).labels == d.y);
}

TEST_CASE("forest determinism and structure bounds") {
  rng::Engine eng(6);
  const auto d = testing::coarse_dataset(eng, 80, 5, 3);
  for (int t = 0; t < 10; ++t) {
    HyperParams hp;
    hp.n_trees = 5;
    hp.max_depth = 1 + static_cast<int>(rng::uniform_index(eng, 5));
    hp.min_samples_leaf = 1 + static_cast<int>(rng::uniform_index(eng, 6));
    hp.min_samples_split = 2 + static_cast<int>(rng::uniform_index(eng, 10));
    hp.bootstrap = t % 2 == 0;
    const auto a = fit_random_forest(d, hp, 100 + t);
    const auto b = fit_random_forest(d, hp, 100 + t);
    CHECK(save_model(a) == save_model(b));
    CHECK(a.trees.size() == 5);
    for (const auto& tree : a.trees) {
      CHECK(tree.depth() <= *hp.max_depth);
      for (const auto& node : tree.nodes)
        if (node.feature < 0) CHECK(node.n_samples >= hp.min_samples_leaf);
    }
  }
  CHECK_THROWS_AS(fit_random_forest(labels_only({1, 1}), HyperParams{}, 1), SingleClassDataset);
  CHECK_THROWS_AS(fit_random_forest(labels_only({}), HyperParams{}, 1), EmptyDataset);
}

TEST_CASE("forest vote: mode of per-tree votes") {
  rng::Engine eng(77);
  for (int t = 0; t < 60; ++t) {
    const auto d = testing::coarse_dataset(eng, 30, 3, 2 + t % 2);
    HyperParams hp;
    hp.n_trees = 1 + static_cast<int>(rng::uniform_index(eng, 9));
    hp.max_depth = 1 + static_cast<int>(rng::uniform_index(eng, 3));
    const auto f = fit_random_forest(d, hp, static_cast<std::uint64_t>(t));
    const auto p = predict_random_forest(f, d.X);
    for (std::size_t r = 0; r < d.size(); ++r) {
      const auto votes = tree_votes(f, d.X.row(r));
      CHECK(p.labels[r] == testing::brute_mode(votes));
      for (std::size_t c = 0; c < p.classes.size(); ++c) {
        const auto k = std::count(votes.begin(), votes.end(), p.classes[c]);
        CHECK(p.proba(r, c) == Approx(static_cast<double>(k) / votes.size()));
      }
    }
  }
}

TEST_CASE("model text format round-trip") {
  rng::Engine eng(13);
  const auto d = testing::random_dataset(eng, 40, 4, {-1, 0, 1});
  HyperParams hp;
  hp.n_trees = 7;
  const std::vector<TrainedModel> models{fit_most_frequent(d), fit_logistic(d), fit_random_forest(d, hp, 5)};
  for (const auto& m : models) {
    const auto text = save_model(m);
    const auto back = load_model(text);
    CHECK(save_model(back) == text);
    const auto p0 = predict(m, d.X);
    const auto p1 = predict(back, d.X);
    CHECK(p0.labels == p1.labels);
    CHECK(p0.proba == p1.proba);
  }
  CHECK_THROWS(load_model("garbage"));
}

TEST_CASE("hyperparameter text") {
  HyperParams hp;
  hp.n_trees = 250;
  hp.max_depth = 12;
  hp.min_samples_split = 4;
  hp.min_samples_leaf = 3;
  hp.max_features = MaxFeatures::of(0.3);
  hp.bootstrap = false;
  CHECK(parse_hyperparams(hp.to_string()) == hp);
  CHECK(parse_hyperparams(default_forest_params().to_string()) == default_forest_params());
  CHECK(default_forest_params().n_trees == 100);
  CHECK_FALSE(default_forest_params().max_depth.has_value());
  hp.min_samples_split = 1;
  CHECK_THROWS_AS(hp.validate(), InvalidConfig);
  CHECK(MaxFeatures::sqrt().resolve(107) == 10);
  CHECK(MaxFeatures::log2().resolve(107) == 6);
  CHECK(MaxFeatures::of(0.001).resolve(107) == 1);
}
