#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emowalk/dataset.hpp"

namespace emowalk::learners {

/// How many features a split looks at.
struct MaxFeatures {
  enum class Kind { Sqrt, Log2, Fraction };
  Kind kind = Kind::Sqrt;
  double fraction = 1.0;  // used when kind == Fraction, in (0, 1]

  static MaxFeatures sqrt() { return {Kind::Sqrt, 1.0}; }
  static MaxFeatures log2() { return {Kind::Log2, 1.0}; }
  static MaxFeatures of(double f) { return {Kind::Fraction, f}; }

  /// Feature count for d input features, at least 1.
  std::size_t resolve(std::size_t d) const;
  std::string to_string() const;
  static MaxFeatures parse(std::string_view s);

  friend bool operator==(const MaxFeatures&, const MaxFeatures&) = default;
};

struct HyperParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // nullopt = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  MaxFeatures max_features = MaxFeatures::sqrt();
  bool bootstrap = true;

  /// Throws InvalidConfig when a bound is violated.
  void validate() const;
  std::string to_string() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// The untuned comparator: 100 trees, unlimited depth, split 2, leaf 1, sqrt, bootstrap.
HyperParams default_forest_params();

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // rows with x[feature] <= threshold
  int right = -1;
  int label = 0;   // leaf label (class label, not index)
  int n_samples = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(std::span<const double> x) const;
  int depth() const;  // edges on the longest root-to-leaf path
};

struct ForestModel {
  std::vector<int> classes;
  std::size_t n_features = 0;
  HyperParams hp;
  std::uint64_t seed = 0;
  std::vector<DecisionTree> trees;
};

/// Gini impurity 1 - sum_c p_c^2 of a label multiset.
double gini(std::span<const int> labels);

/// CART tree on the rows `sample` (duplicates allowed). Randomness comes only
/// from `seed`.
DecisionTree fit_tree(const Dataset& train, std::span<const std::size_t> sample, const HyperParams& hp,
                      std::uint64_t seed);

/// Tree i is trained from seed derive(seed, i), so the result does not depend
/// on training order.
ForestModel fit_random_forest(const Dataset& train, const HyperParams& hp, std::uint64_t seed);

/// Per-tree votes for one row, in tree order.
std::vector<int> tree_votes(const ForestModel& model, std::span<const double> x);

/// Majority vote per row (ties: smallest label); proba = vote fractions.
Prediction predict_random_forest(const ForestModel& model, const Matrix& X);

}  // namespace emowalk::learners
