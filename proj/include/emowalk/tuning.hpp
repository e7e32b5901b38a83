#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emowalk/dataset.hpp"
#include "emowalk/forest.hpp"

// Randomized hyperparameter search with stratified k-fold cross-validation.
namespace emowalk::tuning {

using learners::Dataset;
using learners::HyperParams;
using learners::MaxFeatures;

struct IntRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Every field is drawn uniformly and independently. max_depth draws from
/// {unlimited (if allowed)} plus the integers in max_depth.
struct SearchSpace {
  IntRange n_trees{50, 500};
  IntRange max_depth{5, 30};
  bool allow_unlimited_depth = true;
  IntRange min_samples_split{2, 20};
  IntRange min_samples_leaf{1, 10};
  std::vector<MaxFeatures> max_features{MaxFeatures::sqrt(), MaxFeatures::log2(), MaxFeatures::of(0.3),
                                        MaxFeatures::of(0.5),  MaxFeatures::of(0.7),  MaxFeatures::of(1.0)};
  std::vector<bool> bootstrap{true, false};

  /// EmptySpace for an empty range or choice set, InvalidConfig when a
  /// reachable point would violate HyperParams bounds.
  void validate() const;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

/// Key-value text, one field per line, e.g.
///   n_trees = 50..500
///   max_depth = none,5..30
///   max_features = sqrt,log2,0.5
///   bootstrap = true,false
/// Keys not mentioned keep their defaults. Lines starting with '#' are ignored.
SearchSpace parse_search_space(std::string_view content);
std::string format_search_space(const SearchSpace& space);

std::vector<HyperParams> sample_hyperparams(const SearchSpace& space, int n_iter, std::uint64_t seed);

enum class FoldMode {
  Shuffled,  // per class, indices shuffled by seed before dealing
  Blocked    // per class, contiguous runs in index order
};

std::string to_string(FoldMode m);
FoldMode parse_fold_mode(std::string_view s);

/// k disjoint folds covering every index. Each class is dealt round-robin, the
/// deal continuing across classes, so per-class and total fold sizes differ
/// by at most one. Indices inside a fold are ascending.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> y, int k, std::uint64_t seed,
                                                       FoldMode mode = FoldMode::Shuffled);

/// Indices not in folds[i], ascending.
std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t i);

struct CVResult {
  HyperParams params;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  std::size_t sample_index = 0;
};

/// Fold i trains with seed derive(seed, {sample_index, i}) and scores accuracy.
CVResult cross_val_score(const Dataset& data, const HyperParams& params, int k, std::uint64_t seed,
                         std::size_t sample_index = 0, FoldMode mode = FoldMode::Shuffled);

struct SearchResult {
  HyperParams best;
  std::size_t best_index = 0;
  std::vector<CVResult> all;  // in sampling order
};

struct SearchOptions {
  int n_iter = 50;
  int k = 5;
  FoldMode fold_mode = FoldMode::Shuffled;
  unsigned threads = 1;
};

/// Highest mean CV accuracy wins; ties go to the earliest sample.
SearchResult random_search(const Dataset& data, const SearchSpace& space, const SearchOptions& opts,
                           std::uint64_t seed);

}  // namespace emowalk::tuning
