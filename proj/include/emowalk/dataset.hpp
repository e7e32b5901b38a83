#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emowalk/features.hpp"
#include "emowalk/matrix.hpp"

namespace emowalk::learners {

struct Dataset {
  Matrix X;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  /// Throws DimensionMismatch when X and y disagree.
  void validate() const;
};

Dataset make_dataset(std::span<const features::FeatureVector> rows);

/// Rows at `indices`, in that order.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

/// Sorted distinct labels.
std::vector<int> classes_of(std::span<const int> y);

/// Output of every model family. `proba` columns follow `classes` (ascending).
struct Prediction {
  std::vector<int> classes;
  std::vector<int> labels;
  Matrix proba;

  /// Probability column of `label`, or classes.size() when absent.
  std::size_t column_of(int label) const noexcept;
};

}  // namespace emowalk::learners
