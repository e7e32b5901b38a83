#include "emowalk/dataset.hpp"

#include <algorithm>

#include "emowalk/errors.hpp"

namespace emowalk::learners {

void Dataset::validate() const {
  if (X.rows() != y.size())
    throw DimensionMismatch("dataset has " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) +
                            " labels");
}

Dataset make_dataset(std::span<const features::FeatureVector> rows) {
  Dataset d;
  d.X = Matrix(0, features::kFeatureCount);
  d.y.reserve(rows.size());
  for (const auto& r : rows) {
    d.X.push_row(r.values);
    d.y.push_back(r.emotion);
  }
  return d;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset d;
  d.X = Matrix(0, data.X.cols());
  d.y.reserve(indices.size());
  for (std::size_t i : indices) {
    d.X.push_row(data.X.row(i));
    d.y.push_back(data.y[i]);
  }
  return d;
}

std::vector<int> classes_of(std::span<const int> y) {
  std::vector<int> c(y.begin(), y.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

std::size_t Prediction::column_of(int label) const noexcept {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return classes.size();
  return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace emowalk::learners
