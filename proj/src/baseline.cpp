#include "emowalk/baseline.hpp"

#include <algorithm>

#include "emowalk/errors.hpp"

namespace emowalk::learners {

MostFrequentModel fit_most_frequent(const Dataset& train) {
  train.validate();
  if (train.size() == 0) throw EmptyDataset("most-frequent baseline needs at least one training row");
  MostFrequentModel m;
  m.classes = classes_of(train.y);
  std::vector<std::size_t> counts(m.classes.size(), 0);
  for (int label : train.y)
    ++counts[static_cast<std::size_t>(std::lower_bound(m.classes.begin(), m.classes.end(), label) -
                                      m.classes.begin())];
  // max_element returns the first maximum, i.e. the smallest label on ties
  const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
  m.majority_label = m.classes[static_cast<std::size_t>(best)];
  m.prior.resize(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c)
    m.prior[c] = static_cast<double>(counts[c]) / static_cast<double>(train.size());
  return m;
}

Prediction predict_most_frequent(const MostFrequentModel& model, const Matrix& X) {
  Prediction p;
  p.classes = model.classes;
  p.labels.assign(X.rows(), model.majority_label);
  p.proba = Matrix(X.rows(), model.classes.size());
  for (std::size_t r = 0; r < X.rows(); ++r) std::copy(model.prior.begin(), model.prior.end(), p.proba.row(r).begin());
  return p;
}

}  // namespace emowalk::learners
