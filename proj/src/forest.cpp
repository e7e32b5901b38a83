#include "emowalk/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "emowalk/errors.hpp"
#include "emowalk/rng.hpp"
#include "emowalk/text.hpp"

namespace emowalk::learners {

std::size_t MaxFeatures::resolve(std::size_t d) const {
  double v = 0.0;
  switch (kind) {
    case Kind::Sqrt: v = std::floor(std::sqrt(static_cast<double>(d))); break;
    case Kind::Log2: v = std::floor(std::log2(static_cast<double>(std::max<std::size_t>(d, 1)))); break;
    case Kind::Fraction: v = std::floor(fraction * static_cast<double>(d)); break;
  }
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(v, 1.0)), 1, std::max<std::size_t>(d, 1));
}

std::string MaxFeatures::to_string() const {
  switch (kind) {
    case Kind::Sqrt: return "sqrt";
    case Kind::Log2: return "log2";
    case Kind::Fraction: break;
  }
  return text::format_double(fraction);
}

MaxFeatures MaxFeatures::parse(std::string_view s) {
  s = text::trim(s);
  if (s == "sqrt") return sqrt();
  if (s == "log2") return log2();
  const auto v = text::parse_double(s);
  if (!v || !(*v > 0.0 && *v <= 1.0))
    throw InvalidConfig("max_features must be sqrt, log2 or a fraction in (0, 1], got '" + std::string(s) + "'");
  return of(*v);
}

void HyperParams::validate() const {
  if (n_trees < 1) throw InvalidConfig("n_trees must be at least 1");
  if (max_depth && *max_depth < 1) throw InvalidConfig("max_depth must be at least 1");
  if (min_samples_split < 2) throw InvalidConfig("min_samples_split must be at least 2");
  if (min_samples_leaf < 1) throw InvalidConfig("min_samples_leaf must be at least 1");
  if (max_features.kind == MaxFeatures::Kind::Fraction &&
      !(max_features.fraction > 0.0 && max_features.fraction <= 1.0))
    throw InvalidConfig("max_features fraction must lie in (0, 1]");
}

std::string HyperParams::to_string() const {
  return "n_trees=" + std::to_string(n_trees) +
         " max_depth=" + (max_depth ? std::to_string(*max_depth) : std::string("none")) +
         " min_samples_split=" + std::to_string(min_samples_split) +
         " min_samples_leaf=" + std::to_string(min_samples_leaf) + " max_features=" + max_features.to_string() +
         " bootstrap=" + (bootstrap ? "true" : "false");
}

HyperParams default_forest_params() { return HyperParams{}; }

double gini(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto classes = classes_of(labels);
  double sum_sq = 0.0;
  for (int c : classes) {
    const auto k = std::count(labels.begin(), labels.end(), c);
    const double p = static_cast<double>(k) / static_cast<double>(labels.size());
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

int DecisionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].label;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

namespace {

// Per-feature dense ranks of the training rows, so split search can bucket
// samples by rank instead of sorting values at every node.
struct RankTable {
  std::size_t n = 0;
  std::vector<std::uint32_t> rank;            // feature-major, n per feature
  std::vector<std::uint32_t> order;           // feature-major row indices by ascending value
  std::vector<std::vector<double>> distinct;  // ascending distinct values per feature

  explicit RankTable(const Matrix& X) : n(X.rows()), rank(X.rows() * X.cols()), order(X.rows() * X.cols()),
                                     distinct(X.cols()) {
    std::vector<std::pair<double, std::uint32_t>> col(n);
    for (std::size_t f = 0; f < X.cols(); ++f) {
      for (std::size_t r = 0; r < n; ++r) col[r] = {X(r, f), static_cast<std::uint32_t>(r)};
      std::sort(col.begin(), col.end());
      auto& d = distinct[f];
      for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || col[i].first != col[i - 1].first) d.push_back(col[i].first);
        rank[f * n + col[i].second] = static_cast<std::uint32_t>(d.size() - 1);
        order[f * n + i] = col[i].second;
      }
    }
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const RankTable& ranks, const std::vector<int>& cls, const std::vector<int>& classes,
              const HyperParams& hp, std::uint64_t seed)
      : ranks_(ranks), cls_(cls), classes_(classes), hp_(hp), eng_(seed),
        m_(hp.max_features.resolve(ranks.distinct.size())), feat_order_(ranks.distinct.size()), mult_(ranks.n, 0) {}

  DecisionTree build(std::vector<std::size_t> idx) {
    nodes_.clear();
    inv_.assign(idx.size() + 1, 0.0);
    for (std::size_t k = 1; k < inv_.size(); ++k) inv_[k] = 1.0 / static_cast<double>(k);
    if (!idx.empty()) grow(idx, 0, idx.size(), 0);
    return DecisionTree{std::move(nodes_)};
  }

 private:
  struct Split {
    int feature = -1;
    std::uint32_t rank = 0;  // rows with rank <= this go left
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
  };

  int grow(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    const std::size_t n_cls = classes_.size();
    std::vector<std::size_t> counts(n_cls, 0);
    for (std::size_t i = begin; i < end; ++i) ++counts[static_cast<std::size_t>(cls_[idx[i]])];

    const int self = static_cast<int>(nodes_.size());
    TreeNode node;
    node.n_samples = static_cast<int>(n);
    node.label = classes_[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin())];
    nodes_.push_back(node);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    const auto min_split = static_cast<std::size_t>(hp_.min_samples_split);
    const auto min_leaf = static_cast<std::size_t>(hp_.min_samples_leaf);
    if (pure || n < min_split || n < 2 * min_leaf || (hp_.max_depth && depth >= *hp_.max_depth)) return self;

    const Split split = best_split(idx, begin, end, counts);
    if (split.feature < 0) return self;

    const std::uint32_t* rank = &ranks_.rank[static_cast<std::size_t>(split.feature) * ranks_.n];
    const auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                                    idx.begin() + static_cast<std::ptrdiff_t>(end),
                                    [&](std::size_t r) { return rank[r] <= split.rank; }) -
                     idx.begin();
    const int left = grow(idx, begin, static_cast<std::size_t>(mid), depth + 1);
    const int right = grow(idx, static_cast<std::size_t>(mid), end, depth + 1);
    auto& me = nodes_[static_cast<std::size_t>(self)];
    me.feature = split.feature;
    me.threshold = split.threshold;
    me.left = left;
    me.right = right;
    return self;
  }

  // Visits features in a fresh random order. Constant features do not count
  // toward the m_ budget, and the search continues past m_ until a valid split
  // exists or features run out.
  Split best_split(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                   const std::vector<std::size_t>& counts) {
    const std::size_t n = end - begin;
    const std::size_t d = feat_order_.size();
    const std::size_t rows = ranks_.n;
    const bool dense = n * 8 >= rows;
    std::iota(feat_order_.begin(), feat_order_.end(), std::size_t{0});
    if (dense)
      for (std::size_t i = begin; i < end; ++i) ++mult_[idx[i]];
    left_.assign(classes_.size(), 0);

    Split best;
    std::size_t visited = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (visited >= m_ && best.feature >= 0) break;
      const std::size_t r = j + static_cast<std::size_t>(rng::uniform_index(eng_, d - j));
      std::swap(feat_order_[j], feat_order_[r]);
      const std::size_t f = feat_order_[j];
      const std::uint32_t* rank = &ranks_.rank[f * rows];

      std::fill(left_.begin(), left_.end(), 0);
      std::size_t nl = 0;
      std::uint32_t prev = 0;
      bool boundary = false;
      const auto step = [&](std::uint32_t rr, int c, std::size_t m) {
        if (nl > 0 && rr != prev) {
          boundary = true;
          consider(static_cast<int>(f), prev, rr, nl, n, counts, best);
        }
        left_[static_cast<std::size_t>(c)] += m;
        nl += m;
        prev = rr;
      };
      if (dense) {
        const std::uint32_t* order = &ranks_.order[f * rows];
        for (std::size_t i = 0; i < rows; ++i) {
          const std::uint32_t row = order[i];
          if (mult_[row] > 0) step(rank[row], cls_[row], mult_[row]);
        }
      } else {
        sorted_.resize(n);
        for (std::size_t i = 0; i < n; ++i) sorted_[i] = {rank[idx[begin + i]], cls_[idx[begin + i]]};
        std::sort(sorted_.begin(), sorted_.end());
        for (const auto& [rr, c] : sorted_) step(rr, c, 1);
      }
      if (boundary) ++visited;
    }
    if (dense)
      for (std::size_t i = begin; i < end; ++i) mult_[idx[i]] = 0;
    return best;
  }

  // Split between the group of rank lo_rank (and all below) and the rest.
  void consider(int f, std::uint32_t lo_rank, std::uint32_t hi_rank, std::size_t nl, std::size_t n,
                const std::vector<std::size_t>& counts, Split& best) const {
    const std::size_t nr = n - nl;
    const auto min_leaf = static_cast<std::size_t>(hp_.min_samples_leaf);
    if (nl < min_leaf || nr < min_leaf) return;
    double sl = 0.0, sr = 0.0;
    for (std::size_t c = 0; c < left_.size(); ++c) {
      const auto lc = static_cast<double>(left_[c]);
      const auto rc = static_cast<double>(counts[c] - left_[c]);
      sl += lc * lc;
      sr += rc * rc;
    }
    // n_l * gini_l + n_r * gini_r
    const double score = static_cast<double>(nl) - sl * inv_[nl] + static_cast<double>(nr) - sr * inv_[nr];
    if (score < best.score) {
      const auto& values = ranks_.distinct[static_cast<std::size_t>(f)];
      const double lo = values[lo_rank], hi = values[hi_rank];
      double thr = lo + (hi - lo) / 2.0;
      if (!(thr < hi)) thr = lo;
      best = {f, lo_rank, thr, score};
    }
  }

  const RankTable& ranks_;
  const std::vector<int>& cls_;
  const std::vector<int>& classes_;
  const HyperParams& hp_;
  rng::Engine eng_;
  std::size_t m_;
  std::vector<std::size_t> feat_order_;
  std::vector<std::pair<std::uint32_t, int>> sorted_;
  std::vector<std::uint32_t> mult_;  // multiplicity of each training row in the current node
  std::vector<std::size_t> left_;
  std::vector<double> inv_;  // inv_[k] = 1 / k
  std::vector<TreeNode> nodes_;
};

std::vector<int> class_indices(std::span<const int> y, const std::vector<int>& classes) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  return out;
}

}  // namespace

DecisionTree fit_tree(const Dataset& train, std::span<const std::size_t> sample, const HyperParams& hp,
                      std::uint64_t seed) {
  train.validate();
  hp.validate();
  const auto classes = classes_of(train.y);
  const auto cls = class_indices(train.y, classes);
  const RankTable ranks(train.X);
  TreeBuilder builder(ranks, cls, classes, hp, seed);
  return builder.build({sample.begin(), sample.end()});
}

ForestModel fit_random_forest(const Dataset& train, const HyperParams& hp, std::uint64_t seed) {
  train.validate();
  hp.validate();
  if (train.size() == 0) throw EmptyDataset("random forest needs training rows");
  ForestModel model;
  model.classes = classes_of(train.y);
  if (model.classes.size() < 2) throw SingleClassDataset("random forest needs at least two classes");
  model.n_features = train.X.cols();
  model.hp = hp;
  model.seed = seed;
  const auto cls = class_indices(train.y, model.classes);

  const RankTable ranks(train.X);
  const std::size_t n = train.size();
  model.trees.reserve(static_cast<std::size_t>(hp.n_trees));
  std::vector<std::size_t> sample(n);
  for (int t = 0; t < hp.n_trees; ++t) {
    const auto tree_seed = rng::derive(seed, {static_cast<std::uint64_t>(t)});
    if (hp.bootstrap) {
      rng::Engine boot(rng::derive(tree_seed, {0}));
      for (auto& s : sample) s = static_cast<std::size_t>(rng::uniform_index(boot, n));
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    TreeBuilder builder(ranks, cls, model.classes, hp, rng::derive(tree_seed, {1}));
    model.trees.push_back(builder.build(sample));
  }
  return model;
}

std::vector<int> tree_votes(const ForestModel& model, std::span<const double> x) {
  std::vector<int> votes;
  votes.reserve(model.trees.size());
  for (const auto& t : model.trees) votes.push_back(t.predict(x));
  return votes;
}

Prediction predict_random_forest(const ForestModel& model, const Matrix& X) {
  if (X.rows() > 0 && X.cols() != model.n_features)
    throw DimensionMismatch("forest expects " + std::to_string(model.n_features) + " features, got " +
                            std::to_string(X.cols()));
  const std::size_t k = model.classes.size();
  Prediction p;
  p.classes = model.classes;
  p.labels.resize(X.rows());
  p.proba = Matrix(X.rows(), k);
  std::vector<std::size_t> counts(k);
  const auto n_trees = static_cast<double>(model.trees.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    const auto x = X.row(r);
    for (const auto& t : model.trees) {
      const int label = t.predict(x);
      ++counts[static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), label) -
                                        model.classes.begin())];
    }
    for (std::size_t c = 0; c < k; ++c) p.proba(r, c) = static_cast<double>(counts[c]) / n_trees;
    p.labels[r] = model.classes[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) -
                                                         counts.begin())];
  }
  return p;
}

}  // namespace emowalk::learners
