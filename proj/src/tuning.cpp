#include "emowalk/tuning.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "emowalk/errors.hpp"
#include "emowalk/metrics.hpp"
#include "emowalk/parallel.hpp"
#include "emowalk/rng.hpp"
#include "emowalk/text.hpp"

namespace emowalk::tuning {

namespace {

void check_range(const IntRange& r, const char* name) {
  if (r.lo > r.hi) throw EmptySpace(std::string("search space: ") + name + " range is empty");
}

IntRange parse_range(std::string_view s, const std::string& key) {
  s = text::trim(s);
  const auto dots = s.find("..");
  const auto lo = text::parse_int(dots == std::string_view::npos ? s : s.substr(0, dots));
  const auto hi = text::parse_int(dots == std::string_view::npos ? s : s.substr(dots + 2));
  if (!lo || !hi) throw InvalidConfig("search space: bad range '" + std::string(s) + "' for " + key);
  return {static_cast<int>(*lo), static_cast<int>(*hi)};
}

std::string format_range(const IntRange& r) { return std::to_string(r.lo) + ".." + std::to_string(r.hi); }

}  // namespace

void SearchSpace::validate() const {
  check_range(n_trees, "n_trees");
  if (!allow_unlimited_depth) check_range(max_depth, "max_depth");
  check_range(min_samples_split, "min_samples_split");
  check_range(min_samples_leaf, "min_samples_leaf");
  if (max_features.empty()) throw EmptySpace("search space: max_features has no choices");
  if (bootstrap.empty()) throw EmptySpace("search space: bootstrap has no choices");
  if (n_trees.lo < 1) throw InvalidConfig("search space: n_trees must be at least 1");
  if (max_depth.lo <= max_depth.hi && max_depth.lo < 1) throw InvalidConfig("search space: max_depth must be at least 1");
  if (min_samples_split.lo < 2) throw InvalidConfig("search space: min_samples_split must be at least 2");
  if (min_samples_leaf.lo < 1) throw InvalidConfig("search space: min_samples_leaf must be at least 1");
  for (const auto& mf : max_features) {
    HyperParams hp;
    hp.max_features = mf;
    hp.validate();
  }
}

SearchSpace parse_search_space(std::string_view content) {
  SearchSpace sp;
  text::LineReader reader(content);
  std::string_view line;
  while (reader.next(line)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidConfig("search space line " + std::to_string(reader.line_number()) + ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    const auto items = text::split(value, ',');
    if (key == "n_trees") {
      sp.n_trees = parse_range(value, key);
    } else if (key == "max_depth") {
      sp.allow_unlimited_depth = false;
      sp.max_depth = {1, 0};  // empty unless a range follows
      for (auto item : items) {
        if (item == "none")
          sp.allow_unlimited_depth = true;
        else
          sp.max_depth = parse_range(item, key);
      }
    } else if (key == "min_samples_split") {
      sp.min_samples_split = parse_range(value, key);
    } else if (key == "min_samples_leaf") {
      sp.min_samples_leaf = parse_range(value, key);
    } else if (key == "max_features") {
      sp.max_features.clear();
      for (auto item : items) sp.max_features.push_back(MaxFeatures::parse(item));
    } else if (key == "bootstrap") {
      sp.bootstrap.clear();
      for (auto item : items) {
        if (item != "true" && item != "false") throw InvalidConfig("search space: bootstrap choices are true/false");
        sp.bootstrap.push_back(item == "true");
      }
    } else {
      throw InvalidConfig("search space: unknown key '" + key + "'");
    }
  }
  sp.validate();
  return sp;
}

std::string format_search_space(const SearchSpace& sp) {
  std::string out = "n_trees = " + format_range(sp.n_trees) + "\nmax_depth = ";
  std::vector<std::string> depth;
  if (sp.allow_unlimited_depth) depth.push_back("none");
  if (sp.max_depth.lo <= sp.max_depth.hi) depth.push_back(format_range(sp.max_depth));
  for (std::size_t i = 0; i < depth.size(); ++i) out += (i ? "," : "") + depth[i];
  out += "\nmin_samples_split = " + format_range(sp.min_samples_split);
  out += "\nmin_samples_leaf = " + format_range(sp.min_samples_leaf);
  out += "\nmax_features = ";
  for (std::size_t i = 0; i < sp.max_features.size(); ++i) out += (i ? "," : "") + sp.max_features[i].to_string();
  out += "\nbootstrap = ";
  for (std::size_t i = 0; i < sp.bootstrap.size(); ++i) out += (i ? "," : "") + std::string(sp.bootstrap[i] ? "true" : "false");
  out += '\n';
  return out;
}

std::vector<HyperParams> sample_hyperparams(const SearchSpace& space, int n_iter, std::uint64_t seed) {
  space.validate();
  if (n_iter < 1) throw InvalidConfig("n_iter must be at least 1");
  rng::Engine eng(seed);
  std::vector<HyperParams> out;
  out.reserve(static_cast<std::size_t>(n_iter));
  const int depth_choices = (space.max_depth.lo <= space.max_depth.hi ? space.max_depth.hi - space.max_depth.lo + 1 : 0) +
                            (space.allow_unlimited_depth ? 1 : 0);
  for (int i = 0; i < n_iter; ++i) {
    HyperParams hp;
    hp.n_trees = static_cast<int>(rng::uniform_int(eng, space.n_trees.lo, space.n_trees.hi));
    const auto d = static_cast<int>(rng::uniform_index(eng, static_cast<std::uint64_t>(depth_choices)));
    if (space.allow_unlimited_depth && d == 0)
      hp.max_depth.reset();
    else
      hp.max_depth = space.max_depth.lo + d - (space.allow_unlimited_depth ? 1 : 0);
    hp.min_samples_split =
        static_cast<int>(rng::uniform_int(eng, space.min_samples_split.lo, space.min_samples_split.hi));
    hp.min_samples_leaf = static_cast<int>(rng::uniform_int(eng, space.min_samples_leaf.lo, space.min_samples_leaf.hi));
    hp.max_features = space.max_features[rng::uniform_index(eng, space.max_features.size())];
    hp.bootstrap = space.bootstrap[rng::uniform_index(eng, space.bootstrap.size())];
    out.push_back(hp);
  }
  return out;
}

std::string to_string(FoldMode m) { return m == FoldMode::Shuffled ? "stratified" : "blocked"; }

FoldMode parse_fold_mode(std::string_view s) {
  if (s == "stratified" || s == "shuffled") return FoldMode::Shuffled;
  if (s == "blocked") return FoldMode::Blocked;
  throw InvalidConfig("fold mode must be stratified or blocked, got '" + std::string(s) + "'");
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> y, int k, std::uint64_t seed,
                                                       FoldMode mode) {
  if (k < 2) throw InvalidConfig("k must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  const auto uk = static_cast<std::size_t>(k);
  for (const auto& [label, idx] : by_class)
    if (idx.size() < uk)
      throw TooFewPerClass("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                           " members, fewer than k = " + std::to_string(k));

  rng::Engine eng(seed);
  std::vector<std::vector<std::size_t>> folds(uk);
  std::size_t offset = 0;
  for (auto& [label, idx] : by_class) {
    const std::size_t n = idx.size();
    if (mode == FoldMode::Shuffled) {
      rng::shuffle(eng, std::span<std::size_t>(idx));
      for (std::size_t j = 0; j < n; ++j) folds[(offset + j) % uk].push_back(idx[j]);
      offset = (offset + n) % uk;
    } else {
      // contiguous chunks; the first n % k chunks carry one extra member
      std::size_t pos = 0;
      for (std::size_t c = 0; c < uk; ++c) {
        const std::size_t len = n / uk + (c < n % uk ? 1 : 0);
        auto& fold = folds[(offset + c) % uk];
        fold.insert(fold.end(), idx.begin() + static_cast<std::ptrdiff_t>(pos),
                    idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
      }
      offset = (offset + n % uk) % uk;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t i) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (f != i) out.insert(out.end(), folds[f].begin(), folds[f].end());
  std::sort(out.begin(), out.end());
  return out;
}

CVResult cross_val_score(const Dataset& data, const HyperParams& params, int k, std::uint64_t seed,
                         std::size_t sample_index, FoldMode mode) {
  const auto folds = stratified_kfold(data.y, k, seed, mode);
  CVResult res;
  res.params = params;
  res.sample_index = sample_index;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto train = learners::subset(data, training_indices(folds, i));
    const auto test = learners::subset(data, folds[i]);
    const auto model = learners::fit_random_forest(
        train, params, rng::derive(seed, {static_cast<std::uint64_t>(sample_index), static_cast<std::uint64_t>(i)}));
    const auto pred = learners::predict_random_forest(model, test.X);
    res.fold_scores.push_back(eval::accuracy(test.y, pred.labels));
  }
  double total = 0.0;
  for (double s : res.fold_scores) total += s;
  res.mean_score = total / static_cast<double>(res.fold_scores.size());
  return res;
}

SearchResult random_search(const Dataset& data, const SearchSpace& space, const SearchOptions& opts,
                           std::uint64_t seed) {
  const auto configs = sample_hyperparams(space, opts.n_iter, rng::derive(seed, {0}));
  const auto cv_seed = rng::derive(seed, {1});
  // Fail on bad folds before spending time on forests.
  (void)stratified_kfold(data.y, opts.k, cv_seed, opts.fold_mode);

  SearchResult res;
  res.all.resize(configs.size());
  parallel_for(configs.size(), opts.threads, [&](std::size_t i) {
    res.all[i] = cross_val_score(data, configs[i], opts.k, cv_seed, i, opts.fold_mode);
  });
  for (std::size_t i = 1; i < res.all.size(); ++i)
    if (res.all[i].mean_score > res.all[res.best_index].mean_score) res.best_index = i;
  res.best = res.all[res.best_index].params;
  return res;
}

}  // namespace emowalk::tuning
