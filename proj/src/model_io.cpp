#include "emowalk/model_io.hpp"

#include <algorithm>
#include <sstream>

#include "emowalk/errors.hpp"
#include "emowalk/text.hpp"

namespace emowalk::learners {

namespace {

// forest body:
//   n_features <d>
//   seed <u64>
//   hyperparams <key=value ...>
//   trees <count>
//   tree <nodes>
//   split <feature> <threshold> <left> <right> <n_samples>
//   leaf <label> <n_samples>
// logistic body:
//   n_features <d>
//   mean <d values>
//   scale <d values>
//   problems <p>
//   weights <intercept> <d values>     (p lines)
// most_frequent body:
//   majority <label>
//   prior <k values>

template <typename Range>
void put_doubles(std::string& out, const Range& values) {
  for (double v : values) {
    out += ' ';
    out += text::format_double(v);
  }
}

class Tokens {
 public:
  explicit Tokens(std::string_view content) : in_(std::string(content)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("model file truncated");
    return w;
  }
  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword) throw DataError("model file: expected '" + std::string(keyword) + "', got '" + w + "'");
  }
  long long integer() {
    const auto w = word();
    const auto v = text::parse_int(w);
    if (!v) throw DataError("model file: bad integer '" + w + "'");
    return *v;
  }
  double real() {
    const auto w = word();
    const auto v = text::parse_double(w);
    if (!v) throw DataError("model file: bad number '" + w + "'");
    return *v;
  }
  std::string rest_of_line() {
    std::string line;
    std::getline(in_, line);
    return line;
  }

 private:
  std::istringstream in_;
};

std::size_t count(Tokens& t, long long limit = 100'000'000) {
  const auto v = t.integer();
  if (v < 0 || v > limit) throw DataError("model file: count out of range");
  return static_cast<std::size_t>(v);
}

}  // namespace

HyperParams parse_hyperparams(std::string_view s) {
  HyperParams hp;
  std::istringstream in{std::string(s)};
  std::string kv;
  while (in >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidConfig("hyperparameter '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    const std::string_view val = std::string_view(kv).substr(eq + 1);
    const auto as_int = [&]() {
      const auto v = text::parse_int(val);
      if (!v) throw InvalidConfig("bad integer for " + key);
      return static_cast<int>(*v);
    };
    if (key == "n_trees") {
      hp.n_trees = as_int();
    } else if (key == "max_depth") {
      if (val == "none")
        hp.max_depth.reset();
      else
        hp.max_depth = as_int();
    } else if (key == "min_samples_split") {
      hp.min_samples_split = as_int();
    } else if (key == "min_samples_leaf") {
      hp.min_samples_leaf = as_int();
    } else if (key == "max_features") {
      hp.max_features = MaxFeatures::parse(val);
    } else if (key == "bootstrap") {
      if (val != "true" && val != "false") throw InvalidConfig("bootstrap must be true or false");
      hp.bootstrap = val == "true";
    } else {
      throw InvalidConfig("unknown hyperparameter '" + key + "'");
    }
  }
  hp.validate();
  return hp;
}

std::string save_model(const TrainedModel& model) {
  std::string out = "emowalk-model " + std::to_string(kModelFormatVersion) + "\n";
  const auto put_classes = [&](const std::vector<int>& classes) {
    out += "classes " + std::to_string(classes.size());
    for (int c : classes) out += " " + std::to_string(c);
    out += '\n';
  };

  if (const auto* m = std::get_if<MostFrequentModel>(&model)) {
    out += "kind most_frequent\n";
    put_classes(m->classes);
    out += "majority " + std::to_string(m->majority_label) + "\nprior";
    put_doubles(out, m->prior);
    out += '\n';
  } else if (const auto* m = std::get_if<LogisticModel>(&model)) {
    out += "kind logistic\n";
    put_classes(m->classes);
    out += "n_features " + std::to_string(m->feature_mean.size()) + "\nmean";
    put_doubles(out, m->feature_mean);
    out += "\nscale";
    put_doubles(out, m->feature_scale);
    out += "\nproblems " + std::to_string(m->weights.size()) + '\n';
    for (std::size_t p = 0; p < m->weights.size(); ++p) {
      out += "weights " + text::format_double(m->intercepts[p]);
      put_doubles(out, m->weights[p]);
      out += '\n';
    }
  } else {
    const auto& f = std::get<ForestModel>(model);
    out += "kind forest\n";
    put_classes(f.classes);
    out += "n_features " + std::to_string(f.n_features) + '\n';
    out += "seed " + std::to_string(f.seed) + '\n';
    out += "hyperparams " + f.hp.to_string() + '\n';
    out += "trees " + std::to_string(f.trees.size()) + '\n';
    for (const auto& t : f.trees) {
      out += "tree " + std::to_string(t.nodes.size()) + '\n';
      for (const auto& n : t.nodes) {
        if (n.feature < 0) {
          out += "leaf " + std::to_string(n.label) + " " + std::to_string(n.n_samples) + '\n';
        } else {
          out += "split " + std::to_string(n.feature) + " " + text::format_double(n.threshold) + " " +
                 std::to_string(n.left) + " " + std::to_string(n.right) + " " + std::to_string(n.n_samples) + '\n';
        }
      }
    }
  }
  out += "end\n";
  return out;
}

TrainedModel load_model(std::string_view content) {
  Tokens t(content);
  t.expect("emowalk-model");
  if (t.integer() != kModelFormatVersion) throw DataError("unsupported model format version");
  t.expect("kind");
  const std::string kind = t.word();
  t.expect("classes");
  std::vector<int> classes(count(t, 1000));
  for (auto& c : classes) c = static_cast<int>(t.integer());
  if (classes.empty() || !std::is_sorted(classes.begin(), classes.end()))
    throw DataError("model file: classes must be non-empty and ascending");

  TrainedModel result;
  if (kind == "most_frequent") {
    MostFrequentModel m;
    m.classes = classes;
    t.expect("majority");
    m.majority_label = static_cast<int>(t.integer());
    t.expect("prior");
    m.prior.resize(classes.size());
    for (auto& p : m.prior) p = t.real();
    result = std::move(m);
  } else if (kind == "logistic") {
    LogisticModel m;
    m.classes = classes;
    t.expect("n_features");
    const std::size_t d = count(t);
    t.expect("mean");
    m.feature_mean.resize(d);
    for (auto& v : m.feature_mean) v = t.real();
    t.expect("scale");
    m.feature_scale.resize(d);
    for (auto& v : m.feature_scale) v = t.real();
    t.expect("problems");
    const std::size_t p = count(t, 1000);
    if (p != (classes.size() == 2 ? 1u : classes.size())) throw DataError("model file: wrong number of problems");
    for (std::size_t i = 0; i < p; ++i) {
      t.expect("weights");
      m.intercepts.push_back(t.real());
      std::vector<double> w(d);
      for (auto& v : w) v = t.real();
      m.weights.push_back(std::move(w));
    }
    m.iterations.assign(p, 0);
    result = std::move(m);
  } else if (kind == "forest") {
    ForestModel f;
    f.classes = classes;
    t.expect("n_features");
    f.n_features = count(t);
    t.expect("seed");
    {
      const auto w = t.word();
      std::uint64_t s = 0;
      for (char c : w) {
        if (c < '0' || c > '9') throw DataError("model file: bad seed");
        s = s * 10 + static_cast<std::uint64_t>(c - '0');
      }
      f.seed = s;
    }
    t.expect("hyperparams");
    f.hp = parse_hyperparams(t.rest_of_line());
    t.expect("trees");
    f.trees.resize(count(t));
    for (auto& tree : f.trees) {
      t.expect("tree");
      tree.nodes.resize(count(t));
      for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        auto& n = tree.nodes[i];
        const auto tag = t.word();
        if (tag == "leaf") {
          n.label = static_cast<int>(t.integer());
          n.n_samples = static_cast<int>(t.integer());
          if (!std::binary_search(classes.begin(), classes.end(), n.label))
            throw DataError("model file: leaf label not among classes");
        } else if (tag == "split") {
          n.feature = static_cast<int>(t.integer());
          n.threshold = t.real();
          n.left = static_cast<int>(t.integer());
          n.right = static_cast<int>(t.integer());
          n.n_samples = static_cast<int>(t.integer());
          const auto size = static_cast<int>(tree.nodes.size());
          if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= f.n_features || n.left <= static_cast<int>(i) ||
              n.right <= static_cast<int>(i) || n.left >= size || n.right >= size)
            throw DataError("model file: split node out of range");
        } else {
          throw DataError("model file: unknown node tag '" + tag + "'");
        }
      }
      if (tree.nodes.empty()) throw DataError("model file: empty tree");
    }
    result = std::move(f);
  } else {
    throw DataError("model file: unknown kind '" + kind + "'");
  }
  t.expect("end");
  return result;
}

Prediction predict(const TrainedModel& model, const Matrix& X) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MostFrequentModel>)
          return predict_most_frequent(m, X);
        else if constexpr (std::is_same_v<T, LogisticModel>)
          return predict_logistic(m, X);
        else
          return predict_random_forest(m, X);
      },
      model);
}

}  // namespace emowalk::learners
