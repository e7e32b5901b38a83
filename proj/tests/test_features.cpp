#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "emowalk/errors.hpp"
#include "emowalk/features.hpp"
#include "emowalk/rng.hpp"

using namespace emowalk;
using namespace emowalk::features;
using doctest::Approx;

namespace {

std::vector<WalkingSample> run(std::size_t n, int condition = 0, int emotion = 1) {
  std::vector<WalkingSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].condition = condition;
    out[i].emotion = emotion;
    out[i].ax = static_cast<double>(i);
  }
  return out;
}

Window window_of(std::vector<WalkingSample> samples) {
  Window w;
  w.samples = std::move(samples);
  return w;
}

std::vector<WalkingSample> random_samples(rng::Engine& eng, std::size_t n) {
  std::vector<WalkingSample> out(n);
  for (auto& s : out) {
    s.ax = rng::normal(eng);
    s.ay = 0.5 + rng::normal(eng);
    s.az = -1.0 + rng::normal(eng);
    s.rot_x = 30 * rng::normal(eng);
    s.rot_y = 30 * rng::normal(eng);
    s.rot_z = 30 * rng::normal(eng);
    s.heart = 80 + 5 * rng::normal(eng);
  }
  return out;
}

double feature(const FeatureVector& f, std::string_view name) {
  const auto i = feature_index(name);
  REQUIRE(i < kFeatureCount);
  return f.values[i];
}

}  // namespace

TEST_CASE("window examples") {
  WindowingConfig cfg;
  cfg.window_len = 128;
  cfg.overlap = 0.5;
  CHECK(cfg.stride() == 64);
  CHECK(segment_windows(run(1000), cfg).size() == 14);
  CHECK(segment_windows(run(100), cfg).empty());
  cfg.overlap = 0.0;
  const auto tiles = segment_windows(run(256), cfg);
  REQUIRE(tiles.size() == 2);
  CHECK(tiles[0].start == 0);
  CHECK(tiles[1].start == 128);
}

TEST_CASE("window count law matches brute-force enumeration") {
  for (double overlap : {0.0, 0.25, 0.5, 0.75}) {
    for (std::size_t len = 2; len <= 256; len += (len < 16 ? 1 : 23)) {
      WindowingConfig cfg;
      cfg.window_len = len;
      cfg.overlap = overlap;
      const auto stride = cfg.stride();
      for (std::size_t n = 0; n <= 2000; n += (n < 300 ? 1 : 37)) {
        std::size_t brute = 0;
        for (std::size_t start = 0; start + len <= n; start += stride) ++brute;
        REQUIRE(window_count(n, len, stride) == brute);
      }
    }
  }
}

TEST_CASE("segmented windows are pure, full length and stride aligned") {
  rng::Engine eng(5);
  std::vector<WalkingSample> samples;
  for (int r = 0; r < 20; ++r) {
    const auto n = static_cast<std::size_t>(rng::uniform_int(eng, 0, 300));
    const int cond = static_cast<int>(rng::uniform_index(eng, 3));
    const int emo = static_cast<int>(rng::uniform_index(eng, 3)) - 1;
    auto part = run(n, cond, emo);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  WindowingConfig cfg;
  cfg.window_len = 32;
  cfg.overlap = 0.25;
  for (const auto& w : segment_windows(samples, cfg)) {
    REQUIRE(w.samples.size() == 32);
    for (const auto& s : w.samples) {
      CHECK(s.condition == w.condition);
      CHECK(s.emotion == w.emotion);
    }
    CHECK(samples[w.start] == w.samples.front());
  }
}

TEST_CASE("windowing config validation") {
  WindowingConfig cfg;
  cfg.window_len = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.overlap = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.window_len = 2;
  cfg.overlap = 0.9;
  CHECK_THROWS_AS(cfg.stride(), InvalidConfig);
}

TEST_CASE("median filter") {
  CHECK(median3(std::vector<double>{2, 2, 2, 2}) == std::vector<double>{2, 2, 2, 2});
  CHECK(median3(std::vector<double>{0, 0, 9, 0, 0}) == std::vector<double>{0, 0, 0, 0, 0});
  CHECK(median3(std::vector<double>{1, 2, 3, 4}) == std::vector<double>{1, 2, 3, 4});
  CHECK(median3(std::vector<double>{9, 0, 0}) == std::vector<double>{9, 0, 0});
  CHECK(median3(std::vector<double>{}).empty());

  rng::Engine eng(1);
  auto w = window_of(random_samples(eng, 50));
  const auto d = denoise_accel(w);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(d.samples[i].rot_x == w.samples[i].rot_x);
    CHECK(d.samples[i].heart == w.samples[i].heart);
  }
  for (std::size_t i = 1; i + 1 < w.samples.size(); ++i) {
    std::array<double, 3> v{w.samples[i - 1].ay, w.samples[i].ay, w.samples[i + 1].ay};
    std::sort(v.begin(), v.end());
    CHECK(d.samples[i].ay == v[1]);
  }
}

TEST_CASE("catalog") {
  const auto& cat = feature_catalog();
  CHECK(cat.size() == 107);
  CHECK(std::set<std::string>(cat.begin(), cat.end()).size() == 107);
  for (auto name : {"acc_x_std", "gyro_z_std", "angle_y", "acc_mag_std", "heart_mean"})
    CHECK(feature_index(name) < kFeatureCount);
  CHECK(&feature_catalog() == &cat);
  CHECK(feature_index("nope") == kFeatureCount);
}

TEST_CASE("hand-computed statistics") {
  const std::vector<double> x{1, 2, 3};
  const auto s = channel_stats(x);
  CHECK(s[Mean] == Approx(2.0));
  CHECK(s[Std] == Approx(std::sqrt(2.0 / 3.0)));
  CHECK(s[Rms] == Approx(std::sqrt(14.0 / 3.0)));
  CHECK(s[Range] == 2.0);
  CHECK(s[Median] == 2.0);
  CHECK(s[Min] == 1.0);
  CHECK(s[Max] == 3.0);
  CHECK(s[Iqr] == Approx(1.0));
  CHECK(s[Mad] == Approx(1.0));
  CHECK(s[Skew] == Approx(0.0));
  CHECK(s[Kurtosis] == Approx(-1.5));

  const auto c = channel_stats(std::vector<double>{4, 4, 4});
  CHECK(c[Std] == 0.0);
  CHECK(c[Skew] == 0.0);
  CHECK(c[Kurtosis] == 0.0);

  const std::vector<double> q{1, 2, 3, 4};
  CHECK(quantile_sorted(q, 0.25) == Approx(1.75));
  CHECK(quantile_sorted(q, 0.5) == Approx(2.5));
  CHECK(correlation(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == Approx(1.0));
  CHECK(correlation(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}) == 0.0);
}

TEST_CASE("degenerate and axis-aligned windows") {
  std::vector<WalkingSample> s(8);
  for (auto& v : s) {
    v.ax = 1.0;
    v.heart = 70;
  }
  const auto f = extract_features(window_of(s));
  CHECK(feature(f, "acc_x_std") == 0.0);
  CHECK(feature(f, "acc_x_skew") == 0.0);
  CHECK(feature(f, "acc_x_kurtosis") == 0.0);
  CHECK(feature(f, "corr_acc_xy") == 0.0);
  CHECK(feature(f, "corr_acc_xz") == 0.0);
  CHECK(feature(f, "corr_acc_yz") == 0.0);
  CHECK(feature(f, "angle_x") == Approx(0.0));
  CHECK(feature(f, "angle_y") == Approx(std::numbers::pi / 2));
  CHECK(feature(f, "angle_z") == Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(extract_features(Window{}), DegenerateWindow);
}

TEST_CASE("feature ranges on random windows") {
  rng::Engine eng(9);
  for (int t = 0; t < 200; ++t) {
    const auto f = extract_features(window_of(random_samples(eng, 2 + t % 70)));
    for (double v : f.values) REQUIRE(std::isfinite(v));
    for (const auto& name : feature_catalog()) {
      const double v = feature(f, name);
      if (name.ends_with("_std") || name.ends_with("_rms") || name.ends_with("_range") || name.ends_with("_iqr") ||
          name.ends_with("_mad") || name.starts_with("sma"))
        CHECK(v >= 0.0);
      if (name.starts_with("angle")) CHECK((v >= 0.0 && v <= std::numbers::pi));
      if (name.starts_with("corr")) CHECK((v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12));
    }
  }
}

TEST_CASE("scale and translation behaviour") {
  rng::Engine eng(21);
  const char* scaled[] = {"acc_x_std", "acc_y_rms", "acc_z_range", "acc_x_mad", "acc_y_iqr", "sma_acc", "acc_mag_std"};
  const char* fixed[] = {"angle_x", "angle_y", "angle_z", "corr_acc_xy", "corr_acc_xz", "corr_acc_yz", "acc_x_skew", "acc_z_kurtosis"};
  for (int t = 0; t < 50; ++t) {
    const auto base = random_samples(eng, 40);
    const double c = 0.1 + 5 * rng::uniform01(eng);
    auto scaled_s = base;
    for (auto& s : scaled_s) {
      s.ax *= c;
      s.ay *= c;
      s.az *= c;
    }
    const auto f0 = extract_features(window_of(base));
    const auto f1 = extract_features(window_of(scaled_s));
    for (auto n : scaled) CHECK(feature(f1, n) == Approx(c * feature(f0, n)).epsilon(1e-9));
    for (auto n : fixed) CHECK(feature(f1, n) == Approx(feature(f0, n)).epsilon(1e-9));

    auto shifted = base;
    const double k = 10 * rng::normal(eng);
    for (auto& s : shifted) s.ay += k;
    const auto f2 = extract_features(window_of(shifted));
    for (auto n : {"acc_y_std", "acc_y_mad", "acc_y_iqr", "corr_acc_xy", "corr_acc_xz", "corr_acc_yz"})
      CHECK(feature(f2, n) == Approx(feature(f0, n)).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("feature CSV round-trip") {
  rng::Engine eng(4);
  std::vector<FeatureVector> rows;
  for (int i = 0; i < 5; ++i) {
    auto f = extract_features(window_of(random_samples(eng, 16)));
    f.emotion = i % 3 - 1;
    f.condition = 2;
    rows.push_back(f);
  }
  const auto csv = write_feature_csv(rows);
  const auto back = read_feature_csv("# seed=1 config=x\n\n" + csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].values == rows[i].values);
    CHECK(back[i].emotion == rows[i].emotion);
    CHECK(back[i].condition == rows[i].condition);
  }
  CHECK_THROWS_AS(read_feature_csv("a,b\n1,2\n"), MalformedRow);
}
