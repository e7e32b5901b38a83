#include "emowalk/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emowalk/errors.hpp"
#include "emowalk/text.hpp"

namespace emowalk::features {

namespace {

constexpr std::array<std::string_view, 9> kChannels{"acc_x",  "acc_y",  "acc_z",    "acc_mag", "gyro_x",
                                                    "gyro_y", "gyro_z", "gyro_mag", "heart"};
constexpr std::array<std::string_view, kStatCount> kStatNames{"mean", "std", "min", "max",  "range",   "median",
                                                              "rms",  "iqr", "mad", "skew", "kurtosis"};

constexpr std::size_t kAngleBase = kChannels.size() * kStatCount;  // 99
constexpr std::size_t kCorrBase = kAngleBase + 3;
constexpr std::size_t kSmaBase = kCorrBase + 3;
static_assert(kSmaBase + 2 == kFeatureCount);

double median_of_sorted(std::span<const double> s) {
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::size_t WindowingConfig::stride() const {
  validate();
  return static_cast<std::size_t>(std::lround(static_cast<double>(window_len) * (1.0 - overlap)));
}

void WindowingConfig::validate() const {
  if (window_len < 2) throw InvalidConfig("window_len must be at least 2");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw InvalidConfig("overlap must lie in [0, 1)");
  if (!(frequency_rate > 0.0)) throw InvalidConfig("frequency_rate must be positive");
  if (std::lround(static_cast<double>(window_len) * (1.0 - overlap)) < 1)
    throw InvalidConfig("window_len and overlap give a stride of 0");
}

std::size_t window_count(std::size_t run_len, std::size_t window_len, std::size_t stride) noexcept {
  if (stride == 0 || run_len < window_len) return 0;
  return (run_len - window_len) / stride + 1;
}

std::vector<Window> segment_windows(std::span<const WalkingSample> samples, const WindowingConfig& cfg) {
  const std::size_t len = cfg.window_len;
  const std::size_t stride = cfg.stride();
  std::vector<Window> out;
  std::size_t run_start = 0;
  while (run_start < samples.size()) {
    std::size_t run_end = run_start + 1;
    while (run_end < samples.size() && samples[run_end].condition == samples[run_start].condition &&
           samples[run_end].emotion == samples[run_start].emotion)
      ++run_end;
    for (std::size_t s = run_start; s + len <= run_end; s += stride) {
      Window w;
      w.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(s),
                       samples.begin() + static_cast<std::ptrdiff_t>(s + len));
      w.condition = samples[run_start].condition;
      w.emotion = samples[run_start].emotion;
      w.start = s;
      out.push_back(std::move(w));
    }
    run_start = run_end;
  }
  return out;
}

std::vector<double> median3(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i == 0 ? 0 : i - 1];
    const double b = x[i];
    const double c = x[i + 1 < x.size() ? i + 1 : i];
    out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
  return out;
}

Window denoise_accel(Window window) {
  const std::size_t n = window.samples.size();
  std::vector<double> ax(n), ay(n), az(n);
  for (std::size_t i = 0; i < n; ++i) {
    ax[i] = window.samples[i].ax;
    ay[i] = window.samples[i].ay;
    az[i] = window.samples[i].az;
  }
  const auto fx = median3(ax), fy = median3(ay), fz = median3(az);
  for (std::size_t i = 0; i < n; ++i) {
    window.samples[i].ax = fx[i];
    window.samples[i].ay = fy[i];
    window.samples[i].az = fz[i];
  }
  return window;
}

const std::array<std::string, kFeatureCount>& feature_catalog() {
  static const auto catalog = [] {
    std::array<std::string, kFeatureCount> names;
    std::size_t i = 0;
    for (auto ch : kChannels)
      for (auto st : kStatNames) names[i++] = std::string(ch) + "_" + std::string(st);
    for (auto n : {"angle_x", "angle_y", "angle_z", "corr_acc_xy", "corr_acc_xz", "corr_acc_yz", "sma_acc",
                   "sma_gyro"})
      names[i++] = n;
    return names;
  }();
  return catalog;
}

std::size_t feature_index(std::string_view name) {
  // Short column names used in the published feature tables.
  if (name == "mag") name = "acc_mag_std";
  if (name == "heart") name = "heart_mean";
  const auto& cat = feature_catalog();
  return static_cast<std::size_t>(std::find(cat.begin(), cat.end(), name) - cat.begin());
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::array<double, kStatCount> channel_stats(std::span<const double> x) {
  std::array<double, kStatCount> st{};
  if (x.empty()) return st;
  const auto n = static_cast<double>(x.size());
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  st[Min] = sorted.front();
  st[Max] = sorted.back();
  st[Range] = st[Max] - st[Min];
  st[Median] = median_of_sorted(sorted);
  st[Iqr] = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

  double sq = 0.0;
  for (double v : x) sq += v * v;
  st[Rms] = std::sqrt(sq / n);

  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - st[Median]);
  std::sort(dev.begin(), dev.end());
  st[Mad] = median_of_sorted(dev);

  if (st[Min] == st[Max]) {
    st[Mean] = st[Min];
    return st;  // std, skewness, kurtosis stay 0
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  st[Mean] = mean;
  st[Std] = std::sqrt(m2);
  st[Skew] = m2 > 0.0 ? finite_or_zero(m3 / std::pow(m2, 1.5)) : 0.0;
  st[Kurtosis] = m2 > 0.0 ? finite_or_zero(m4 / (m2 * m2) - 3.0) : 0.0;
  return st;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("correlation: series lengths differ");
  if (x.empty() || is_constant(x) || is_constant(y)) return 0.0;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double r = finite_or_zero(sxy / std::sqrt(sxx * syy));
  return std::clamp(r, -1.0, 1.0);
}

FeatureVector extract_features(const Window& window) {
  const std::size_t n = window.samples.size();
  if (n == 0) throw DegenerateWindow("cannot extract features from an empty window");

  std::array<std::vector<double>, kChannels.size()> ch;
  for (auto& c : ch) c.resize(n);
  double sma_acc = 0.0, sma_gyro = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = window.samples[i];
    ch[0][i] = s.ax;
    ch[1][i] = s.ay;
    ch[2][i] = s.az;
    ch[3][i] = std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az);
    ch[4][i] = s.rot_x;
    ch[5][i] = s.rot_y;
    ch[6][i] = s.rot_z;
    ch[7][i] = std::sqrt(s.rot_x * s.rot_x + s.rot_y * s.rot_y + s.rot_z * s.rot_z);
    ch[8][i] = s.heart;
    sma_acc += std::abs(s.ax) + std::abs(s.ay) + std::abs(s.az);
    sma_gyro += std::abs(s.rot_x) + std::abs(s.rot_y) + std::abs(s.rot_z);
  }

  FeatureVector fv;
  fv.emotion = window.emotion;
  fv.condition = window.condition;
  for (std::size_t c = 0; c < ch.size(); ++c) {
    const auto st = channel_stats(ch[c]);
    std::copy(st.begin(), st.end(), fv.values.begin() + static_cast<std::ptrdiff_t>(c * kStatCount));
  }

  // Tilt of the mean acceleration vector against each axis. A zero mean
  // vector has no direction; report pi/2 for all three axes.
  const std::array<double, 3> m{fv.values[0 * kStatCount + Mean], fv.values[1 * kStatCount + Mean],
                                fv.values[2 * kStatCount + Mean]};
  const double norm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  for (std::size_t k = 0; k < 3; ++k) {
    fv.values[kAngleBase + k] =
        norm > 0.0 && std::isfinite(norm) ? std::acos(std::clamp(m[k] / norm, -1.0, 1.0)) : std::numbers::pi / 2;
  }

  fv.values[kCorrBase + 0] = correlation(ch[0], ch[1]);
  fv.values[kCorrBase + 1] = correlation(ch[0], ch[2]);
  fv.values[kCorrBase + 2] = correlation(ch[1], ch[2]);
  fv.values[kSmaBase + 0] = sma_acc / static_cast<double>(n);
  fv.values[kSmaBase + 1] = sma_gyro / static_cast<double>(n);
  return fv;
}

std::string write_feature_csv(std::span<const FeatureVector> rows, char delimiter) {
  std::string out;
  for (const auto& name : feature_catalog()) {
    out += name;
    out += delimiter;
  }
  out += "emotion";
  out += delimiter;
  out += "condition\n";
  for (const auto& r : rows) {
    for (double v : r.values) {
      out += text::format_double(v);
      out += delimiter;
    }
    out += std::to_string(r.emotion);
    out += delimiter;
    out += std::to_string(r.condition);
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> read_feature_csv(std::string_view content, char delimiter) {
  text::LineReader reader(content);
  std::string_view line;
  if (!text::next_header(reader, line)) throw MalformedRow(1, "missing feature header");
  {
    const auto h = text::split(line, delimiter);
    const auto& cat = feature_catalog();
    bool ok = h.size() == kFeatureCount + 2 && h[kFeatureCount] == "emotion" && h[kFeatureCount + 1] == "condition";
    for (std::size_t i = 0; ok && i < kFeatureCount; ++i) ok = h[i] == cat[i];
    if (!ok) throw MalformedRow(reader.line_number(), "feature header does not match catalog version " + std::to_string(kCatalogVersion));
  }
  std::vector<FeatureVector> out;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto f = text::split(line, delimiter);
    if (f.size() != kFeatureCount + 2)
      throw MalformedRow(ln, "expected " + std::to_string(kFeatureCount + 2) + " columns");
    FeatureVector fv;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const auto v = text::parse_double(f[i]);
      if (!v || !std::isfinite(*v)) throw MalformedRow(ln, "bad value in column " + std::to_string(i + 1));
      fv.values[i] = *v;
    }
    const auto emo = text::parse_int(f[kFeatureCount]);
    const auto cond = text::parse_int(f[kFeatureCount + 1]);
    if (!emo || *emo < -1 || *emo > 1) throw MalformedRow(ln, "bad emotion");
    if (!cond || *cond < 0 || *cond > 2) throw MalformedRow(ln, "bad condition");
    fv.emotion = static_cast<int>(*emo);
    fv.condition = static_cast<int>(*cond);
    out.push_back(fv);
  }
  return out;
}

}  // namespace emowalk::features
