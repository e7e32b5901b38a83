#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emowalk/ingest.hpp"

// Windowing, accelerometer denoising and the 107-value per-window feature vector.
namespace emowalk::features {

using ingest::WalkingSample;

inline constexpr std::size_t kFeatureCount = 107;
inline constexpr int kCatalogVersion = 1;

struct WindowingConfig {
  std::size_t window_len = 64;
  double overlap = 0.5;
  double frequency_rate = 32.0;  // Hz, nominal

  /// round(window_len * (1 - overlap)); throws InvalidConfig when the
  /// configuration is unusable.
  std::size_t stride() const;
  void validate() const;
};

struct Window {
  std::vector<WalkingSample> samples;
  int condition = 0;
  int emotion = 0;
  std::size_t start = 0;  // index of the first sample in the source sequence
};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  int emotion = 0;
  int condition = 0;
};

/// Windows over each maximal run of equal (condition, emotion). A run of n
/// samples yields floor((n - len) / stride) + 1 windows, or none when n < len.
std::vector<Window> segment_windows(std::span<const WalkingSample> samples, const WindowingConfig& cfg);

/// Closed-form window count for one run.
std::size_t window_count(std::size_t run_len, std::size_t window_len, std::size_t stride) noexcept;

/// 3-point median on a series, edges replicate the boundary sample.
std::vector<double> median3(std::span<const double> x);

/// Median-filters ax/ay/az; gyro and heart are left alone.
Window denoise_accel(Window window);

/// Fixed, versioned feature order. 9 channels x 11 statistics, then the three
/// gravity-free tilt angles, three accelerometer correlations and two SMA terms.
const std::array<std::string, kFeatureCount>& feature_catalog();

/// Index of a catalog name, or kFeatureCount when absent.
std::size_t feature_index(std::string_view name);

FeatureVector extract_features(const Window& window);

// Per-channel statistics, in catalog order.
enum Stat : std::size_t { Mean, Std, Min, Max, Range, Median, Rms, Iqr, Mad, Skew, Kurtosis, kStatCount };

/// Population moments; a constant series has std, skewness and excess
/// kurtosis of exactly 0.
std::array<double, kStatCount> channel_stats(std::span<const double> x);

/// Pearson correlation; 0 when either series is constant.
double correlation(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated quantile of sorted data (numpy's default).
double quantile_sorted(std::span<const double> sorted, double q);

std::string write_feature_csv(std::span<const FeatureVector> rows, char delimiter = ',');
std::vector<FeatureVector> read_feature_csv(std::string_view content, char delimiter = ',');

}  // namespace emowalk::features
