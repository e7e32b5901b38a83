#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Synthetic cohorts in the encoding/raw file formats, with emotion-dependent
// gait and heart rate. At separability 0 the label carries no signal.
namespace emowalk::synth {

struct SynthSpec {
  int n_users = 20;
  std::vector<int> conditions{0};
  double walk_duration_s = 30.0;
  double sample_rate_hz = 32.0;
  double separability = 1.0;
  std::uint64_t seed = 42;
  std::size_t window_len = 64;  // each walk must hold at least one window

  /// InvalidSpec on any violation.
  void validate() const;
};

/// Emotion effects at separability 1; everything interpolates linearly toward
/// the neutral value as separability goes to 0.
struct SignalModel {
  double cadence_hz[3] = {1.6, 1.8, 2.0};  // sad, neutral, happy
  double amplitude[3] = {0.8, 1.0, 1.2};   // m/s^2
  double heart_offset[3] = {-5.0, 0.0, 10.0};
  double accel_noise = 0.3;      // m/s^2 per sample
  double gyro_noise = 6.0;       // deg/s per sample
  double heart_noise = 6.0;      // bpm, stationary spread around the walking level
  double heart_tau_s = 1.0;      // correlation time of heart fluctuations
  double stride_jitter = 0.05;   // relative cadence spread per cycle
  double stride_amp_jitter = 0.15;
  double walking_heart_rise = 15.0;  // bpm above resting while walking
  double walk_length_jitter = 0.2;   // each walk lasts duration * U(1 - j, 1 + j)
  /// Per-user responsiveness, drawn separately for gait (cadence, amplitude)
  /// and heart rate, uniform in [lo, hi]; scales that user's emotion effects.
  double gait_response_lo = 0.0;
  double gait_response_hi = 0.5;
  double heart_response_lo = 0.2;
  double heart_response_hi = 1.0;
};

struct ParticipantFiles {
  std::string participant_id;
  int condition = 0;
  std::string raw_csv;
};

struct Cohort {
  std::string encoding_csv;
  std::vector<ParticipantFiles> participants;  // encoding-row order
};

/// Participant "SW<condition><user:03>", e.g. SW0007.
std::string participant_id(int condition, int user);

Cohort generate_cohort(const SynthSpec& spec, const SignalModel& model = {});

/// Writes encoding.csv and raw/<participant>.csv under `dir`.
void write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

}  // namespace emowalk::synth
