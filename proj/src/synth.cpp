#include "emowalk/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "emowalk/errors.hpp"
#include "emowalk/ingest.hpp"
#include "emowalk/rng.hpp"
#include "emowalk/text.hpp"

namespace emowalk::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGravity = 9.81;
constexpr std::int64_t kLeadRestS = 5;
constexpr std::int64_t kGapRestS = 10;

double lerp(double neutral, double target, double s) { return neutral + s * (target - neutral); }

double uniform(rng::Engine& eng, double lo, double hi) { return lo + (hi - lo) * rng::uniform01(eng); }

struct Person {
  double resting_heart = 0.0;
  double gait_response = 0.0;
  double heart_response = 0.0;
  std::array<double, 3> bias{}, weight{}, phase_offset{};
  std::array<double, 3> gyro_scale{}, gyro_offset{};
  std::array<double, 3> gravity{};
};

Person draw_person(rng::Engine& eng, const SignalModel& m) {
  Person p;
  p.resting_heart = uniform(eng, 60.0, 90.0);
  p.gait_response = uniform(eng, m.gait_response_lo, m.gait_response_hi);
  p.heart_response = uniform(eng, m.heart_response_lo, m.heart_response_hi);
  constexpr std::array<double, 3> base_weight{0.6, 1.0, 0.5};
  constexpr std::array<double, 3> base_phase{0.0, std::numbers::pi / 2.0, std::numbers::pi / 4.0};
  double norm = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    p.bias[k] = 0.1 * rng::normal(eng);
    p.weight[k] = base_weight[k] * uniform(eng, 0.8, 1.2);
    p.phase_offset[k] = base_phase[k] + uniform(eng, -0.3, 0.3);
    p.gyro_scale[k] = uniform(eng, 25.0, 45.0);
    p.gyro_offset[k] = uniform(eng, 0.0, kTwoPi);
    p.gravity[k] = k == 2 ? 1.0 : 0.2 * rng::normal(eng);
    norm += p.gravity[k] * p.gravity[k];
  }
  for (auto& g : p.gravity) g *= kGravity / std::sqrt(norm);
  return p;
}

// Gait oscillator with per-cycle cadence and amplitude jitter.
struct Gait {
  double phase = 0.0;
  double cadence = 0.0;
  double amplitude = 0.0;
  double cycle_rate = 0.0;
  double cycle_amp = 0.0;

  void new_cycle(rng::Engine& eng, const SignalModel& m) {
    cycle_rate = cadence * std::max(0.2, 1.0 + m.stride_jitter * rng::normal(eng));
    cycle_amp = amplitude * std::max(0.0, 1.0 + m.stride_amp_jitter * rng::normal(eng));
  }

  void advance(double dt_s, rng::Engine& eng, const SignalModel& m) {
    phase += kTwoPi * cycle_rate * dt_s;
    if (phase >= kTwoPi) {
      phase = std::fmod(phase, kTwoPi);
      new_cycle(eng, m);
    }
  }
};

std::string condition_code(int condition, const std::array<int, 3>& order) {
  static constexpr std::array<const char*, 3> prefix{"Mo", "Mu", "Mw"};
  std::string code = std::string(prefix[static_cast<std::size_t>(condition)]) + "-";
  for (int e : order) code += e == ingest::kHappy ? 'H' : e == ingest::kNeutral ? 'N' : 'S';
  return code;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_users < 1) throw InvalidSpec("n_users must be at least 1");
  if (n_users > 999) throw InvalidSpec("n_users must be at most 999");
  if (conditions.empty()) throw InvalidSpec("conditions must not be empty");
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i] < 0 || conditions[i] > 2) throw InvalidSpec("conditions must be drawn from {0, 1, 2}");
    if (std::find(conditions.begin(), conditions.begin() + static_cast<std::ptrdiff_t>(i), conditions[i]) !=
        conditions.begin() + static_cast<std::ptrdiff_t>(i))
      throw InvalidSpec("conditions must not repeat");
  }
  if (!(sample_rate_hz > 0.0 && sample_rate_hz <= 1000.0)) throw InvalidSpec("sample_rate_hz must lie in (0, 1000]");
  if (!(walk_duration_s >= 1.0 && walk_duration_s <= 3600.0))
    throw InvalidSpec("walk_duration_s must lie in [1, 3600]");
  if (!(separability >= 0.0 && separability <= 1.0)) throw InvalidSpec("separability must lie in [0, 1]");
  if (window_len < 2) throw InvalidSpec("window_len must be at least 2");
  if (std::round(walk_duration_s) * sample_rate_hz < static_cast<double>(window_len))
    throw InvalidSpec("walk_duration_s * sample_rate_hz must cover one window of " + std::to_string(window_len) +
                      " samples");
}

std::string participant_id(int condition, int user) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "SW%d%03d", condition, user);
  return buf;
}

Cohort generate_cohort(const SynthSpec& spec, const SignalModel& model) {
  spec.validate();
  Cohort cohort;
  cohort.encoding_csv = std::string(ingest::kEncodingHeader) + "\n";
  const double nominal_dt_ms = 1000.0 / spec.sample_rate_hz;

  for (int condition : spec.conditions) {
    for (int user = 1; user <= spec.n_users; ++user) {
      const std::string pid = participant_id(condition, user);
      rng::Engine eng(rng::derive(spec.seed, {rng::hash_string(pid)}));
      const Person person = draw_person(eng, model);
      const double sg = spec.separability * person.gait_response;
      const double sh = spec.separability * person.heart_response;

      std::array<int, 3> order{ingest::kSad, ingest::kNeutral, ingest::kHappy};
      rng::shuffle(eng, std::span<int>(order));
      const auto age = rng::uniform_int(eng, 19, 45);
      const char sex = rng::uniform_index(eng, 2) == 0 ? 'F' : 'M';

      const std::int64_t t0_s = 9 * 3600 + rng::uniform_int(eng, 0, 4 * 3600);
      std::array<std::int64_t, 3> start{}, end{};
      for (std::size_t w = 0; w < 3; ++w) {
        const double len = spec.walk_duration_s * uniform(eng, 1.0 - model.walk_length_jitter, 1.0 + model.walk_length_jitter);
        start[w] = (w == 0 ? t0_s + kLeadRestS : end[w - 1] + kGapRestS);
        end[w] = start[w] + std::max<std::int64_t>(1, std::llround(len));
      }

      std::string row = pid + "," + condition_code(condition, order) + "," + std::to_string(age) + "," + sex;
      for (std::size_t w = 0; w < 3; ++w)
        row += "," + ingest::format_dotted_time(start[w] * 1000) + "," + ingest::format_dotted_time(end[w] * 1000);
      cohort.encoding_csv += row + "\n";

      std::string raw = std::string(ingest::kRawHeader) + "\n";
      Gait gait;
      int active = -1;
      double heart_dev = model.heart_noise * rng::normal(eng);  // stationary AR(1)
      const std::int64_t stop_ms = (end[2] + kLeadRestS) * 1000;
      for (std::int64_t t = t0_s * 1000; t <= stop_ms;) {
        int walk = -1;
        for (int w = 0; w < 3; ++w)
          if (t >= start[static_cast<std::size_t>(w)] * 1000 && t <= end[static_cast<std::size_t>(w)] * 1000) walk = w;

        std::array<double, 3> acc{}, rot{};
        double heart = person.resting_heart;
        if (walk >= 0) {
          const int e = order[static_cast<std::size_t>(walk)] + 1;  // sad 0, neutral 1, happy 2
          if (walk != active) {
            active = walk;
            gait.phase = uniform(eng, 0.0, kTwoPi);
            gait.cadence = lerp(model.cadence_hz[1], model.cadence_hz[e], sg);
            gait.amplitude = lerp(model.amplitude[1], model.amplitude[e], sg);
            gait.new_cycle(eng, model);
          }
          for (std::size_t k = 0; k < 3; ++k) {
            acc[k] = person.bias[k] +
                     person.weight[k] * gait.cycle_amp * std::sin(gait.phase + person.phase_offset[k]) +
                     model.accel_noise * rng::normal(eng);
            rot[k] = person.gyro_scale[k] * gait.cycle_amp * std::cos(gait.phase + person.gyro_offset[k]) +
                     model.gyro_noise * rng::normal(eng);
          }
          heart += model.walking_heart_rise + lerp(model.heart_offset[1], model.heart_offset[e], sh) + heart_dev;
        } else {
          active = -1;
          for (std::size_t k = 0; k < 3; ++k) {
            acc[k] = person.bias[k] + 0.05 * rng::normal(eng);
            rot[k] = rng::normal(eng);
          }
          heart += 0.5 * heart_dev;
        }
        const long bpm = std::clamp(std::lround(heart), static_cast<long>(ingest::kMinHeart),
                                    static_cast<long>(ingest::kMaxHeart));

        raw += ingest::format_stream_time(t);
        for (std::size_t k = 0; k < 3; ++k) raw += "," + text::fixed(acc[k], 2);
        for (std::size_t k = 0; k < 3; ++k) raw += "," + text::fixed(acc[k] + person.gravity[k], 2);
        for (std::size_t k = 0; k < 3; ++k) raw += "," + text::fixed(rot[k], 2);
        raw += "," + std::to_string(bpm) + "\n";

        const double dt_ms = nominal_dt_ms * (1.0 + uniform(eng, -0.1, 0.1));
        const auto step = std::max<std::int64_t>(1, std::llround(dt_ms));
        const double dt_s = static_cast<double>(step) / 1000.0;
        if (walk >= 0) gait.advance(dt_s, eng, model);
        const double a = std::exp(-dt_s / model.heart_tau_s);
        heart_dev = a * heart_dev + std::sqrt(1.0 - a * a) * model.heart_noise * rng::normal(eng);
        t += step;
      }
      cohort.participants.push_back({pid, condition, std::move(raw)});
    }
  }
  return cohort;
}

void write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  for (const auto& p : cohort.participants)
    text::write_file_atomic(dir / "raw" / (p.participant_id + ".csv"), p.raw_csv);
  text::write_file_atomic(dir / "encoding.csv", cohort.encoding_csv);
}

}  // namespace emowalk::synth
