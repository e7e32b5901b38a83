#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Study encoding file, raw per-participant sensor streams, and the slicing of
// raw streams into labeled walks.
namespace emowalk::ingest {

/// Emotion labels as they appear in every downstream file.
inline constexpr int kHappy = 1;
inline constexpr int kNeutral = 0;
inline constexpr int kSad = -1;

enum class Stimulus { Movie, Music, MusicWhileWalking };
enum class Sex { F, M };

/// Maps a condition-code prefix ("Mo", "Mu", "Mw") to a condition integer.
using PrefixMap = std::map<std::string, int, std::less<>>;
PrefixMap default_prefix_map();

struct ConditionDecoding {
  Stimulus stimulus = Stimulus::Movie;
  int condition = 0;
  std::array<int, 3> emotion_order{};  // one label per walk, in walk order
};

/// "Mo-SNH" -> (Movie, condition 0, [sad, neutral, happy]).
ConditionDecoding decode_condition_code(std::string_view code,
                                        const PrefixMap& prefixes = default_prefix_map());

Stimulus stimulus_for_condition(int condition);

/// Closed interval of milliseconds since midnight.
struct WalkInterval {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  bool contains(std::int64_t t) const noexcept { return t >= start_ms && t <= end_ms; }
};

struct EncodingRecord {
  std::string participant_id;
  std::string condition_code;
  int age = 0;
  Sex sex = Sex::F;
  std::array<WalkInterval, 3> walks{};
  ConditionDecoding decoding;
};

struct RawSample {
  std::int64_t t_ms = 0;
  double ax = 0, ay = 0, az = 0;
  double ax_g = 0, ay_g = 0, az_g = 0;
  double rot_x = 0, rot_y = 0, rot_z = 0;
  int heart = 0;
};

struct WalkingSample {
  int condition = 0;
  int emotion = 0;
  double ax = 0, ay = 0, az = 0;
  double rot_x = 0, rot_y = 0, rot_z = 0;
  double heart = 0;

  friend bool operator==(const WalkingSample&, const WalkingSample&) = default;
};

inline constexpr int kMinHeart = 25;
inline constexpr int kMaxHeart = 250;

/// "HH.MM.SS" -> ms since midnight. Returns -1 when unparsable.
std::int64_t parse_dotted_time(std::string_view s) noexcept;
/// "HH:MM:SS:mmm" -> ms since midnight. Returns -1 when unparsable.
std::int64_t parse_stream_time(std::string_view s) noexcept;

std::vector<EncodingRecord> parse_encoding(std::string_view content, char delimiter = ',',
                                           const PrefixMap& prefixes = default_prefix_map());

struct RawParseOptions {
  char delimiter = ',';
  bool strict = true;  // abort on the first malformed row; otherwise skip it with a warning
};

struct RawStream {
  std::vector<RawSample> samples;
  std::vector<std::string> warnings;
};

RawStream parse_raw_stream(std::string_view content, const RawParseOptions& opts = {});

struct WalkingData {
  std::vector<WalkingSample> samples;
  std::vector<std::string> warnings;  // one per empty walk
};

WalkingData build_walking_data(std::span<const RawSample> raw, const EncodingRecord& rec);

inline constexpr std::string_view kEncodingHeader =
    "participant_id,condition,age,sex,start_w1,end_w1,start_w2,end_w2,start_w3,end_w3";
inline constexpr std::string_view kRawHeader =
    "time,ax,ay,az,ax_g,ay_g,az_g,rot_x,rot_y,rot_z,heart";
inline constexpr std::string_view kWalkingHeader =
    "condition,emotion,ax,ay,az,rot_x,rot_y,rot_z,heart";

std::string format_dotted_time(std::int64_t ms);
std::string format_stream_time(std::int64_t ms);

std::string write_walking_csv(std::span<const WalkingSample> samples, char delimiter = ',');
std::vector<WalkingSample> read_walking_csv(std::string_view content, char delimiter = ',');

/// True when `participant_id` occurs in the file stem bounded by non-alphanumeric
/// characters: "EW2" matches "EW2.csv" and "raw_EW2.csv" but not "EW20.csv".
bool filename_matches(const std::filesystem::path& file, std::string_view participant_id);

/// Files in `dir` (sorted by name) that belong to `participant_id`.
std::vector<std::filesystem::path> find_participant_files(const std::filesystem::path& dir,
                                                          std::string_view participant_id);

}  // namespace emowalk::ingest
