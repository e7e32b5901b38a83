#include "emowalk/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "emowalk/errors.hpp"
#include "emowalk/text.hpp"

namespace emowalk::ingest {

namespace {

std::int64_t parse_hms(std::string_view s, char sep, bool with_millis) noexcept {
  const auto parts = text::split(text::trim(s), sep);
  if (parts.size() != (with_millis ? 4u : 3u)) return -1;
  std::array<long long, 4> v{};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) return -1;
    for (char c : parts[i])
      if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    const auto n = text::parse_int(parts[i]);
    if (!n) return -1;
    v[i] = *n;
  }
  if (v[0] > 23 || v[1] > 59 || v[2] > 59 || v[3] > 999) return -1;
  return v[0] * 3'600'000 + v[1] * 60'000 + v[2] * 1'000 + v[3];
}

int emotion_for_letter(char c) {
  switch (c) {
    case 'H': return kHappy;
    case 'N': return kNeutral;
    case 'S': return kSad;
    default: return 2;
  }
}

std::string header_string(std::span<const std::string_view> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

PrefixMap default_prefix_map() { return {{"Mo", 0}, {"Mu", 1}, {"Mw", 2}}; }

Stimulus stimulus_for_condition(int condition) {
  switch (condition) {
    case 0: return Stimulus::Movie;
    case 1: return Stimulus::Music;
    case 2: return Stimulus::MusicWhileWalking;
    default: throw UnknownConditionCode("condition must be 0, 1 or 2, got " + std::to_string(condition));
  }
}

ConditionDecoding decode_condition_code(std::string_view code, const PrefixMap& prefixes) {
  const std::string_view c = text::trim(code);
  const std::size_t dash = c.find('-');
  if (dash == std::string_view::npos || c.size() - dash - 1 != 3)
    throw UnknownConditionCode("unknown condition code '" + std::string(code) + "'");
  const auto it = prefixes.find(c.substr(0, dash));
  if (it == prefixes.end())
    throw UnknownConditionCode("unknown condition prefix in '" + std::string(code) + "'");

  ConditionDecoding d;
  d.condition = it->second;
  d.stimulus = stimulus_for_condition(d.condition);
  std::array<bool, 3> seen{};
  for (std::size_t i = 0; i < 3; ++i) {
    const int e = emotion_for_letter(c[dash + 1 + i]);
    if (e == 2 || seen[static_cast<std::size_t>(e + 1)])
      throw UnknownConditionCode("condition code '" + std::string(code) +
                                 "' must list each of H, N, S exactly once");
    seen[static_cast<std::size_t>(e + 1)] = true;
    d.emotion_order[i] = e;
  }
  return d;
}

std::int64_t parse_dotted_time(std::string_view s) noexcept { return parse_hms(s, '.', false); }
std::int64_t parse_stream_time(std::string_view s) noexcept { return parse_hms(s, ':', true); }

std::string format_dotted_time(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld.%02lld.%02lld", static_cast<long long>(ms / 3'600'000),
                static_cast<long long>(ms / 60'000 % 60), static_cast<long long>(ms / 1'000 % 60));
  return buf;
}

std::string format_stream_time(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld:%03lld",
                static_cast<long long>(ms / 3'600'000), static_cast<long long>(ms / 60'000 % 60),
                static_cast<long long>(ms / 1'000 % 60), static_cast<long long>(ms % 1'000));
  return buf;
}

std::vector<EncodingRecord> parse_encoding(std::string_view content, char delimiter,
                                           const PrefixMap& prefixes) {
  text::LineReader reader(content);
  std::string_view line;
  if (!reader.next(line)) throw MalformedRow(1, "missing header row");
  if (text::split(line, delimiter).size() != 10)
    throw MalformedRow(1, "encoding header must have 10 columns");

  std::vector<EncodingRecord> out;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto f = text::split(line, delimiter);
    if (f.size() != 10)
      throw MalformedRow(ln, "expected 10 columns, got " + std::to_string(f.size()));

    EncodingRecord rec;
    rec.participant_id = std::string(f[0]);
    if (rec.participant_id.empty()) throw MalformedRow(ln, "empty participant id");
    rec.condition_code = std::string(f[1]);
    try {
      rec.decoding = decode_condition_code(rec.condition_code, prefixes);
    } catch (const UnknownConditionCode& e) {
      throw UnknownConditionCode("line " + std::to_string(ln) + ": " + e.what());
    }
    const auto age = text::parse_int(f[2]);
    if (!age || *age < 0) throw MalformedRow(ln, "bad age '" + std::string(f[2]) + "'");
    rec.age = static_cast<int>(*age);
    if (f[3] == "F" || f[3] == "f") {
      rec.sex = Sex::F;
    } else if (f[3] == "M" || f[3] == "m") {
      rec.sex = Sex::M;
    } else {
      throw MalformedRow(ln, "bad sex '" + std::string(f[3]) + "'");
    }
    for (std::size_t w = 0; w < 3; ++w) {
      const auto start = parse_dotted_time(f[4 + 2 * w]);
      const auto end = parse_dotted_time(f[5 + 2 * w]);
      if (start < 0 || end < 0) throw MalformedRow(ln, "unparsable time in walk " + std::to_string(w + 1));
      if (start >= end) throw MalformedRow(ln, "walk " + std::to_string(w + 1) + " ends before it starts");
      if (w > 0 && start <= rec.walks[w - 1].end_ms)
        throw MalformedRow(ln, "walk " + std::to_string(w + 1) + " overlaps the previous walk");
      rec.walks[w] = {start, end};
    }
    out.push_back(std::move(rec));
  }
  return out;
}

RawStream parse_raw_stream(std::string_view content, const RawParseOptions& opts) {
  text::LineReader reader(content);
  std::string_view line;
  if (!reader.next(line)) throw MalformedRow(1, "missing header row");
  {
    const auto h = text::split(line, opts.delimiter);
    if (header_string(h) != kRawHeader)
      throw MalformedRow(1, "raw header must be '" + std::string(kRawHeader) + "'");
  }

  RawStream out;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    try {
      const auto f = text::split(line, opts.delimiter);
      if (f.size() != 11) throw MalformedRow(ln, "expected 11 columns, got " + std::to_string(f.size()));
      RawSample s;
      s.t_ms = parse_stream_time(f[0]);
      if (s.t_ms < 0) throw MalformedRow(ln, "bad timestamp '" + std::string(f[0]) + "'");
      std::array<double*, 9> dst{&s.ax, &s.ay, &s.az, &s.ax_g, &s.ay_g, &s.az_g, &s.rot_x, &s.rot_y, &s.rot_z};
      for (std::size_t i = 0; i < dst.size(); ++i) {
        const auto v = text::parse_double(f[i + 1]);
        if (!v || !std::isfinite(*v)) throw MalformedRow(ln, "bad numeric field '" + std::string(f[i + 1]) + "'");
        *dst[i] = *v;
      }
      const auto hr = text::parse_int(f[10]);
      if (!hr) throw MalformedRow(ln, "bad heart rate '" + std::string(f[10]) + "'");
      if (*hr < kMinHeart || *hr > kMaxHeart)
        throw MalformedRow(ln, "heart rate " + std::to_string(*hr) + " outside [25, 250]");
      s.heart = static_cast<int>(*hr);
      out.samples.push_back(s);
    } catch (const MalformedRow& e) {
      if (opts.strict) throw;
      out.warnings.push_back(std::string("skipped ") + e.what());
    }
  }
  return out;
}

WalkingData build_walking_data(std::span<const RawSample> raw, const EncodingRecord& rec) {
  std::vector<RawSample> sorted(raw.begin(), raw.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RawSample& a, const RawSample& b) { return a.t_ms < b.t_ms; });

  WalkingData out;
  const int condition = rec.decoding.condition;
  for (std::size_t w = 0; w < rec.walks.size(); ++w) {
    const auto& iv = rec.walks[w];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), iv.start_ms,
                               [](const RawSample& s, std::int64_t t) { return s.t_ms < t; });
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), iv.end_ms,
                               [](std::int64_t t, const RawSample& s) { return t < s.t_ms; });
    if (lo == hi) {
      out.warnings.push_back("participant " + rec.participant_id + " condition " + rec.condition_code +
                             ": walk " + std::to_string(w + 1) + " (" + format_dotted_time(iv.start_ms) +
                             "-" + format_dotted_time(iv.end_ms) + ") contains no samples");
      continue;
    }
    const int emotion = rec.decoding.emotion_order[w];
    for (auto it = lo; it != hi; ++it)
      out.samples.push_back({condition, emotion, it->ax, it->ay, it->az, it->rot_x, it->rot_y, it->rot_z,
                             static_cast<double>(it->heart)});
  }
  return out;
}

std::string write_walking_csv(std::span<const WalkingSample> samples, char delimiter) {
  std::string out;
  for (char c : kWalkingHeader) out += (c == ',' ? delimiter : c);
  out += '\n';
  for (const auto& s : samples) {
    out += std::to_string(s.condition);
    for (const std::string& v :
         {std::to_string(s.emotion), text::format_double(s.ax), text::format_double(s.ay),
          text::format_double(s.az), text::format_double(s.rot_x), text::format_double(s.rot_y),
          text::format_double(s.rot_z), text::format_double(s.heart)}) {
      out += delimiter;
      out += v;
    }
    out += '\n';
  }
  return out;
}

std::vector<WalkingSample> read_walking_csv(std::string_view content, char delimiter) {
  text::LineReader reader(content);
  std::string_view line;
  if (!text::next_header(reader, line) || header_string(text::split(line, delimiter)) != kWalkingHeader)
    throw MalformedRow(reader.line_number(), "walking header must be '" + std::string(kWalkingHeader) + "'");
  std::vector<WalkingSample> out;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto f = text::split(line, delimiter);
    if (f.size() != 9) throw MalformedRow(ln, "expected 9 columns, got " + std::to_string(f.size()));
    WalkingSample s;
    const auto cond = text::parse_int(f[0]);
    const auto emo = text::parse_int(f[1]);
    if (!cond || *cond < 0 || *cond > 2) throw MalformedRow(ln, "bad condition");
    if (!emo || *emo < -1 || *emo > 1) throw MalformedRow(ln, "bad emotion");
    s.condition = static_cast<int>(*cond);
    s.emotion = static_cast<int>(*emo);
    std::array<double*, 7> dst{&s.ax, &s.ay, &s.az, &s.rot_x, &s.rot_y, &s.rot_z, &s.heart};
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const auto v = text::parse_double(f[i + 2]);
      if (!v || !std::isfinite(*v)) throw MalformedRow(ln, "bad numeric field '" + std::string(f[i + 2]) + "'");
      *dst[i] = *v;
    }
    out.push_back(s);
  }
  return out;
}

bool filename_matches(const std::filesystem::path& file, std::string_view participant_id) {
  if (participant_id.empty()) return false;
  const std::string stem = file.stem().string();
  const auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t pos = stem.find(participant_id); pos != std::string::npos;
       pos = stem.find(participant_id, pos + 1)) {
    const std::size_t end = pos + participant_id.size();
    const bool left_ok = pos == 0 || !alnum(stem[pos - 1]);
    const bool right_ok = end == stem.size() || !alnum(stem[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::vector<std::filesystem::path> find_participant_files(const std::filesystem::path& dir,
                                                          std::string_view participant_id) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && filename_matches(entry.path(), participant_id)) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace emowalk::ingest
