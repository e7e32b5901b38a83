#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the CSV/YAML readers and writers.
namespace emowalk::text {

std::string_view trim(std::string_view s) noexcept;

/// Split on a single-character delimiter and trim each field.
std::vector<std::string_view> split(std::string_view line, char delim);

std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_int(std::string_view s) noexcept;

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// printf("%.*f")
std::string fixed(double v, int decimals);

std::string read_file(const std::filesystem::path& path);

/// Write to "<path>.tmp" then rename over path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Reads lines, stripping a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(std::string_view content) : rest_(content) {}
  bool next(std::string_view& line);
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::string_view rest_;
  std::size_t line_no_ = 0;
  bool done_ = false;
};

/// Next line that is neither blank nor a '#' comment.
bool next_header(LineReader& reader, std::string_view& line);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string hex_digest(std::string_view content);

}  // namespace emowalk::text
