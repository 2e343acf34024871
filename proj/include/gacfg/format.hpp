#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gacfg {

/// Shortest decimal text that parses back to the same double. Infinities
/// print as "Inf" / "-Inf", NaN as "NaN".
std::string format_double(double value);

/// Parses text written by format_double; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

/// Splits one CSV line on commas (no quoting; our files never need it).
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace gacfg
