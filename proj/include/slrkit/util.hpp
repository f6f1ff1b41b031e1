#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit {

/// Reads a whole file as bytes; throws IngestError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Reads a file and checks it decodes as UTF-8.
std::string read_utf8_file(const std::filesystem::path& path);

/// Writes bytes, creating parent directories. Throws Error on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Splits on any of the separator characters, trims pieces and drops empty ones.
std::vector<std::string> split_list(std::string_view s, std::string_view seps = ",;");
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::string ascii_lower(std::string_view s);

/// Fixed-point formatting with `decimals` digits; -0 prints as 0.
std::string format_fixed(double value, int decimals);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// fn must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

/// RFC 4180 records; accepts CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string sha256_hex(std::string_view data);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_now_iso8601();
bool is_iso8601_utc(std::string_view s);

}  // namespace slrkit
