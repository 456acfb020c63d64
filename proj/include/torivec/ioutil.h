#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace torivec {

// Shortest decimal form that parses back to the same double. Used for every
// numeric value we persist so reruns are byte-identical.
std::string format_double(double v);

// Strict double parse; the whole field must be consumed.
bool parse_double(std::string_view field, double& out);

std::vector<std::string_view> split_csv_line(std::string_view line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

std::uint32_t crc32(const void* data, std::size_t len);
std::uint32_t crc32_file(const std::string& path);

// Path stem without directory or extension ("a/b/song.csv" -> "song").
std::string path_stem(const std::string& path);

// `relative` resolved against the directory of `anchor_file` unless absolute.
std::string resolve_relative(const std::string& anchor_file, const std::string& relative);

}  // namespace torivec
