#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace compsupp::io {

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double x);

/// Parses a double; throws InputError on trailing garbage.
double parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a numeric CSV, skipping one header line when `has_header`.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, bool has_header);

void write_csv_row(std::ostream& out, std::span<const double> row);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace compsupp::io
