#pragma once

#include <string>
#include <vector>

namespace powerflow {

/// Shortest decimal form that parses back to the identical double.
/// Keeps every CSV/DOT export byte-stable and round-trip exact.
std::string format_double(double value);

/// Parses a full-field double; returns false on trailing junk or empty input.
bool parse_double(const std::string& text, double& out);
bool parse_int(const std::string& text, int& out);

/// Splits on commas. The formats here carry no quoting or escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Removes a trailing carriage return, for CRLF input.
std::string strip_cr(std::string line);

}  // namespace powerflow
