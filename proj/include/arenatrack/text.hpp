#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arenatrack {

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_lines(const std::string& text);

// Accepts a decimal comma ("9,5") and forms like "1.E-06".
std::optional<double> parse_number(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

// Six significant digits, shortest form ("225.131", "1e-06", "0").
std::string format_number(double v);

std::string read_file(const std::string& path);
// Throws IoError when the file cannot be created or written.
void write_file(const std::string& path, const std::string& content);

}  // namespace arenatrack
