#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sgrf::csv {

// Minimal comma-separated handling: no quoting, empty field = missing value.
// Trailing '\r' is stripped so files from either line convention load.

std::vector<std::string> split_line(const std::string& line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table parse(const std::string& text);

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

// Strict full-cell parse; returns nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& cell);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sgrf::csv
