#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pitcal::csv {

/// Shortest round-trip decimal representation; keeps emitted files
/// byte-identical across runs.
std::string number(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; -1 if absent.
    int column(const std::string& name) const;
};

/// Reads a comma-separated file with a header line. No quoting support; the
/// formats in this project never embed commas.
Table read_file(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

/// Parses a double; throws std::invalid_argument with context on failure.
double parse_number(const std::string& field, const std::string& context);

} // namespace pitcal::csv
