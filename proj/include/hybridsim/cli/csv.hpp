#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hybridsim/cli/config.hpp"

namespace hybridsim::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    double number(std::size_t row, const std::string& column) const;
    std::size_t column_index(const std::string& column) const;
};

// Shortest representation that reads back to the same double.
std::string format_cell(const Cell& c);

// '#' metadata block (tool version, command, config digest, config lines),
// then the header and one line per row.
void write_csv(std::ostream& out, const Table& t, const std::string& command, const Config& config);
void write_csv(const std::filesystem::path& path, const Table& t, const std::string& command,
               const Config& config);

// Data rows of a CSV written by write_csv (metadata skipped).
Table read_csv(const std::filesystem::path& path);

} // namespace hybridsim::cli
