#include "hybridsim/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim::cli {

void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size()) {
        throw Error(fmt::format("row has {} cells, table has {} columns", row.size(), columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) return i;
    }
    throw Error(fmt::format("no column '{}'", column));
}

double Table::number(std::size_t row, const std::string& column) const
{
    const Cell& c = rows.at(row).at(column_index(column));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw Error(fmt::format("column '{}' is not numeric", column));
}

std::string format_cell(const Cell& c)
{
    return std::visit([](const auto& v) { return fmt::format("{}", v); }, c);
}

void write_csv(std::ostream& out, const Table& t, const std::string& command, const Config& config)
{
    out << "# hybridsim " << HYBRIDSIM_VERSION << '\n';
    out << "# command: " << command << '\n';
    out << "# config_sha256: " << config.digest() << '\n';
    for (const auto& line : config.canonical_lines()) out << "# config: " << line << '\n';
    out << boost::algorithm::join(t.columns, ",") << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_cell(row[i]);
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Table& t, const std::string& command,
               const Config& config)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    write_csv(out, t, command, config);
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

Table read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#") || line.empty()) continue;
        std::vector<std::string> parts;
        boost::algorithm::split(parts, line, boost::algorithm::is_any_of(","));
        if (t.columns.empty()) {
            t.columns = parts;
            continue;
        }
        std::vector<Cell> row;
        for (const auto& p : parts) {
            double v = 0;
            const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
            if (ec == std::errc() && ptr == p.data() + p.size() && !p.empty()) {
                row.emplace_back(v);
            } else {
                row.emplace_back(p);
            }
        }
        t.add(std::move(row));
    }
    return t;
}

} // namespace hybridsim::cli
