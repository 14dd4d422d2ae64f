#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridsim/model.hpp"

namespace hybridsim::cli {

// Flat "section.key" -> value map. Values stay textual until a command asks
// for them, so unknown keys survive a round trip untouched.
class Config {
public:
    // Reads either an INI file or a CSV previously written by this tool (the
    // "# config:" metadata lines are parsed back).
    static Config load(const std::filesystem::path& path);
    static Config parse_ini(const std::string& text);

    // "key=value" from the command line.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    // One "key = value" line per entry, sorted by key.
    std::vector<std::string> canonical_lines() const;
    // Hex SHA-256 of the canonical lines joined by '\n'.
    std::string digest() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct SweepAxis {
    std::string quantity;  // b0, omega_m, omega_a or omega_minus
    double start = 0.0;    // tesla for b0, Hz otherwise
    double stop = 0.0;
    int points = 0;

    std::vector<double> values() const;
};

// Reads sweep.{quantity,start,stop,points} (or the given prefix).
SweepAxis sweep_axis(const Config& c, const std::string& prefix = "sweep");

// system.* in Hz, converted to rad/s; omega_m starts at omega_c.
HybridParams<double> system_params(const Config& c);
ModeSystem<double> mode_system(const Config& c);
// drive.g_am_hz / drive.n_a; the drive frequency is filled in per point.
AxionDrive<double> axion_drive(const Config& c);
std::uint64_t seed(const Config& c);

// Magnon angular frequency for a value on the given sweep axis.
double omega_m_for(const SweepAxis& axis, double value);

} // namespace hybridsim::cli
