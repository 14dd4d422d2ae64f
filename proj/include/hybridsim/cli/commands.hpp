#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

#include "hybridsim/cli/config.hpp"
#include "hybridsim/cli/csv.hpp"
#include "hybridsim/spectroscopy.hpp"

namespace hybridsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDiagnosticError = 3, kIoError = 4 };

// Maps an in-flight exception to the process exit code.
int exit_code_for(const std::exception& e);

// Runs body(i) for i in [0, n) on `jobs` threads (0: hardware concurrency).
// The first exception thrown by any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

// P_ac on an (omega_m, omega_a) grid. Rows: omega_m outer, omega_a inner.
Table anticross_table(const Config& c, unsigned jobs);

struct BandwidthReport {
    BandwidthResult<double> lower;
    BandwidthResult<double> upper;
    Table curve;  // per sweep point: both branches' frequencies, power and q
};

BandwidthReport bandwidth_report(const Config& c);

struct PulseRun {
    Table summary;  // b0_tesla, omega_minus_hz, q_mean, q_std, n_shots, status
    Table shots;    // b0_tesla, shot, q_raw
};

PulseRun pulse_run(const Config& c, unsigned jobs);

struct SpectrumRun {
    Table table;  // b0_tesla, frequency_hz, s21_mag_sq
    std::vector<FieldSpectrum> spectra;
};

SpectrumRun spectrum_run(const Config& c, unsigned jobs);

struct CommandOptions {
    Config config;
    std::filesystem::path out;
    unsigned jobs = 0;
    bool svg = false;
};

// Writes the command's CSV (and SVG when asked) and prints a short report.
void run_command(const std::string& name, const CommandOptions& opt, std::ostream& report);

} // namespace hybridsim::cli
