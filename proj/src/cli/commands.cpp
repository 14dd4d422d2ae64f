#include "hybridsim/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "hybridsim/cli/svg.hpp"
#include "hybridsim/errors.hpp"
#include "hybridsim/timedomain.hpp"
#include "hybridsim/units.hpp"

namespace hybridsim::cli {

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e)) return kConfigError;
    if (dynamic_cast<const IoError*>(&e)) return kIoError;
    return kDiagnosticError;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body)
{
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

namespace {

std::vector<double> omega_m_grid(const SweepAxis& axis)
{
    std::vector<double> out;
    for (double v : axis.values()) out.push_back(omega_m_for(axis, v));
    return out;
}

SweepAxis magnon_axis(const Config& c)
{
    auto axis = sweep_axis(c);
    if (axis.quantity != "b0" && axis.quantity != "omega_m") {
        throw ConfigError("sweep.quantity must be b0 or omega_m for this command");
    }
    return axis;
}

} // namespace

Table anticross_table(const Config& c, unsigned jobs)
{
    const auto axis = magnon_axis(c);
    const auto wm = omega_m_grid(axis);
    const double wa_start = c.get_double("sweep.omega_a_start_hz");
    const double wa_stop = c.get_double("sweep.omega_a_stop_hz");
    const long long wa_points = c.get_int("sweep.omega_a_points");
    if (wa_points < 2) throw ConfigError("sweep.omega_a_points must be >= 2");
    if (!(wa_start > 0 && wa_start < wa_stop)) throw ConfigError("sweep.omega_a range must be positive and increasing");
    const SweepAxis wa_axis{"omega_a", wa_start, wa_stop, static_cast<int>(wa_points)};
    const auto wa = wa_axis.values();

    const auto base = mode_system(c);
    const auto drive = axion_drive(c);

    std::vector<double> power(wm.size() * wa.size());
    parallel_for(wm.size(), jobs, [&](std::size_t i) {
        auto sys = base;
        for (auto& m : sys.magnons) m.omega = wm[i];
        for (std::size_t j = 0; j < wa.size(); ++j) {
            power[i * wa.size() + j] = deposited_power(sys, drive.at(hz_to_angular(wa[j])));
        }
    });

    Table t;
    t.columns = {"omega_m_hz", "omega_a_hz", "p_ac"};
    for (std::size_t i = 0; i < wm.size(); ++i) {
        for (std::size_t j = 0; j < wa.size(); ++j) {
            t.add({angular_to_hz(wm[i]), wa[j], power[i * wa.size() + j]});
        }
    }
    return t;
}

BandwidthReport bandwidth_report(const Config& c)
{
    const auto p = system_params(c);
    const auto drive = axion_drive(c).at(p.omega_c);
    // Bandwidth first: it carries the diagnostics for g_cm = 0 and friends.
    BandwidthReport r{dynamical_bandwidth(p, drive, Branch::lower), dynamical_bandwidth(p, drive, Branch::upper), {}};

    const auto axis = magnon_axis(c);
    const auto wm = omega_m_grid(axis);
    std::vector<double> lower_grid, upper_grid;
    for (double w : wm) {
        lower_grid.push_back(hybrid_frequency(p.with_omega_m(w), Branch::lower));
        upper_grid.push_back(hybrid_frequency(p.with_omega_m(w), Branch::upper));
    }
    const auto lower = transduction_curve(p, drive, Branch::lower, std::span<const double>(lower_grid));
    const auto upper = transduction_curve(p, drive, Branch::upper, std::span<const double>(upper_grid));

    r.curve.columns = {"omega_m_hz", "omega_minus_hz", "omega_plus_hz", "p_minus", "p_plus", "q_minus", "q_plus"};
    for (std::size_t i = 0; i < wm.size(); ++i) {
        r.curve.add({angular_to_hz(wm[i]), angular_to_hz(lower[i].omega), angular_to_hz(upper[i].omega),
                     lower[i].power, upper[i].power, lower[i].q, upper[i].q});
    }
    return r;
}

PulseRun pulse_run(const Config& c, unsigned jobs)
{
    const auto axis = magnon_axis(c);
    const auto values = axis.values();
    const auto p = system_params(c);

    const long long shots = c.get_int("pulse.shots", 1);
    if (shots < 1) throw ConfigError("pulse.shots must be >= 1");
    PulseConfig pulse;
    pulse.t0 = c.get_double("pulse.t0_s", 0.0);
    pulse.amplitude = c.get_double("pulse.amplitude", 1.0);
    pulse.jitter = c.get_double("pulse.jitter", 0.0);
    if (!(pulse.jitter >= 0)) throw ConfigError("pulse.jitter must be non-negative");
    const double dt = c.get_double("pulse.dt_s", 2e-10);
    if (!(dt > 0)) throw ConfigError("pulse.dt_s must be positive");

    const double if_offset = hz_to_angular(c.get_double("heterodyne.if_offset_hz", 2e6));
    const double band = hz_to_angular(c.get_double("heterodyne.band_hz", 10e6));
    const bool fixed_lo = c.has("heterodyne.lo_hz");
    const double lo = fixed_lo ? hz_to_angular(c.get_double("heterodyne.lo_hz")) : 0.0;
    if (!(band > 0)) throw ConfigError("heterodyne.band_hz must be positive");
    const std::uint64_t base_seed = seed(c);

    const double tau_h = 1.0 / p.hybrid_linewidth();
    // One extra step so the metric window is covered despite rounding.
    const double duration = 4.0 * tau_h + dt;

    struct PointResult {
        double omega_minus = 0.0;
        std::vector<double> q;
        bool in_band = true;
    };
    std::vector<PointResult> results(values.size());

    parallel_for(values.size(), jobs, [&](std::size_t i) {
        const auto pi = p.with_omega_m(omega_m_for(axis, values[i]));
        auto& res = results[i];
        res.omega_minus = hybrid_frequency(pi, Branch::lower);
        const HeterodyneConfig het{fixed_lo ? lo : res.omega_minus + if_offset, band, Branch::lower};
        for (long long s = 0; s < shots; ++s) {
            // Seeded per (point, shot) so results do not depend on scheduling.
            std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                              static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(s)};
            std::mt19937_64 rng(seq);
            auto shot = pulse;
            shot.amplitude *= draw_jitter_factor(pulse.jitter, rng);
            const auto trace = ring_down(pi, shot, duration, dt);
            try {
                const auto r = heterodyne_downconvert(trace, het);
                res.q.push_back(pulse_metric(r, pulse.t0, tau_h));
            } catch (const DiagnosticError&) {
                res.in_band = false;
                res.q.clear();
                return;
            }
        }
    });

    double scale = 0.0;
    for (const auto& r : results) {
        if (r.in_band) scale = std::max(scale, shot_average(r.q).mean);
    }
    if (!(scale > 0)) throw DiagnosticError("no sweep point produced a signal inside the heterodyne band");

    PulseRun run;
    run.summary.columns = {"b0_tesla", "omega_minus_hz", "q_mean", "q_std", "n_shots", "status"};
    run.shots.columns = {"b0_tesla", "shot", "q_raw"};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& r = results[i];
        const double b0 = axis.quantity == "b0" ? values[i] : field_for_larmor(hz_to_angular(values[i]));
        if (!r.in_band) {
            run.summary.add({b0, angular_to_hz(r.omega_minus), std::nan(""), std::nan(""), 0LL,
                             std::string("out_of_band")});
            continue;
        }
        const auto st = shot_average(r.q);
        run.summary.add({b0, angular_to_hz(r.omega_minus), st.mean / scale, st.stddev / scale,
                         static_cast<long long>(st.count), std::string("ok")});
        for (std::size_t s = 0; s < r.q.size(); ++s) {
            run.shots.add({b0, static_cast<long long>(s), r.q[s]});
        }
    }
    return run;
}

SpectrumRun spectrum_run(const Config& c, unsigned jobs)
{
    const auto p = system_params(c);
    const auto fields = c.get_list("spectrum.b0_tesla");
    const double f0 = c.get_double("spectrum.start_hz");
    const double f1 = c.get_double("spectrum.stop_hz");
    const long long n = c.get_int("spectrum.points");
    if (n < 2) throw ConfigError("spectrum.points must be >= 2");
    if (!(f0 > 0 && f0 < f1)) throw ConfigError("spectrum frequency range must be positive and increasing");
    for (double b : fields) {
        if (b < 0) throw ConfigError("spectrum.b0_tesla entries must be non-negative");
    }
    const auto grid = SweepAxis{"frequency", f0, f1, static_cast<int>(n)}.values();

    SpectrumRun run;
    run.spectra.resize(fields.size());
    parallel_for(fields.size(), jobs, [&](std::size_t i) {
        run.spectra[i] = {fields[i], transmission_spectrum(p.with_omega_m(larmor_frequency(fields[i])), grid)};
    });

    run.table.columns = {"b0_tesla", "frequency_hz", "s21_mag_sq"};
    for (const auto& fs : run.spectra) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            run.table.add({fs.b0, fs.spectrum.frequencies[k], fs.spectrum.magnitude_sq[k]});
        }
    }
    return run;
}

namespace {

std::filesystem::path default_out(const CommandOptions& opt, const std::string& name)
{
    return opt.out.empty() ? std::filesystem::path(name + ".csv") : opt.out;
}

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix)
{
    auto p = out;
    p.replace_extension();
    return p.string() + suffix;
}

std::vector<double> column(const Table& t, const std::string& name)
{
    std::vector<double> v;
    for (std::size_t i = 0; i < t.rows.size(); ++i) v.push_back(t.number(i, name));
    return v;
}

void cmd_anticross(const CommandOptions& opt, std::ostream& report)
{
    const auto t = anticross_table(opt.config, opt.jobs);
    const auto out = default_out(opt, "anticross");
    write_csv(out, t, "anticross", opt.config);
    report << fmt::format("wrote {} grid points to {}\n", t.rows.size(), out.string());
    if (!opt.svg) return;

    const auto wm = column(t, "omega_m_hz");
    const auto wa = column(t, "omega_a_hz");
    const auto pac = column(t, "p_ac");
    const std::size_t nx = static_cast<std::size_t>(opt.config.get_int("sweep.omega_a_points"));
    std::vector<double> x(wa.begin(), wa.begin() + static_cast<std::ptrdiff_t>(nx));
    std::vector<double> y;
    for (std::size_t i = 0; i < wm.size(); i += nx) y.push_back(wm[i]);
    // Plotted as omega_a (vertical) against omega_m (horizontal).
    std::vector<double> z(pac.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = 0; j < nx; ++j) z[j * y.size() + i] = std::log10(pac[i * nx + j]);
    }
    write_heatmap(sibling(out, ".svg"), "log10 P_ac", "omega_m / 2pi [Hz]", "omega_a / 2pi [Hz]", y, x, z);
}

void cmd_bandwidth(const CommandOptions& opt, std::ostream& report)
{
    const auto r = bandwidth_report(opt.config);
    const auto out = default_out(opt, "bandwidth");
    write_csv(out, r.curve, "bandwidth", opt.config);
    for (const auto* b : {&r.lower, &r.upper}) {
        report << fmt::format("{}-branch bandwidth: {:.3f} MHz (field tuning; {:.3f} MHz in hybrid frequency), "
                              "peak at omega_m - omega_c = {:+.3f} MHz\n",
                              to_string(b->branch), angular_to_hz(b->tuning_width) * 1e-6,
                              angular_to_hz(b->hybrid_width) * 1e-6,
                              angular_to_hz(b->peak_omega_m - system_params(opt.config).omega_c) * 1e-6);
    }
    report << fmt::format("wrote transduction curve to {}\n", out.string());
    if (opt.svg) {
        write_line_plot(sibling(out, ".svg"), "Transduction", "omega_m / 2pi [Hz]", "q",
                        {{"lower", column(r.curve, "omega_m_hz"), column(r.curve, "q_minus")},
                         {"upper", column(r.curve, "omega_m_hz"), column(r.curve, "q_plus")}});
    }
}

void cmd_pulse(const CommandOptions& opt, std::ostream& report)
{
    const auto run = pulse_run(opt.config, opt.jobs);
    const auto out = default_out(opt, "pulse");
    write_csv(out, run.summary, "pulse", opt.config);
    write_csv(sibling(out, ".shots.csv"), run.shots, "pulse", opt.config);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < run.summary.rows.size(); ++i) {
        if (std::get<std::string>(run.summary.rows[i].back()) != "ok") {
            ++flagged;
            report << fmt::format("warning: b0 = {} T: hybrid tone outside the heterodyne band\n",
                                  run.summary.number(i, "b0_tesla"));
        }
    }
    report << fmt::format("wrote {} points ({} flagged) to {}\n", run.summary.rows.size(), flagged, out.string());
    if (opt.svg) {
        write_line_plot(sibling(out, ".svg"), "Pulse metric", "omega_- / 2pi [Hz]", "q (normalised)",
                        {{"q_mean", column(run.summary, "omega_minus_hz"), column(run.summary, "q_mean"), true}});
    }
}

void cmd_spectrum(const CommandOptions& opt, std::ostream& report)
{
    const auto run = spectrum_run(opt.config, opt.jobs);
    const auto out = default_out(opt, "spectrum");
    write_csv(out, run.table, "spectrum", opt.config);
    report << fmt::format("wrote {} spectra to {}\n", run.spectra.size(), out.string());
    try {
        const auto ex = extract_params(run.spectra);
        report << fmt::format("extracted: f_c = {:.6f} GHz, gamma_c = {:.4f} MHz, gamma_m = {:.4f} MHz, "
                              "g_cm = {:.4f} MHz, anticrossing at {:.5f} T\n",
                              angular_to_hz(ex.params.omega_c) * 1e-9, angular_to_hz(ex.params.gamma_c) * 1e-6,
                              angular_to_hz(ex.params.gamma_m) * 1e-6, angular_to_hz(ex.params.g_cm) * 1e-6,
                              ex.anticrossing_b0);
    } catch (const DiagnosticError& e) {
        report << "parameter extraction skipped: " << e.what() << '\n';
    }
    if (opt.svg) {
        std::vector<Series> series;
        for (const auto& fs : run.spectra) {
            series.push_back({fmt::format("B0 = {} T", fs.b0), fs.spectrum.frequencies, fs.spectrum.magnitude_sq});
        }
        write_line_plot(sibling(out, ".svg"), "Transmission", "frequency [Hz]", "|S21|^2", series);
    }
}

} // namespace

void run_command(const std::string& name, const CommandOptions& opt, std::ostream& report)
{
    if (name == "anticross") return cmd_anticross(opt, report);
    if (name == "bandwidth") return cmd_bandwidth(opt, report);
    if (name == "pulse") return cmd_pulse(opt, report);
    if (name == "spectrum") return cmd_spectrum(opt, report);
    throw ConfigError(fmt::format("unknown command '{}'", name));
}

} // namespace hybridsim::cli
