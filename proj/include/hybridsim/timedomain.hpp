#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hybridsim/model.hpp"

namespace hybridsim {

using cdouble = std::complex<double>;

enum class Frame { rotating, lab };

struct IntegratorOptions {
    Frame frame = Frame::rotating;
    // Reference frequency of the rotating frame. Unset: the drive frequency for
    // driven runs, omega_c for ring-downs.
    std::optional<double> frame_omega;
};

// Complex mode amplitudes on a uniform time grid. Samples are stored in the
// frame rotating at frame_omega (0 for the lab frame); lab-frame values are
// recovered by multiplying with exp(-i frame_omega t).
struct FieldTrace {
    double t0 = 0.0;
    double dt = 0.0;
    double frame_omega = 0.0;
    std::vector<cdouble> m_amp;
    std::vector<cdouble> c_amp;
    HybridParams<double> params;

    std::size_t size() const { return c_amp.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    std::vector<double> times() const;

    cdouble lab_phase(std::size_t i) const;
    cdouble magnon_lab(std::size_t i) const { return m_amp[i] * lab_phase(i); }
    cdouble cavity_lab(std::size_t i) const { return c_amp[i] * lab_phase(i); }
    double energy(std::size_t i) const { return std::norm(m_amp[i]) + std::norm(c_amp[i]); }
};

// Largest admissible step for a given frame: 0.05 of the shortest period among
// the frame-relative carriers, the coupling and the linewidths.
double max_step(const HybridParams<double>& p, double omega_a, double frame_omega);

// RK4 integration of  i dM/dt = H_eff M + g_am sqrt(n_a) exp(-i omega_a t) (1, 0)^T
// from t = 0 with lab-frame initial state `initial` = (<m>, <c>).
FieldTrace integrate_driven(const HybridParams<double>& p, const AxionDrive<double>& d, double t_end,
                            double dt, Vector2c<double> initial = Vector2c<double>::Zero(),
                            const IntegratorOptions& opt = {});

// Broadband magnon excitation modelled as an instantaneous kick of <m> at t0.
struct PulseConfig {
    double t0 = 0.0;
    cdouble amplitude{1.0, 0.0};  // deposited <m>, dimensionless
    double jitter = 0.0;          // relative shot-to-shot spread of |amplitude|
};

void validate(const PulseConfig& pulse);

// Multiplicative log-normal amplitude factor with unit mean and relative
// standard deviation `jitter`. Returns exactly 1 for zero jitter.
double draw_jitter_factor(double jitter, std::mt19937_64& rng);

// Free decay after a pulse; the trace starts at pulse.t0 with <m> = amplitude, <c> = 0.
FieldTrace ring_down(const HybridParams<double>& p, const PulseConfig& pulse, double t_end, double dt,
                     const IntegratorOptions& opt = {});

struct HeterodyneConfig {
    double omega_lo = 0.0;  // rad/s
    double band = 0.0;      // rad/s, half-width of the accepted IF band around 0
    Branch branch = Branch::lower;  // hybrid mode that must fall inside the band
};

void validate(const HeterodyneConfig& h);

struct BasebandSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<cdouble> samples;

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return samples.empty() ? t0 : time(samples.size() - 1); }
};

// Complex-envelope mixing r(t) = c(t) exp(+i omega_lo t) of the lab-frame cavity
// amplitude. No receiver filter is modelled. Throws DiagnosticError when the
// selected hybrid tone sits outside the band.
BasebandSeries heterodyne_downconvert(const FieldTrace& trace, const HeterodyneConfig& h);

// q_r = integral of |r|^2 over [t0, t0 + 4 tau_h], trapezoidal, with linear
// interpolation of |r|^2 at window edges that fall between samples.
double pulse_metric(const BasebandSeries& r, double t0, double tau_h);

struct ShotStatistics {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single shot
    std::size_t count = 0;
};

ShotStatistics shot_average(std::span<const double> metrics);

// Time-averaged cavity dissipation (gamma_c/2)<zdot^2> over samples
// [from, size), with zdot taken from the cavity equation of motion and
// cycle-averaged over the carrier.
double cavity_dissipation_rate(const FieldTrace& trace, std::size_t from);

} // namespace hybridsim
