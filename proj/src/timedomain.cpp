#include "hybridsim/timedomain.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace hybridsim {

namespace {

constexpr double kStepFraction = 0.05;

struct Problem {
    Matrix2c<double> generator;  // H_eff - frame_omega * I
    double drive = 0.0;          // g_am sqrt(n_a)
    double drive_offset = 0.0;   // omega_a - frame_omega
};

Vector2c<double> derivative(const Problem& pb, double t, const Vector2c<double>& y)
{
    Vector2c<double> rhs = pb.generator * y;
    if (pb.drive != 0.0) rhs(0) += pb.drive * std::polar(1.0, -pb.drive_offset * t);
    return cdouble{0.0, -1.0} * rhs;
}

FieldTrace integrate(const HybridParams<double>& p, const Problem& pb, double frame_omega,
                     double t_start, double duration, double dt, const Vector2c<double>& initial_lab)
{
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));

    FieldTrace tr;
    tr.t0 = t_start;
    tr.dt = dt;
    tr.frame_omega = frame_omega;
    tr.params = p;
    tr.m_amp.reserve(steps + 1);
    tr.c_amp.reserve(steps + 1);

    Vector2c<double> y = initial_lab * std::polar(1.0, frame_omega * t_start);
    tr.m_amp.push_back(y(0));
    tr.c_amp.push_back(y(1));
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = tr.time(k);
        const Vector2c<double> k1 = derivative(pb, t, y);
        const Vector2c<double> k2 = derivative(pb, t + dt / 2, y + (dt / 2) * k1);
        const Vector2c<double> k3 = derivative(pb, t + dt / 2, y + (dt / 2) * k2);
        const Vector2c<double> k4 = derivative(pb, t + dt, y + dt * k3);
        y += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tr.m_amp.push_back(y(0));
        tr.c_amp.push_back(y(1));
    }
    return tr;
}

void check_step(const HybridParams<double>& p, double omega_a, double frame_omega, double t_end,
                double dt)
{
    if (!(t_end > 0)) throw UsageError("integration span must be positive");
    const double limit = max_step(p, omega_a, frame_omega);
    if (!(dt > 0) || !(dt < limit)) {
        throw UsageError(fmt::format("time step {:.3e} s does not resolve the fastest frequency "
                                     "in this frame; need dt < {:.3e} s",
                                     dt, limit));
    }
}

} // namespace

std::vector<double> FieldTrace::times() const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
    return out;
}

cdouble FieldTrace::lab_phase(std::size_t i) const
{
    return std::polar(1.0, -frame_omega * time(i));
}

double max_step(const HybridParams<double>& p, double omega_a, double frame_omega)
{
    const double rate = std::max({std::abs(p.omega_c - frame_omega), std::abs(p.omega_m - frame_omega),
                                  std::abs(omega_a - frame_omega), p.g_cm, p.gamma_c, p.gamma_m});
    return kStepFraction * two_pi<double> / rate;
}

FieldTrace integrate_driven(const HybridParams<double>& p, const AxionDrive<double>& d, double t_end,
                            double dt, Vector2c<double> initial, const IntegratorOptions& opt)
{
    validate(p);
    validate(d);
    const double frame = opt.frame == Frame::lab ? 0.0 : opt.frame_omega.value_or(d.omega_a);
    check_step(p, d.omega_a, frame, t_end, dt);

    Problem pb;
    pb.generator = effective_hamiltonian(p);
    pb.generator.diagonal().array() -= frame;
    pb.drive = d.amplitude();
    pb.drive_offset = d.omega_a - frame;
    return integrate(p, pb, frame, 0.0, t_end, dt, initial);
}

void validate(const PulseConfig& pulse)
{
    if (!(pulse.jitter >= 0)) throw DomainError("pulse jitter must be non-negative");
    if (!std::isfinite(pulse.t0)) throw DomainError("pulse time must be finite");
}

double draw_jitter_factor(double jitter, std::mt19937_64& rng)
{
    if (!(jitter >= 0)) throw DomainError("pulse jitter must be non-negative");
    if (jitter == 0) return 1.0;
    const double sigma = std::sqrt(std::log1p(jitter * jitter));
    std::lognormal_distribution<double> dist(-sigma * sigma / 2, sigma);
    return dist(rng);
}

FieldTrace ring_down(const HybridParams<double>& p, const PulseConfig& pulse, double t_end, double dt,
                     const IntegratorOptions& opt)
{
    validate(p);
    validate(pulse);
    const double frame = opt.frame == Frame::lab ? 0.0 : opt.frame_omega.value_or(p.omega_c);
    check_step(p, frame, frame, t_end, dt);

    Problem pb;
    pb.generator = effective_hamiltonian(p);
    pb.generator.diagonal().array() -= frame;
    Vector2c<double> initial{pulse.amplitude, cdouble{0.0, 0.0}};
    return integrate(p, pb, frame, pulse.t0, t_end, dt, initial);
}

void validate(const HeterodyneConfig& h)
{
    if (!(h.omega_lo > 0)) throw DomainError("local-oscillator frequency must be positive");
    if (!(h.band > 0)) throw DomainError("heterodyne band must be positive");
}

BasebandSeries heterodyne_downconvert(const FieldTrace& trace, const HeterodyneConfig& h)
{
    validate(h);
    const double tone = hybrid_frequency(trace.params, h.branch);
    if (!(std::abs(tone - h.omega_lo) < h.band)) {
        throw DiagnosticError(fmt::format(
            "{} hybrid mode at {:.6f} GHz is {:.3f} MHz from the LO, outside the {:.3f} MHz band",
            to_string(h.branch), angular_to_hz(tone) * 1e-9,
            angular_to_hz(std::abs(tone - h.omega_lo)) * 1e-6, angular_to_hz(h.band) * 1e-6));
    }
    BasebandSeries r;
    r.t0 = trace.t0;
    r.dt = trace.dt;
    r.samples.resize(trace.size());
    const double offset = trace.frame_omega - h.omega_lo;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        r.samples[i] = trace.c_amp[i] * std::polar(1.0, -offset * trace.time(i));
    }
    return r;
}

double pulse_metric(const BasebandSeries& r, double t0, double tau_h)
{
    if (!(tau_h > 0)) throw UsageError("tau_h must be positive");
    if (r.samples.size() < 2 || !(r.dt > 0)) throw UsageError("baseband series needs two or more samples");
    const double a = t0;
    const double b = t0 + 4.0 * tau_h;
    const double slack = 1e-6 * r.dt;
    if (r.t0 > a + slack || r.t_end() < b - slack) {
        throw UsageError(fmt::format("series covers [{:.6e}, {:.6e}] s but the window is [{:.6e}, {:.6e}] s",
                                     r.t0, r.t_end(), a, b));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < r.samples.size(); ++i) {
        const double ta = r.time(i);
        const double tb = r.time(i + 1);
        const double lo = std::max(ta, a);
        const double hi = std::min(tb, b);
        if (hi <= lo) continue;
        const double fa = std::norm(r.samples[i]);
        const double fb = std::norm(r.samples[i + 1]);
        auto lerp = [&](double t) { return fa + (fb - fa) * (t - ta) / (tb - ta); };
        sum += 0.5 * (lerp(lo) + lerp(hi)) * (hi - lo);
    }
    return sum;
}

ShotStatistics shot_average(std::span<const double> metrics)
{
    if (metrics.empty()) throw UsageError("shot average needs at least one measurement");
    ShotStatistics s;
    s.count = metrics.size();
    double sum = 0.0;
    for (double v : metrics) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : metrics) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

double cavity_dissipation_rate(const FieldTrace& trace, std::size_t from)
{
    if (from >= trace.size()) throw UsageError("averaging window is empty");
    const auto& p = trace.params;
    const cdouble cavity_diag{p.omega_c, -p.gamma_c / 2};
    double acc = 0.0;
    for (std::size_t i = from; i < trace.size(); ++i) {
        // |dc/dt| in the lab frame; the common frame phase drops out of the modulus.
        const cdouble cdot = p.g_cm / 2 * trace.m_amp[i] + cavity_diag * trace.c_amp[i];
        acc += std::norm(cdot);
    }
    const double mean_cdot2 = acc / static_cast<double>(trace.size() - from);
    return p.gamma_c / 2 * mean_cdot2 / p.omega_c;
}

} // namespace hybridsim
