#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hybridsim/model/dispersion.hpp"

namespace hybridsim {

template <typename Real>
struct TransductionPoint {
    Real omega{};    // hybrid-mode frequency on the branch, also the drive frequency
    Real omega_m{};  // Kittel frequency that places the branch at omega
    Real power{};    // on-resonance deposited power
    Real q{};        // power / max(power) over the grid
};

// Normalised on-resonance power along one branch, q(omega_pm) = P / max P.
template <typename Real>
std::vector<TransductionPoint<Real>> transduction_curve(const HybridParams<Real>& p,
                                                        const AxionDrive<Real>& d, Branch b,
                                                        std::span<const Real> grid)
{
    if (grid.empty()) throw UsageError("transduction curve needs a non-empty frequency grid");
    std::vector<TransductionPoint<Real>> out;
    out.reserve(grid.size());
    for (Real w : grid) {
        out.push_back({w, magnon_frequency_on_branch(p, w, b), on_resonance_power(p, d, w, b), Real(0)});
    }
    const auto peak = std::max_element(out.begin(), out.end(),
                                       [](const auto& a, const auto& c) { return a.power < c.power; });
    const Real pmax = peak->power;
    for (auto& pt : out) pt.q = pmax > 0 ? pt.power / pmax : Real(0);
    peak->q = Real(1);
    return out;
}

struct BandwidthOptions {
    int coarse_points = 2001;
    double window_half_width_in_g = 10.0;  // scan window: omega_c +- this many g_cm
    double tolerance = two_pi<double> * 1.0e3;  // rad/s on the Larmor axis
};

// Half-maximum interval of the on-resonance power along one branch as the
// Kittel frequency is tuned. tuning_width is the Larmor-frequency span
// (gamma * Delta B0) over which P >= P_max / 2; hybrid_width is the span of the
// branch frequency over the same interval.
template <typename Real>
struct BandwidthResult {
    Branch branch{Branch::lower};
    Real tuning_width{};
    Real hybrid_width{};
    Real omega_m_low{};
    Real omega_m_high{};
    Real omega_low{};   // branch frequency at omega_m_low
    Real omega_high{};  // branch frequency at omega_m_high
    Real peak_omega_m{};
    Real peak_omega{};
    Real peak_power{};

    Real bandwidth() const { return tuning_width; }
};

template <typename Real>
BandwidthResult<Real> dynamical_bandwidth(const HybridParams<Real>& p, const AxionDrive<Real>& d,
                                          Branch b, const BandwidthOptions& opt = {})
{
    validate(p);
    validate(d);
    if (p.g_cm == 0) {
        throw DiagnosticError("g_cm = 0: the modes do not hybridise, there is no branch to scan");
    }
    if (d.g_am == 0 || d.n_a == 0) {
        throw DiagnosticError("zero drive: deposited power vanishes along the branch");
    }
    if (opt.coarse_points < 5) throw UsageError("bandwidth scan needs at least 5 coarse points");

    auto power_at = [&](Real wm) {
        const Real w = hybrid_frequency(p.with_omega_m(wm), b);
        return on_resonance_power(p, d, w, b);
    };

    const Real half_window = Real(opt.window_half_width_in_g) * p.g_cm;
    const Real lo = std::max(Real(0), p.omega_c - half_window);
    const Real hi = p.omega_c + half_window;
    const int n = opt.coarse_points;
    std::vector<Real> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = lo + (hi - lo) * Real(i) / Real(n - 1);
        y[i] = power_at(x[i]);
    }

    int maxima = 0;
    for (int i = 1; i + 1 < n; ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) ++maxima;
    }
    const int imax = static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
    if (imax == 0 || imax == n - 1) {
        throw DiagnosticError("power maximum sits on the edge of the scan window");
    }
    if (maxima != 1) {
        throw DiagnosticError(fmt::format("branch power curve has {} local maxima; expected one", maxima));
    }

    // Golden-section refinement of the peak between the coarse neighbours.
    const Real invphi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
    Real a = x[imax - 1], c = x[imax + 1];
    Real x1 = c - invphi * (c - a), x2 = a + invphi * (c - a);
    Real f1 = power_at(x1), f2 = power_at(x2);
    while (c - a > Real(opt.tolerance) * Real(1e-3)) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (c - a);
            f2 = power_at(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - invphi * (c - a);
            f1 = power_at(x1);
        }
    }
    Real peak_wm = (a + c) / Real(2);
    Real peak_power = power_at(peak_wm);
    if (y[imax] > peak_power) {
        peak_wm = x[imax];
        peak_power = y[imax];
    }
    const Real half = peak_power / Real(2);

    auto bisect = [&](Real below, Real above) {
        // power(below) < half <= power(above)
        while (std::abs(above - below) > Real(opt.tolerance)) {
            const Real mid = (below + above) / Real(2);
            (power_at(mid) < half ? below : above) = mid;
        }
        return (below + above) / Real(2);
    };

    int jl = imax;
    while (jl >= 0 && y[jl] >= half) --jl;
    int jr = imax;
    while (jr < n && y[jr] >= half) ++jr;
    if (jl < 0 || jr >= n) {
        throw DiagnosticError(fmt::format(
            "half-maximum crossing not bracketed within omega_c +- {} g_cm on the {} branch",
            opt.window_half_width_in_g, to_string(b)));
    }

    BandwidthResult<Real> r;
    r.branch = b;
    r.omega_m_low = bisect(x[jl], x[jl + 1]);
    r.omega_m_high = bisect(x[jr], x[jr - 1]);
    r.tuning_width = r.omega_m_high - r.omega_m_low;
    r.omega_low = hybrid_frequency(p.with_omega_m(r.omega_m_low), b);
    r.omega_high = hybrid_frequency(p.with_omega_m(r.omega_m_high), b);
    r.hybrid_width = std::abs(r.omega_high - r.omega_low);
    r.peak_omega_m = peak_wm;
    r.peak_omega = hybrid_frequency(p.with_omega_m(peak_wm), b);
    r.peak_power = peak_power;
    return r;
}

} // namespace hybridsim
