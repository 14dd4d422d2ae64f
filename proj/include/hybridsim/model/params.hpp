#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"
#include "hybridsim/units.hpp"

namespace hybridsim {

// All frequencies, linewidths and couplings are angular (rad/s).
template <typename Real>
struct HybridParams {
    Real omega_c{};  // cavity mode
    Real omega_m{};  // Kittel mode
    Real gamma_c{};
    Real gamma_m{};
    Real g_cm{};     // photon-magnon coupling; hybrid splitting at degeneracy

    HybridParams with_omega_m(Real w) const
    {
        HybridParams out = *this;
        out.omega_m = w;
        return out;
    }

    // Informational only; nothing in the library requires strong coupling.
    bool strongly_coupled() const { return g_cm > std::max(gamma_c, gamma_m); }

    Real hybrid_linewidth() const { return (gamma_c + gamma_m) / Real(2); }
};

template <typename Real>
struct AxionDrive {
    Real g_am{};     // axion-magnon coupling, rad/s
    Real n_a{};      // occupation number
    Real omega_a{};  // drive frequency, rad/s

    Real amplitude() const { return g_am * std::sqrt(n_a); }

    AxionDrive at(Real w) const
    {
        AxionDrive out = *this;
        out.omega_a = w;
        return out;
    }
};

enum class Branch { lower, upper };

inline const char* to_string(Branch b) { return b == Branch::lower ? "lower" : "upper"; }

template <typename Real>
void validate(const HybridParams<Real>& p)
{
    auto finite = [](Real v) { return std::isfinite(static_cast<double>(v)); };
    if (!(finite(p.omega_c) && finite(p.omega_m) && finite(p.gamma_c) && finite(p.gamma_m) &&
          finite(p.g_cm))) {
        throw DomainError("hybrid parameters must be finite");
    }
    if (!(p.omega_c > 0)) throw DomainError("omega_c must be positive");
    if (!(p.omega_m >= 0)) throw DomainError("omega_m must be non-negative");
    if (!(p.gamma_c > 0)) throw DomainError("gamma_c must be positive");
    if (!(p.gamma_m > 0)) throw DomainError("gamma_m must be positive");
    if (!(p.g_cm >= 0)) throw DomainError("g_cm must be non-negative");
}

template <typename Real>
void validate(const AxionDrive<Real>& d)
{
    if (!(d.g_am >= 0)) throw DomainError("g_am must be non-negative");
    if (!(d.n_a >= 0)) throw DomainError("n_a must be non-negative");
    if (!(d.omega_a > 0)) throw DomainError("omega_a must be positive");
}

// Kittel-mode frequency for a static field b0 (tesla): omega_m = gamma * B0.
template <typename Real>
Real larmor_frequency(Real b0)
{
    if (!(b0 >= 0)) {
        throw DomainError(fmt::format("static field must be non-negative, got {} T",
                                      static_cast<double>(b0)));
    }
    return two_pi<Real> * Real(kGyromagneticHzPerTesla) * b0;
}

template <typename Real>
Real field_for_larmor(Real omega_m)
{
    if (!(omega_m >= 0)) throw DomainError("Larmor frequency must be non-negative");
    return omega_m / (two_pi<Real> * Real(kGyromagneticHzPerTesla));
}

// Magnon linewidth from the measured hybrid linewidth at degeneracy.
template <typename Real>
Real gamma_m_from_hybrid(Real gamma_h, Real gamma_c)
{
    const Real gm = Real(2) * gamma_h - gamma_c;
    if (!(gm > 0)) {
        throw DomainError(fmt::format("2*gamma_h - gamma_c = {} rad/s is not a physical linewidth",
                                      static_cast<double>(gm)));
    }
    return gm;
}

} // namespace hybridsim
