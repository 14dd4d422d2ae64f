#pragma once

#include <cmath>

#include "hybridsim/model/response.hpp"

namespace hybridsim {

template <typename Real>
struct HybridFrequencies {
    Real lower{};  // omega_minus
    Real upper{};  // omega_plus

    Real splitting() const { return upper - lower; }
    Real on(Branch b) const { return b == Branch::lower ? lower : upper; }
};

// omega_pm = (wc + wm)/2 +- sqrt(((wc - wm)/2)^2 + (g_cm/2)^2)
template <typename Real>
HybridFrequencies<Real> hybrid_frequencies(const HybridParams<Real>& p)
{
    validate(p);
    const Real mean = (p.omega_c + p.omega_m) / Real(2);
    const Real half_gap = std::hypot((p.omega_c - p.omega_m) / Real(2), p.g_cm / Real(2));
    return {mean - half_gap, mean + half_gap};
}

template <typename Real>
Real hybrid_frequency(const HybridParams<Real>& p, Branch b)
{
    return hybrid_frequencies(p).on(b);
}

// Inverse of the dispersion on one branch: the Kittel frequency that puts the
// chosen hybrid mode at omega,  omega_m = omega - (g_cm/2)^2 / (omega - omega_c).
// The lower branch lives strictly below omega_c, the upper strictly above.
template <typename Real>
Real magnon_frequency_on_branch(const HybridParams<Real>& p, Real omega, Branch b)
{
    validate(p);
    const Real detuning = omega - p.omega_c;
    if (detuning == 0) {
        throw DomainError("hybrid frequency equal to omega_c is not reachable on either branch");
    }
    if (b == Branch::lower && detuning > 0) {
        throw DomainError(fmt::format("{} Hz lies above omega_c; not on the lower branch",
                                      static_cast<double>(angular_to_hz(omega))));
    }
    if (b == Branch::upper && detuning < 0) {
        throw DomainError(fmt::format("{} Hz lies below omega_c; not on the upper branch",
                                      static_cast<double>(angular_to_hz(omega))));
    }
    const Real k = p.g_cm / Real(2);
    const Real wm = omega - k * k / detuning;
    if (!(wm >= 0)) {
        throw DomainError("hybrid frequency requires a negative Kittel frequency");
    }
    return wm;
}

// Deposited power with the drive on resonance with a hybrid mode,
// omega_a = omega_pm and omega_m = omega_m(omega_pm). Evaluated in the reduced
// form where omega_a - omega_m = (g/2)^2 / (omega_pm - omega_c), which avoids
// subtracting two GHz-scale numbers.
template <typename Real>
Real on_resonance_power(const HybridParams<Real>& p, const AxionDrive<Real>& drive_template,
                        Real omega_pm, Branch b)
{
    magnon_frequency_on_branch(p, omega_pm, b);  // domain check only
    validate(drive_template.at(omega_pm));
    const Real k = p.g_cm / Real(2);
    const Real delta = omega_pm - p.omega_c;
    const Complex<Real> magnon_term{k * k / delta, p.gamma_m / Real(2)};
    const Complex<Real> cavity_term{delta, p.gamma_c / Real(2)};
    const Real den2 = std::norm(magnon_term * cavity_term - k * k);
    const AxionDrive<Real>& d = drive_template;
    return p.gamma_c * omega_pm * omega_pm / (Real(8) * p.omega_c) * p.g_cm * p.g_cm * d.g_am *
           d.g_am * d.n_a / den2;
}

} // namespace hybridsim
