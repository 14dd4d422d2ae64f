#pragma once

#include <cassert>
#include <complex>

#include <Eigen/Dense>

#include "hybridsim/model/params.hpp"

namespace hybridsim {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Matrix2c = Eigen::Matrix<Complex<Real>, 2, 2>;

template <typename Real>
using Vector2c = Eigen::Matrix<Complex<Real>, 2, 1>;

template <typename Real>
using VectorXc = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using MatrixXc = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Steady-state complex amplitudes at drive frequency omega_a. Magnon modes
// first, cavity last.
template <typename Real>
struct ComplexResponse {
    VectorXc<Real> amplitudes;
    Real omega_a{};

    Complex<Real> cavity() const { return amplitudes(amplitudes.size() - 1); }
    Complex<Real> magnon(Eigen::Index i = 0) const { return amplitudes(i); }
    Eigen::Index mode_count() const { return amplitudes.size(); }
};

// Non-Hermitian generator of i dM/dt = H M for M = (<m>, <c>). The
// off-diagonal g_cm/2 puts the normal modes at the hybrid frequencies with
// splitting g_cm at degeneracy.
template <typename Real>
Matrix2c<Real> effective_hamiltonian(const HybridParams<Real>& p)
{
    const Complex<Real> i{0, 1};
    Matrix2c<Real> h;
    h << p.omega_m - i * p.gamma_m / Real(2), p.g_cm / Real(2),
         p.g_cm / Real(2), p.omega_c - i * p.gamma_c / Real(2);
    return h;
}

// det(omega_a I - H_eff) = (wa - wm + i gm/2)(wa - wc + i gc/2) - (g/2)^2
template <typename Real>
Complex<Real> response_denominator(const HybridParams<Real>& p, Real omega_a)
{
    const Complex<Real> magnon_term{omega_a - p.omega_m, p.gamma_m / Real(2)};
    const Complex<Real> cavity_term{omega_a - p.omega_c, p.gamma_c / Real(2)};
    const Real k = p.g_cm / Real(2);
    return magnon_term * cavity_term - k * k;
}

// Solves (omega_a I - H_eff) A = g_am sqrt(n_a) (1, 0)^T in closed form.
template <typename Real>
ComplexResponse<Real> response_amplitude(const HybridParams<Real>& p, const AxionDrive<Real>& d)
{
    validate(p);
    validate(d);
    const Complex<Real> det = response_denominator(p, d.omega_a);
    // Imaginary part of every eigenvalue is strictly negative for positive linewidths.
    assert(det != Complex<Real>(0));
    const Real f = d.amplitude();
    const Complex<Real> cavity_term{d.omega_a - p.omega_c, p.gamma_c / Real(2)};

    ComplexResponse<Real> r;
    r.omega_a = d.omega_a;
    r.amplitudes.resize(2);
    r.amplitudes(0) = f * cavity_term / det;
    r.amplitudes(1) = f * (p.g_cm / Real(2)) / det;
    return r;
}

// Cavity power from a cavity amplitude oscillating at omega_a:
// P = (gamma_c/2) <zdot^2>, z = (c^+ + c)/sqrt(2 omega_c).
template <typename Real>
Real cavity_output_power(Real gamma_c, Real omega_c, Real omega_a, Complex<Real> cavity_amplitude)
{
    return gamma_c * omega_a * omega_a / (Real(2) * omega_c) * std::norm(cavity_amplitude);
}

// Power deposited in the cavity by the axion drive (natural units, rad^2/s^2).
//   P_ac = gamma_c wa^2 / (8 wc) * g_cm^2 g_am^2 n_a / |den|^2
template <typename Real>
Real deposited_power(const HybridParams<Real>& p, const AxionDrive<Real>& d)
{
    validate(p);
    validate(d);
    const Real den2 = std::norm(response_denominator(p, d.omega_a));
    const Real wa2 = d.omega_a * d.omega_a;
    return p.gamma_c * wa2 / (Real(8) * p.omega_c) * p.g_cm * p.g_cm * d.g_am * d.g_am * d.n_a /
           den2;
}

} // namespace hybridsim
