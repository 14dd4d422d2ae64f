#pragma once

#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "hybridsim/model/response.hpp"

namespace hybridsim {

template <typename Real>
struct MagnonMode {
    Real omega{};
    Real gamma{};
    Real g{};  // coupling to the cavity
};

template <typename Real>
struct CavityMode {
    Real omega{};
    Real gamma{};
};

// N magnon modes, each coupled only to one shared cavity mode.
template <typename Real>
struct ModeSystem {
    std::vector<MagnonMode<Real>> magnons;
    CavityMode<Real> cavity;
    std::vector<Real> drive_weights;  // empty means 1 for every magnon mode

    Real drive_weight(std::size_t i) const { return drive_weights.empty() ? Real(1) : drive_weights[i]; }

    static ModeSystem from(const HybridParams<Real>& p)
    {
        return {{{p.omega_m, p.gamma_m, p.g_cm}}, {p.omega_c, p.gamma_c}, {}};
    }

    static ModeSystem identical(const HybridParams<Real>& p, std::size_t n)
    {
        ModeSystem s;
        s.magnons.assign(n, MagnonMode<Real>{p.omega_m, p.gamma_m, p.g_cm});
        s.cavity = {p.omega_c, p.gamma_c};
        return s;
    }
};

template <typename Real>
void validate(const ModeSystem<Real>& s)
{
    if (s.magnons.empty()) throw DomainError("mode system needs at least one magnon mode");
    if (!s.drive_weights.empty() && s.drive_weights.size() != s.magnons.size()) {
        throw DomainError("drive weights must match the number of magnon modes");
    }
    if (!(s.cavity.omega > 0 && s.cavity.gamma > 0)) {
        throw DomainError("cavity frequency and linewidth must be positive");
    }
    for (const auto& m : s.magnons) {
        if (!(m.omega > 0 && m.gamma > 0)) {
            throw DomainError("magnon frequencies and linewidths must be positive");
        }
        if (!(m.g >= 0)) throw DomainError("magnon-cavity couplings must be non-negative");
    }
}

template <typename Real>
MatrixXc<Real> effective_hamiltonian(const ModeSystem<Real>& s)
{
    const auto n = static_cast<Eigen::Index>(s.magnons.size());
    const Complex<Real> i{0, 1};
    MatrixXc<Real> h = MatrixXc<Real>::Zero(n + 1, n + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& m = s.magnons[static_cast<std::size_t>(k)];
        h(k, k) = m.omega - i * m.gamma / Real(2);
        h(k, n) = h(n, k) = m.g / Real(2);
    }
    h(n, n) = s.cavity.omega - i * s.cavity.gamma / Real(2);
    return h;
}

template <typename Real>
ComplexResponse<Real> multi_mode_response(const ModeSystem<Real>& s, const AxionDrive<Real>& d)
{
    validate(s);
    validate(d);
    const auto n = static_cast<Eigen::Index>(s.magnons.size());
    MatrixXc<Real> k = -effective_hamiltonian(s);
    k.diagonal().array() += Complex<Real>(d.omega_a);

    VectorXc<Real> rhs = VectorXc<Real>::Zero(n + 1);
    for (Eigen::Index j = 0; j < n; ++j) rhs(j) = d.amplitude() * s.drive_weight(static_cast<std::size_t>(j));

    ComplexResponse<Real> r;
    r.omega_a = d.omega_a;
    r.amplitudes = k.partialPivLu().solve(rhs);
    return r;
}

// Cavity power for a mode system, same quadrature relation as the two-mode case.
template <typename Real>
Real deposited_power(const ModeSystem<Real>& s, const AxionDrive<Real>& d)
{
    const auto r = multi_mode_response(s, d);
    return cavity_output_power(s.cavity.gamma, s.cavity.omega, d.omega_a, r.cavity());
}

} // namespace hybridsim
