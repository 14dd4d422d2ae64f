#include <doctest.h>

#include <chrono>
#include <vector>

#include "hybridsim/model.hpp"
#include "test_support.hpp"

using namespace hybridsim;
using test::fig2_drive;
using test::fig2_params;
using test::mhz;

namespace {

// Frozen from an independent Brent/bracketing root-finder run on the on-branch
// power curve (scipy.optimize.minimize_scalar + brentq, xtol 1e-3 rad/s).
constexpr double kLowerTuningWidthHz = 62159827.30;
constexpr double kLowerHybridWidthHz = 14813789.90;
constexpr double kLowerPeakDetuningHz = 16255961.17;  // omega_m - omega_c at the peak
constexpr double kUpperTuningWidthHz = 62177668.47;
constexpr double kUpperHybridWidthHz = 14919288.68;

} // namespace

TEST_CASE("transduction curve normalisation")
{
    const auto p = fig2_params();
    auto d = fig2_drive(p.omega_c);
    std::vector<double> grid;
    for (int i = 0; i < 301; ++i) grid.push_back(p.omega_c - mhz(100) + i * mhz(99.5) / 300);

    const auto curve = transduction_curve(p, d, Branch::lower, std::span<const double>(grid));
    REQUIRE(curve.size() == grid.size());
    double qmax = 0;
    for (const auto& pt : curve) {
        CHECK(pt.q >= 0.0);
        CHECK(pt.q <= 1.0);
        qmax = std::max(qmax, pt.q);
    }
    CHECK(qmax == 1.0);

    const auto peak = std::max_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.q < b.q; });
    CHECK(peak->omega < p.omega_c);

    d.g_am *= 2;
    d.n_a *= 2;
    const auto scaled = transduction_curve(p, d, Branch::lower, std::span<const double>(grid));
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(scaled[i].q == doctest::Approx(curve[i].q).epsilon(1e-14));
    }

    CHECK_THROWS_AS(transduction_curve(p, d, Branch::lower, std::span<const double>()), UsageError);
    std::vector<double> bad{p.omega_c + mhz(1)};
    CHECK_THROWS_AS(transduction_curve(p, d, Branch::lower, std::span<const double>(bad)), DomainError);
}

TEST_CASE("dynamical bandwidth for the reference apparatus")
{
    const auto p = fig2_params();
    const auto d = fig2_drive(p.omega_c);
    const auto t0 = std::chrono::steady_clock::now();
    const auto lower = dynamical_bandwidth(p, d, Branch::lower);
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(elapsed < std::chrono::seconds(1));

    const double tol = two_pi<double> * 2e3;
    CHECK(std::abs(lower.tuning_width - two_pi<double> * kLowerTuningWidthHz) < tol);
    CHECK(std::abs(lower.hybrid_width - two_pi<double> * kLowerHybridWidthHz) < tol);
    CHECK(std::abs(lower.peak_omega_m - p.omega_c - two_pi<double> * kLowerPeakDetuningHz) < tol);
    CHECK(lower.peak_omega < p.omega_c);
    CHECK(lower.omega_m_low < lower.peak_omega_m);
    CHECK(lower.peak_omega_m < lower.omega_m_high);

    const auto upper = dynamical_bandwidth(p, d, Branch::upper);
    CHECK(std::abs(upper.tuning_width - two_pi<double> * kUpperTuningWidthHz) < tol);
    CHECK(std::abs(upper.hybrid_width - two_pi<double> * kUpperHybridWidthHz) < tol);
    CHECK(std::abs(upper.bandwidth() / lower.bandwidth() - 1.0) < 0.05);

    CHECK(lower.bandwidth() > 10 * p.hybrid_linewidth());
}

TEST_CASE("bandwidth half-maximum edges")
{
    const auto p = fig2_params();
    const auto d = fig2_drive(p.omega_c);
    const auto r = dynamical_bandwidth(p, d, Branch::lower);
    auto power_at = [&](double wm) {
        return on_resonance_power(p, d, hybrid_frequency(p.with_omega_m(wm), Branch::lower), Branch::lower);
    };
    CHECK(power_at(r.omega_m_low) == doctest::Approx(r.peak_power / 2).epsilon(1e-4));
    CHECK(power_at(r.omega_m_high) == doctest::Approx(r.peak_power / 2).epsilon(1e-4));
}

TEST_CASE("bandwidth grows with the linewidths")
{
    auto p = fig2_params();
    const auto d = fig2_drive(p.omega_c);
    double prev = 0;
    for (double scale : {0.5, 1.0, 2.0, 4.0}) {
        auto q = p;
        q.gamma_c *= scale;
        q.gamma_m *= scale;
        const double bw = dynamical_bandwidth(q, d, Branch::lower).bandwidth();
        CHECK(bw > prev);
        prev = bw;
    }
}

TEST_CASE("bandwidth diagnostics")
{
    auto p = fig2_params();
    const auto d = fig2_drive(p.omega_c);
    p.g_cm = 0;
    CHECK_THROWS_AS(dynamical_bandwidth(p, d, Branch::lower), DiagnosticError);

    // A scan window narrower than the resonance cannot bracket the half maximum.
    BandwidthOptions narrow;
    narrow.window_half_width_in_g = 0.2;
    CHECK_THROWS_AS(dynamical_bandwidth(fig2_params(), d, Branch::lower, narrow), DiagnosticError);

    auto zero = d;
    zero.g_am = 0;
    CHECK_THROWS_AS(dynamical_bandwidth(fig2_params(), zero, Branch::lower), DiagnosticError);
}
