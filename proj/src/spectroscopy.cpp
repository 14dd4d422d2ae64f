#include "hybridsim/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <fmt/format.h>

namespace hybridsim {

namespace {

constexpr int kMaxFitIterations = 200;

// Lorentzian with floor in scaled coordinates u = (f - f_ref)/f_scale, v = y/y_scale.
// Parameters: x0, w (FWHM), h (height), fl (floor).
struct LorentzianResidual : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& u;
    const Eigen::VectorXd& v;

    LorentzianResidual(const Eigen::VectorXd& u_, const Eigen::VectorXd& v_)
        : DenseFunctor<double>(4, static_cast<int>(u_.size())), u(u_), v(v_)
    {
    }

    int operator()(const InputType& x, ValueType& fvec) const
    {
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double s = 2.0 * (u(i) - x(0)) / x(1);
            fvec(i) = x(2) / (1.0 + s * s) + x(3) - v(i);
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& fjac) const
    {
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double d = u(i) - x(0);
            const double s = 2.0 * d / x(1);
            const double den = 1.0 + s * s;
            const double l = 1.0 / den;
            const double dl_ds = -2.0 * s * l * l;
            fjac(i, 0) = x(2) * dl_ds * (-2.0 / x(1));
            fjac(i, 1) = x(2) * dl_ds * (-s / x(1));
            fjac(i, 2) = l;
            fjac(i, 3) = 1.0;
        }
        return 0;
    }
};

// Linear interpolation of the abscissa where y crosses `level` between samples i and j.
double crossing(const Spectrum& s, std::size_t i, std::size_t j, double level)
{
    const double yi = s.magnitude_sq[i], yj = s.magnitude_sq[j];
    if (yi == yj) return s.frequencies[i];
    return s.frequencies[i] + (level - yi) * (s.frequencies[j] - s.frequencies[i]) / (yj - yi);
}

// Discrete FWHM estimate around a peak index, relative to `floor`.
double discrete_fwhm(const Spectrum& s, std::size_t peak, double floor, std::size_t lo, std::size_t hi)
{
    const double half = floor + (s.magnitude_sq[peak] - floor) / 2;
    std::size_t l = peak;
    while (l > lo && s.magnitude_sq[l] >= half) --l;
    std::size_t r = peak;
    while (r < hi && s.magnitude_sq[r] >= half) ++r;
    const double fl = s.magnitude_sq[l] < half ? crossing(s, l, l + 1, half) : s.frequencies[l];
    const double fr = s.magnitude_sq[r] < half ? crossing(s, r - 1, r, half) : s.frequencies[r];
    return fr - fl;
}

FrequencyWindow window_for(const Spectrum& s, std::size_t peak, std::span<const std::size_t> peaks)
{
    const double f = s.frequencies[peak];
    double reach = 4.0 * discrete_fwhm(s, peak, 0.0, 0, s.frequencies.size() - 1);
    for (std::size_t other : peaks) {
        if (other != peak) reach = std::min(reach, 0.5 * std::abs(s.frequencies[other] - f));
    }
    return {f - reach, f + reach};
}

void check_spectrum(const Spectrum& s)
{
    if (s.frequencies.size() != s.magnitude_sq.size()) {
        throw UsageError("spectrum frequency and magnitude arrays differ in length");
    }
    if (s.frequencies.size() < 3) throw UsageError("spectrum needs at least three samples");
}

} // namespace

Spectrum transmission_spectrum(const HybridParams<double>& p, std::span<const double> grid_hz)
{
    validate(p);
    if (grid_hz.empty()) throw UsageError("transmission spectrum needs a non-empty frequency grid");
    for (std::size_t i = 1; i < grid_hz.size(); ++i) {
        if (!(grid_hz[i] > grid_hz[i - 1])) throw UsageError("frequency grid must be strictly increasing");
    }
    const double k2 = (p.g_cm / 2) * (p.g_cm / 2);
    Spectrum s;
    s.frequencies.assign(grid_hz.begin(), grid_hz.end());
    s.magnitude_sq.resize(grid_hz.size());
    for (std::size_t i = 0; i < grid_hz.size(); ++i) {
        const double w = hz_to_angular(grid_hz[i]);
        const Complex<double> cav{w - p.omega_c, p.gamma_c / 2};
        const Complex<double> mag{w - p.omega_m, p.gamma_m / 2};
        s.magnitude_sq[i] = 1.0 / std::norm(cav - k2 / mag);
    }
    const double peak = *std::max_element(s.magnitude_sq.begin(), s.magnitude_sq.end());
    for (double& v : s.magnitude_sq) v /= peak;
    return s;
}

std::vector<std::size_t> find_peaks(const Spectrum& s, double rel_threshold)
{
    check_spectrum(s);
    const auto& y = s.magnitude_sq;
    const double top = *std::max_element(y.begin(), y.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= rel_threshold * top) out.push_back(i);
    }
    return out;
}

PeakFit fit_lorentzian(const Spectrum& s, FrequencyWindow window)
{
    check_spectrum(s);
    if (!(window.hi > window.lo)) throw UsageError("fit window must have hi > lo");
    const auto first = std::lower_bound(s.frequencies.begin(), s.frequencies.end(), window.lo);
    const auto last = std::upper_bound(s.frequencies.begin(), s.frequencies.end(), window.hi);
    const auto lo = static_cast<std::size_t>(first - s.frequencies.begin());
    const auto hi_end = static_cast<std::size_t>(last - s.frequencies.begin());
    if (hi_end < lo + 5) {
        throw FitError(fmt::format("window [{}, {}] Hz holds fewer than 5 samples", window.lo, window.hi));
    }
    const std::size_t hi = hi_end - 1;

    std::size_t maxima = 0, peak = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const auto& y = s.magnitude_sq;
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            ++maxima;
            peak = i;
        }
    }
    if (maxima != 1) {
        throw FitError(fmt::format("window [{:.6e}, {:.6e}] Hz contains {} local maxima; need exactly one",
                                   window.lo, window.hi, maxima));
    }

    const double floor0 = *std::min_element(s.magnitude_sq.begin() + static_cast<std::ptrdiff_t>(lo),
                                            s.magnitude_sq.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    const double f_ref = s.frequencies[peak];
    const double y_scale = s.magnitude_sq[peak];
    double w0 = discrete_fwhm(s, peak, floor0, lo, hi);
    if (!(w0 > 0)) w0 = 4.0 * (s.frequencies[peak + 1] - s.frequencies[peak - 1]);

    const auto n = static_cast<Eigen::Index>(hi - lo + 1);
    Eigen::VectorXd u(n), v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u(i) = (s.frequencies[lo + static_cast<std::size_t>(i)] - f_ref) / w0;
        v(i) = s.magnitude_sq[lo + static_cast<std::size_t>(i)] / y_scale;
    }

    Eigen::VectorXd x(4);
    x << 0.0, 1.0, (y_scale - floor0) / y_scale, floor0 / y_scale;
    LorentzianResidual functor(u, v);
    Eigen::LevenbergMarquardt<LorentzianResidual> lm(functor);
    lm.setMaxfev(kMaxFitIterations);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    const auto status = lm.minimize(x);

    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
        throw FitError("Lorentzian fit rejected its inputs");
    }
    const bool converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;
    PeakFit fit;
    fit.center = f_ref + x(0) * w0;
    fit.fwhm = std::abs(x(1)) * w0;
    fit.height = x(2) * y_scale;
    fit.floor = x(3) * y_scale;
    fit.iterations = static_cast<int>(lm.iterations());

    Eigen::VectorXd resid(n);
    functor(x, resid);
    fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n)) * y_scale;

    const bool sane = std::isfinite(fit.center) && std::isfinite(fit.fwhm) && fit.fwhm > 0 &&
                      fit.height > 0 && fit.center >= window.lo && fit.center <= window.hi;
    // A stalled-but-accurate fit is accepted; the cap only matters when the result is wrong.
    if (!sane || (!converged && fit.residual > 1e-3 * y_scale)) {
        throw FitError(fmt::format(
            "Lorentzian fit diverged (status {}, {} iterations): center {:.6e} Hz, fwhm {:.3e} Hz, "
            "height {:.3e}, residual {:.3e}",
            static_cast<int>(status), fit.iterations, fit.center, fit.fwhm, fit.height, fit.residual));
    }
    return fit;
}

ExtractedParams extract_params(std::span<const FieldSpectrum> spectra)
{
    if (spectra.empty()) throw UsageError("parameter extraction needs at least one spectrum");

    struct Split {
        double b0;
        double split_sq;  // Hz^2
        double fwhm_sum;  // Hz
    };
    std::vector<Split> splits;
    const FieldSpectrum* bare = nullptr;
    double bare_detuning = -1.0;

    for (const auto& fs : spectra) {
        const auto peaks = find_peaks(fs.spectrum);
        if (peaks.size() == 1) {
            const double larmor_hz = angular_to_hz(larmor_frequency(fs.b0));
            const double detuning = std::abs(larmor_hz - fs.spectrum.frequencies[peaks[0]]);
            if (detuning > bare_detuning) {
                bare_detuning = detuning;
                bare = &fs;
            }
        } else if (peaks.size() == 2) {
            const auto a = fit_lorentzian(fs.spectrum, window_for(fs.spectrum, peaks[0], peaks));
            const auto b = fit_lorentzian(fs.spectrum, window_for(fs.spectrum, peaks[1], peaks));
            const double split = b.center - a.center;
            splits.push_back({fs.b0, split * split, a.fwhm + b.fwhm});
        }
    }
    if (bare == nullptr) {
        throw DiagnosticError("no single-peak (far-detuned) spectrum in the sweep; cannot fit the bare cavity");
    }
    const auto peaks = find_peaks(bare->spectrum);
    const auto cavity = fit_lorentzian(bare->spectrum, window_for(bare->spectrum, peaks[0], peaks));

    if (splits.size() < 3) {
        throw DiagnosticError(fmt::format(
            "only {} spectra show two hybrid peaks; the sweep does not bracket the anticrossing",
            splits.size()));
    }

    // split^2 = (gamma (B - B*))^2 + g^2 is a parabola in B0.
    double b_mean = 0.0;
    for (const auto& s : splits) b_mean += s.b0;
    b_mean /= static_cast<double>(splits.size());
    double b_span = 0.0;
    for (const auto& s : splits) b_span = std::max(b_span, std::abs(s.b0 - b_mean));
    if (b_span == 0) throw DiagnosticError("two-peak spectra all share one field value");

    const auto m = static_cast<Eigen::Index>(splits.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd rhs(m);
    const double y_scale = splits.front().split_sq;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double x = (splits[static_cast<std::size_t>(i)].b0 - b_mean) / b_span;
        design(i, 0) = x * x;
        design(i, 1) = x;
        design(i, 2) = 1.0;
        rhs(i) = splits[static_cast<std::size_t>(i)].split_sq / y_scale;
    }
    const Eigen::Vector3d coef = design.householderQr().solve(rhs);
    if (!(coef(0) > 0)) throw DiagnosticError("splitting does not open up away from the anticrossing");
    const double x_star = -coef(1) / (2.0 * coef(0));
    const double b_star = b_mean + x_star * b_span;
    const auto [bmin, bmax] = std::minmax_element(splits.begin(), splits.end(),
                                                  [](const Split& a, const Split& b) { return a.b0 < b.b0; });
    if (b_star < bmin->b0 || b_star > bmax->b0) {
        throw DiagnosticError(fmt::format(
            "splitting minimum at {:.4f} T lies outside the swept range [{:.4f}, {:.4f}] T",
            b_star, bmin->b0, bmax->b0));
    }
    const double g_sq = (coef(2) - coef(1) * coef(1) / (4.0 * coef(0))) * y_scale;
    if (!(g_sq > 0)) throw DiagnosticError("fitted minimum splitting is not positive");

    const auto nearest = std::min_element(splits.begin(), splits.end(), [&](const Split& a, const Split& b) {
        return std::abs(a.b0 - b_star) < std::abs(b.b0 - b_star);
    });

    // A single peak close to the magnon line is a dressed cavity, not a bare one.
    const double pull_hz = g_sq / 4.0 / bare_detuning;
    if (pull_hz > 0.1 * cavity.fwhm) {
        throw DiagnosticError(fmt::format(
            "single-peak spectrum at {:.4f} T is pulled {:.3f} MHz by the magnon; no far-detuned "
            "spectrum to fit the bare cavity",
            bare->b0, pull_hz * 1e-6));
    }

    ExtractedParams out;
    out.params.omega_c = hz_to_angular(cavity.center);
    out.params.gamma_c = hz_to_angular(cavity.fwhm);
    out.params.g_cm = hz_to_angular(std::sqrt(g_sq));
    // The two hybrid linewidths always sum to gamma_c + gamma_m.
    out.gamma_h = hz_to_angular(nearest->fwhm_sum / 2);
    out.params.gamma_m = gamma_m_from_hybrid(out.gamma_h, out.params.gamma_c);
    out.params.omega_m = out.params.omega_c;
    out.anticrossing_b0 = b_star;
    return out;
}

} // namespace hybridsim
