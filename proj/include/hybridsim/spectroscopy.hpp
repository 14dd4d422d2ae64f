#pragma once

#include <span>
#include <vector>

#include "hybridsim/model.hpp"

namespace hybridsim {

// Transmission |S21|^2 on an ordinary-frequency grid, unit maximum.
struct Spectrum {
    std::vector<double> frequencies;  // Hz, strictly increasing
    std::vector<double> magnitude_sq;
};

struct PeakFit {
    double center = 0.0;  // Hz
    double fwhm = 0.0;    // Hz
    double height = 0.0;
    double floor = 0.0;
    double residual = 0.0;  // rms of data - model inside the window
    int iterations = 0;
};

struct FrequencyWindow {
    double lo = 0.0;  // Hz
    double hi = 0.0;
};

struct FieldSpectrum {
    double b0 = 0.0;  // tesla
    Spectrum spectrum;
};

struct ExtractedParams {
    HybridParams<double> params;  // omega_m set to omega_c (the anticrossing point)
    double anticrossing_b0 = 0.0; // tesla, vertex of the splitting-vs-field fit
    double gamma_h = 0.0;         // rad/s, mean hybrid linewidth at the anticrossing
};

// Weak-probe cavity susceptibility
//   chi_c = [(w - wc + i gc/2) - (g/2)^2 / (w - wm + i gm/2)]^-1,
// reported as |chi_c|^2 normalised to unit maximum on the grid.
Spectrum transmission_spectrum(const HybridParams<double>& p, std::span<const double> grid_hz);

// Indices of local maxima whose height is at least rel_threshold of the global maximum.
std::vector<std::size_t> find_peaks(const Spectrum& s, double rel_threshold = 0.05);

// Lorentzian plus constant floor fitted by damped least squares (<= 200 iterations).
// The window must contain exactly one interior local maximum.
PeakFit fit_lorentzian(const Spectrum& s, FrequencyWindow window);

// Cavity parameters from a static-field sweep of transmission spectra: omega_c
// and gamma_c from the far-detuned spectrum, g_cm from the minimum of the
// splitting-squared parabola, gamma_m = 2 gamma_h - gamma_c at the anticrossing.
ExtractedParams extract_params(std::span<const FieldSpectrum> spectra);

} // namespace hybridsim
