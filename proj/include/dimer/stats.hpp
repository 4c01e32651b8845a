#pragma once

#include <utility>
#include <vector>

namespace dimer {

struct Histogram2D {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    int nx = 0, ny = 0;
    std::vector<double> counts;  // row-major, counts[ix*ny + iy]
    long total = 0;              // in-range points
    long overflow = 0;           // out-of-range points, tallied, never dropped

    double& at(int ix, int iy) { return counts[ix * ny + iy]; }
    double at(int ix, int iy) const { return counts[ix * ny + iy]; }
    double x_center(int ix) const { return x_lo + (ix + 0.5) * (x_hi - x_lo) / nx; }
    double y_center(int iy) const { return y_lo + (iy + 0.5) * (y_hi - y_lo) / ny; }
};

struct Histogram1D {
    double lo = 0.0, hi = 1.0;
    std::vector<double> counts;
    long total = 0;
    long overflow = 0;
    double scale = 1.0;   // multiplicative factor applied to counts
    bool scaled = false;  // false when an all-zero histogram could not be scaled

    double center(int i) const { return lo + (i + 0.5) * (hi - lo) / counts.size(); }
};

struct PowerSpectrum {
    std::vector<double> freq;  // k/(N dt), up to Nyquist
    std::vector<double> mag;   // |X_k| / sqrt(N), mean-removed input
    double dt = 0.0;
    int n = 0;
};

// Appends the swapped copy of every point: out = in + {(y, x)}.
std::vector<std::pair<double, double>> symmetrize_points(
    const std::vector<std::pair<double, double>>& points);

// Half-open bins [lo, hi), final bin closed.
Histogram2D histogram2d(const std::vector<std::pair<double, double>>& points,
                        double x_lo, double x_hi, double y_lo, double y_hi,
                        int nx, int ny);

// As histogram2d, then counts rescaled so the peak equals target_max
// (skipped with scaled=false when the histogram is empty; no scaling is
// applied when target_max <= 0).
Histogram1D histogram1d_scaled(const std::vector<double>& values, double lo, double hi,
                               int n_bins, double target_max);

PowerSpectrum power_spectrum(const std::vector<double>& series, double dt, bool hann = false);

// Argmax of magnitude over [f_lo, f_hi]; ties resolved toward lower
// frequency. The band must exclude the zero bin.
double dominant_frequency(const PowerSpectrum& spec, double f_lo, double f_hi);

// Schmitt-trigger switch count: sign changes of the series that fully
// traverse the band (-h, +h).
int count_switches(const std::vector<double>& d_series, double h);

Histogram2D smooth3x3(const Histogram2D& h);

// Strict local maxima of the (typically smoothed) histogram with value at
// least rel_threshold * global max. Returns (ix, iy) pairs.
std::vector<std::pair<int, int>> local_maxima(const Histogram2D& h, double rel_threshold);

}  // namespace dimer
