#include "dimer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace dimer {

std::vector<std::pair<double, double>> symmetrize_points(
    const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> out;
    out.reserve(2 * points.size());
    out = points;
    for (const auto& [x, y] : points) out.emplace_back(y, x);
    return out;
}

namespace {

// Half-open [lo, hi) bins, final bin closed; -1 when out of range.
inline int bin_of(double v, double lo, double hi, int n) {
    if (std::isnan(v) || v < lo || v > hi) return -1;
    if (v == hi) return n - 1;
    int b = static_cast<int>((v - lo) / (hi - lo) * n);
    if (b >= n) b = n - 1;  // rounding at the upper edge
    return b;
}

}  // namespace

Histogram2D histogram2d(const std::vector<std::pair<double, double>>& points,
                        double x_lo, double x_hi, double y_lo, double y_hi,
                        int nx, int ny) {
    if (!(x_hi > x_lo) || !(y_hi > y_lo))
        throw std::invalid_argument("histogram2d: degenerate range");
    if (nx < 1 || ny < 1) throw std::invalid_argument("histogram2d: need at least one bin");
    Histogram2D h;
    h.x_lo = x_lo; h.x_hi = x_hi; h.y_lo = y_lo; h.y_hi = y_hi;
    h.nx = nx; h.ny = ny;
    h.counts.assign(static_cast<size_t>(nx) * ny, 0.0);
    for (const auto& [x, y] : points) {
        int ix = bin_of(x, x_lo, x_hi, nx);
        int iy = bin_of(y, y_lo, y_hi, ny);
        if (ix < 0 || iy < 0) {
            ++h.overflow;
            continue;
        }
        h.at(ix, iy) += 1.0;
        ++h.total;
    }
    return h;
}

Histogram1D histogram1d_scaled(const std::vector<double>& values, double lo, double hi,
                               int n_bins, double target_max) {
    if (!(hi > lo)) throw std::invalid_argument("histogram1d_scaled: degenerate range");
    if (n_bins < 1) throw std::invalid_argument("histogram1d_scaled: need at least one bin");
    Histogram1D h;
    h.lo = lo; h.hi = hi;
    h.counts.assign(n_bins, 0.0);
    for (double v : values) {
        int b = bin_of(v, lo, hi, n_bins);
        if (b < 0) {
            ++h.overflow;
            continue;
        }
        h.counts[b] += 1.0;
        ++h.total;
    }
    if (target_max > 0.0) {
        double peak = *std::max_element(h.counts.begin(), h.counts.end());
        if (peak > 0.0) {
            h.scale = target_max / peak;
            for (double& c : h.counts) c *= h.scale;
            h.scaled = true;
        }
    }
    return h;
}

PowerSpectrum power_spectrum(const std::vector<double>& series, double dt, bool hann) {
    const int n = static_cast<int>(series.size());
    if (n < 16) throw std::invalid_argument("power_spectrum: need at least 16 samples");
    if (!(dt > 0.0)) throw std::invalid_argument("power_spectrum: dt must be > 0");

    double mean = 0.0;
    for (double v : series) {
        if (std::isnan(v)) throw std::invalid_argument("power_spectrum: NaN sample");
        mean += v;
    }
    mean /= n;

    std::vector<double> in(n);
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        if (hann) w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
        in[i] = w * (series[i] - mean);
    }

    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    PowerSpectrum spec;
    spec.dt = dt;
    spec.n = n;
    double norm = 1.0 / std::sqrt(double(n));
    spec.freq.reserve(n / 2 + 1);
    spec.mag.reserve(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
        spec.freq.push_back(double(k) / (double(n) * dt));
        spec.mag.push_back(std::hypot(out[k][0], out[k][1]) * norm);
    }
    return spec;
}

double dominant_frequency(const PowerSpectrum& spec, double f_lo, double f_hi) {
    if (spec.freq.empty()) throw std::invalid_argument("dominant_frequency: empty spectrum");
    if (f_lo <= 0.0) throw std::invalid_argument("dominant_frequency: band must exclude the zero bin");
    if (f_hi < f_lo || f_lo > spec.freq.back())
        throw std::invalid_argument("dominant_frequency: empty band");
    double best_f = -1.0, best_m = -1.0;
    for (size_t k = 0; k < spec.freq.size(); ++k) {
        if (spec.freq[k] < f_lo || spec.freq[k] > f_hi) continue;
        if (spec.mag[k] > best_m) {  // strict: ties keep the lower frequency
            best_m = spec.mag[k];
            best_f = spec.freq[k];
        }
    }
    if (best_f < 0.0) throw std::invalid_argument("dominant_frequency: empty band");
    return best_f;
}

int count_switches(const std::vector<double>& d_series, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("count_switches: hysteresis must be > 0");
    int state = 0;  // 0 unknown, +1 above, -1 below
    int switches = 0;
    for (double d : d_series) {
        if (std::isnan(d)) continue;
        if (state == 0) {
            if (d > h) state = +1;
            else if (d < -h) state = -1;
        } else if (state == +1 && d < -h) {
            ++switches;
            state = -1;
        } else if (state == -1 && d > h) {
            ++switches;
            state = +1;
        }
    }
    return switches;
}

Histogram2D smooth3x3(const Histogram2D& h) {
    Histogram2D out = h;
    for (int i = 0; i < h.nx; ++i)
        for (int j = 0; j < h.ny; ++j) {
            double s = 0.0;
            int c = 0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= h.nx || jj < 0 || jj >= h.ny) continue;
                    s += h.at(ii, jj);
                    ++c;
                }
            out.at(i, j) = s / c;
        }
    return out;
}

std::vector<std::pair<int, int>> local_maxima(const Histogram2D& h, double rel_threshold) {
    double peak = 0.0;
    for (double c : h.counts) peak = std::max(peak, c);
    std::vector<std::pair<int, int>> out;
    if (peak <= 0.0) return out;
    double thresh = rel_threshold * peak;
    // flood each equal-height component; it is a maximum when no bin in it
    // has a strictly higher neighbour. Symmetrized histograms carry exactly
    // tied mirror bins, so plateaus must count once, not cancel each other.
    std::vector<char> seen(h.counts.size(), 0);
    for (int i = 0; i < h.nx; ++i)
        for (int j = 0; j < h.ny; ++j) {
            if (seen[std::size_t(i) * h.ny + j]) continue;
            double v = h.at(i, j);
            if (v < thresh) continue;
            std::vector<std::pair<int, int>> comp, queue{{i, j}};
            seen[std::size_t(i) * h.ny + j] = 1;
            bool is_max = true;
            while (!queue.empty()) {
                auto [ci, cj] = queue.back();
                queue.pop_back();
                comp.emplace_back(ci, cj);
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        int ii = ci + di, jj = cj + dj;
                        if (ii < 0 || ii >= h.nx || jj < 0 || jj >= h.ny) continue;
                        double w = h.at(ii, jj);
                        if (w > v) is_max = false;
                        std::size_t idx = std::size_t(ii) * h.ny + jj;
                        if (w != v || seen[idx]) continue;
                        seen[idx] = 1;
                        queue.emplace_back(ii, jj);
                    }
            }
            if (!is_max) continue;
            double mx = 0.0, my = 0.0;
            for (auto [ci, cj] : comp) {
                mx += ci;
                my += cj;
            }
            mx /= double(comp.size());
            my /= double(comp.size());
            std::pair<int, int> rep = comp.front();
            double best = 1e300;
            for (auto [ci, cj] : comp) {
                double d = (ci - mx) * (ci - mx) + (cj - my) * (cj - my);
                if (d < best) {
                    best = d;
                    rep = {ci, cj};
                }
            }
            out.push_back(rep);
        }
    return out;
}

}  // namespace dimer
