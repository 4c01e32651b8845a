#include "dimer/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dimer {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ModeMoments mode_moments(const WaveFunction& psi, const ModeTruncation& t) {
    if (psi.size() != t.dim) throw std::invalid_argument("mode_moments: dimension mismatch");
    ModeMoments m;
    const cplx* a = psi.data();
    if (t.square()) {
        const int nm = t.n_max_1;
        const int stride = nm + 1;
        for (int i = 0; i <= nm; ++i) {
            double pii = std::norm(a[i * stride + i]);
            double di = double(i);
            m.norm2 += pii;
            m.n1 += di * pii;
            m.n2 += di * pii;
            m.g2m1 += di * (di - 1.0) * pii;
            m.g2m2 += di * (di - 1.0) * pii;
            m.n12 += di * di * pii;
            for (int j = i + 1; j <= nm; ++j) {
                double pij = std::norm(a[i * stride + j]);
                double pji = std::norm(a[j * stride + i]);
                double dj = double(j);
                m.norm2 += pij + pji;
                m.n1 += di * pij + dj * pji;
                m.n2 += dj * pij + di * pji;
                m.g2m1 += di * (di - 1.0) * pij + dj * (dj - 1.0) * pji;
                m.g2m2 += dj * (dj - 1.0) * pij + di * (di - 1.0) * pji;
                m.n12 += (di * dj) * pij + (dj * di) * pji;
            }
        }
    } else {
        for (int n1 = 0; n1 <= t.n_max_1; ++n1)
            for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
                double p = std::norm(a[t.index(n1, n2)]);
                double d1 = double(n1), d2 = double(n2);
                m.norm2 += p;
                m.n1 += d1 * p;
                m.n2 += d2 * p;
                m.g2m1 += d1 * (d1 - 1.0) * p;
                m.g2m2 += d2 * (d2 - 1.0) * p;
                m.n12 += d1 * d2 * p;
            }
    }
    return m;
}

double pairwise_norm2(const WaveFunction& psi, const ModeTruncation& t) {
    if (psi.size() != t.dim) throw std::invalid_argument("pairwise_norm2: dimension mismatch");
    const cplx* a = psi.data();
    double s = 0.0;
    if (t.square()) {
        const int nm = t.n_max_1;
        const int stride = nm + 1;
        for (int i = 0; i <= nm; ++i) {
            s += std::norm(a[i * stride + i]);
            for (int j = i + 1; j <= nm; ++j)
                s += std::norm(a[i * stride + j]) + std::norm(a[j * stride + i]);
        }
    } else {
        for (int k = 0; k < t.dim; ++k) s += std::norm(a[k]);
    }
    return s;
}

double edge_population(const WaveFunction& psi, const ModeTruncation& t) {
    const cplx* a = psi.data();
    if (t.square()) {
        // pair mirrored boundary entries so the sum is swap-symmetric
        const int nm = t.n_max_1;
        double s = std::norm(a[t.index(nm, nm)]);
        for (int k = 0; k < nm; ++k)
            s += std::norm(a[t.index(nm, k)]) + std::norm(a[t.index(k, nm)]);
        return s;
    }
    double s = 0.0;
    for (int n2 = 0; n2 <= t.n_max_2; ++n2) s += std::norm(a[t.index(t.n_max_1, n2)]);
    for (int n1 = 0; n1 < t.n_max_1; ++n1) s += std::norm(a[t.index(n1, t.n_max_2)]);
    return s;
}

std::pair<double, double> photon_numbers(const WaveFunction& psi, const ModeTruncation& t) {
    ModeMoments m = mode_moments(psi, t);
    return {m.n1 / m.norm2, m.n2 / m.norm2};
}

double factorisation_ratio(const WaveFunction& psi, const ModeTruncation& t) {
    ModeMoments m = mode_moments(psi, t);
    double n1 = m.n1 / m.norm2;
    double n2 = m.n2 / m.norm2;
    if (n1 <= 1e-12 || n2 <= 1e-12) return kNaN;
    return (m.n12 / m.norm2) / (n1 * n2);
}

double g2_moments(const WaveFunction& psi, const ModeTruncation& t, int mode) {
    if (mode != 1 && mode != 2) throw std::invalid_argument("g2_moments: mode must be 1 or 2");
    ModeMoments m = mode_moments(psi, t);
    return (mode == 1 ? m.g2m1 : m.g2m2) / m.norm2;
}

DensityMatrix reduced_density(const WaveFunction& psi, const ModeTruncation& t, int keep_mode) {
    if (keep_mode != 1 && keep_mode != 2)
        throw std::invalid_argument("reduced_density: mode must be 1 or 2");
    int d1 = t.n_max_1 + 1, d2 = t.n_max_2 + 1;
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        psi.data(), d1, d2);
    DensityMatrix rho;
    if (keep_mode == 1) rho = M * M.adjoint();
    else rho = M.transpose() * M.conjugate();
    return rho;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("von_neumann_entropy: eigen-solve failed");
    double e = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()[i];
        if (lam > 1e-12) e -= lam * std::log(lam);
    }
    return e;
}

double entropy_canonical(const WaveFunction& psi, const ModeTruncation& t) {
    ModeMoments m = mode_moments(psi, t);
    int d1 = t.n_max_1 + 1, d2 = t.n_max_2 + 1;
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        psi.data(), d1, d2);
    // Orient by the more occupied mode so that the materialised matrix, and
    // with it every subsequent operation, is identical for a state and its
    // mode swap.
    DensityMatrix N;
    if (m.n1 >= m.n2) N = M;
    else N = M.transpose();
    DensityMatrix rho = (N * N.adjoint()) / m.norm2;
    return von_neumann_entropy(rho);
}

TimeAverage time_average(const std::vector<double>& values, const std::vector<double>& times,
                         double discard) {
    if (values.size() != times.size())
        throw std::invalid_argument("time_average: length mismatch");
    TimeAverage ta;
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (times[i] <= discard) continue;
        if (std::isnan(values[i])) {
            ++ta.excluded;
            continue;
        }
        s += values[i];
        ++ta.count;
    }
    if (ta.count == 0) throw std::runtime_error("time_average: empty window");
    ta.mean = s / double(ta.count);
    return ta;
}

}  // namespace dimer
