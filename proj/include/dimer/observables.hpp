#pragma once

#include <utility>
#include <vector>

#include "dimer/fock.hpp"

namespace dimer {

// Diagonal moments of a (possibly unnormalised) state. All sums are
// accumulated pairwise over (n1,n2)/(n2,n1) so that on square truncations the
// results transform under the mode swap exactly: norm2, n12 invariant;
// n1 <-> n2 and g2m1 <-> g2m2 swapped, bit for bit.
struct ModeMoments {
    double norm2 = 0.0;
    double n1 = 0.0;    // <n1> * norm2
    double n2 = 0.0;
    double g2m1 = 0.0;  // <n1(n1-1)> * norm2
    double g2m2 = 0.0;
    double n12 = 0.0;   // <n1 n2> * norm2
};

ModeMoments mode_moments(const WaveFunction& psi, const ModeTruncation& t);

// Squared norm with the same pairwise accumulation order as mode_moments.
double pairwise_norm2(const WaveFunction& psi, const ModeTruncation& t);

// Population on the truncation edge (n1 = n_max_1 or n2 = n_max_2) of a
// normalised state.
double edge_population(const WaveFunction& psi, const ModeTruncation& t);

std::pair<double, double> photon_numbers(const WaveFunction& psi, const ModeTruncation& t);

// O = <a1+ a2+ a1 a2> / (<n1><n2>). Returns NaN (undefined-sample marker)
// when either mean occupation is at or below 1e-12.
double factorisation_ratio(const WaveFunction& psi, const ModeTruncation& t);

// <a_i+ a_i+ a_i a_i> = <n_i(n_i - 1)>
double g2_moments(const WaveFunction& psi, const ModeTruncation& t, int mode);

DensityMatrix reduced_density(const WaveFunction& psi, const ModeTruncation& t, int keep_mode);

double von_neumann_entropy(const DensityMatrix& rho);

// Entropy of the reduced state computed from a canonical mode orientation
// (swap-invariant bit for bit on square truncations).
double entropy_canonical(const WaveFunction& psi, const ModeTruncation& t);

inline std::pair<double, double> sum_diff(double n1, double n2) {
    return {n1 + n2, n1 - n2};
}

struct TimeAverage {
    double mean = 0.0;
    long count = 0;
    long excluded = 0;  // NaN samples inside the window
};

// Arithmetic mean of samples with t > discard; NaN samples are excluded and
// counted.
TimeAverage time_average(const std::vector<double>& values, const std::vector<double>& times,
                         double discard);

}  // namespace dimer
