#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dimer {

using cplx = std::complex<double>;
using WaveFunction = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

// Truncated two-mode Fock space. Basis index is row-major:
// index(n1, n2) = n1*(n_max_2+1) + n2.
struct ModeTruncation {
    int n_max_1 = 0;
    int n_max_2 = 0;
    int dim = 0;

    int index(int n1, int n2) const { return n1 * (n_max_2 + 1) + n2; }
    std::pair<int, int> levels(int idx) const {
        return {idx / (n_max_2 + 1), idx % (n_max_2 + 1)};
    }
    bool square() const { return n_max_1 == n_max_2; }
};

ModeTruncation make_truncation(int n_max_1, int n_max_2);

struct PhysicalParams {
    double J = 0.0;      // hopping
    double Delta = 0.0;  // detuning omega_c - omega_p
    double U = 0.0;      // on-site energy
    double gamma = 1.0;  // loss rate
    double F = 0.0;      // drive amplitude
    double mu = 1.0;     // photon-number scale
};

// Applies the scaling (U, F) -> (U/mu, sqrt(mu)*F) to the stored values,
// leaving the semiclassical parameters unchanged.
PhysicalParams apply_mu_scaling(const PhysicalParams& p);

struct SparseOperator {
    int dim = 0;
    Eigen::SparseMatrix<cplx> mat;
};

SparseOperator make_operator(int dim, const std::vector<Eigen::Triplet<cplx>>& entries);
SparseOperator identity_operator(int dim);
SparseOperator adjoint(const SparseOperator& op);
SparseOperator compose(const SparseOperator& a, const SparseOperator& b);  // a*b
SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator scale(cplx c, const SparseOperator& op);

SparseOperator mode_annihilator(const ModeTruncation& t, int mode);
SparseOperator mode_number(const ModeTruncation& t, int mode);

SparseOperator build_effective_hamiltonian(const PhysicalParams& p, const ModeTruncation& t);
SparseOperator build_hermitian_hamiltonian(const PhysicalParams& p, const ModeTruncation& t);

WaveFunction basis_state(const ModeTruncation& t, int n1, int n2);
WaveFunction apply_operator(const SparseOperator& op, const WaveFunction& psi);
cplx expectation(const SparseOperator& op, const WaveFunction& psi);

}  // namespace dimer
