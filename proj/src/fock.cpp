#include "dimer/fock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dimer {

ModeTruncation make_truncation(int n_max_1, int n_max_2) {
    if (n_max_1 < 1 || n_max_2 < 1)
        throw std::invalid_argument("make_truncation: n_max must be >= 1");
    long long d = static_cast<long long>(n_max_1 + 1) * (n_max_2 + 1);
    if (d > std::numeric_limits<int>::max())
        throw std::invalid_argument("make_truncation: dimension overflow");
    return ModeTruncation{n_max_1, n_max_2, static_cast<int>(d)};
}

PhysicalParams apply_mu_scaling(const PhysicalParams& p) {
    if (p.mu <= 0.0) throw std::invalid_argument("apply_mu_scaling: mu must be > 0");
    PhysicalParams q = p;
    q.U = p.U / p.mu;
    q.F = std::sqrt(p.mu) * p.F;
    return q;
}

SparseOperator make_operator(int dim, const std::vector<Eigen::Triplet<cplx>>& entries) {
    SparseOperator op;
    op.dim = dim;
    op.mat.resize(dim, dim);
    op.mat.setFromTriplets(entries.begin(), entries.end());
    op.mat.prune(0.0, 0.0);
    op.mat.makeCompressed();
    return op;
}

SparseOperator identity_operator(int dim) {
    SparseOperator op;
    op.dim = dim;
    op.mat.resize(dim, dim);
    op.mat.setIdentity();
    return op;
}

SparseOperator adjoint(const SparseOperator& op) {
    SparseOperator out;
    out.dim = op.dim;
    out.mat = op.mat.adjoint();
    out.mat.makeCompressed();
    return out;
}

SparseOperator compose(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim != b.dim) throw std::invalid_argument("compose: dimension mismatch");
    SparseOperator out;
    out.dim = a.dim;
    out.mat = a.mat * b.mat;
    out.mat.prune(0.0, 0.0);
    out.mat.makeCompressed();
    return out;
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim != b.dim) throw std::invalid_argument("add: dimension mismatch");
    SparseOperator out;
    out.dim = a.dim;
    out.mat = a.mat + b.mat;
    out.mat.prune(0.0, 0.0);
    out.mat.makeCompressed();
    return out;
}

SparseOperator scale(cplx c, const SparseOperator& op) {
    SparseOperator out;
    out.dim = op.dim;
    out.mat = c * op.mat;
    out.mat.makeCompressed();
    return out;
}

SparseOperator mode_annihilator(const ModeTruncation& t, int mode) {
    if (mode != 1 && mode != 2) throw std::invalid_argument("mode_annihilator: mode must be 1 or 2");
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(t.dim);
    for (int n1 = 0; n1 <= t.n_max_1; ++n1) {
        for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
            if (mode == 1 && n1 >= 1)
                trip.emplace_back(t.index(n1 - 1, n2), t.index(n1, n2), std::sqrt(double(n1)));
            if (mode == 2 && n2 >= 1)
                trip.emplace_back(t.index(n1, n2 - 1), t.index(n1, n2), std::sqrt(double(n2)));
        }
    }
    return make_operator(t.dim, trip);
}

SparseOperator mode_number(const ModeTruncation& t, int mode) {
    if (mode != 1 && mode != 2) throw std::invalid_argument("mode_number: mode must be 1 or 2");
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(t.dim);
    for (int n1 = 0; n1 <= t.n_max_1; ++n1)
        for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
            double n = (mode == 1) ? n1 : n2;
            if (n > 0) trip.emplace_back(t.index(n1, n2), t.index(n1, n2), n);
        }
    return make_operator(t.dim, trip);
}

SparseOperator build_hermitian_hamiltonian(const PhysicalParams& p, const ModeTruncation& t) {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(6 * t.dim);
    for (int n1 = 0; n1 <= t.n_max_1; ++n1) {
        for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
            int row = t.index(n1, n2);
            double diag = -p.Delta * (n1 + n2) +
                          p.U * (double(n1) * (n1 - 1) + double(n2) * (n2 - 1));
            if (diag != 0.0) trip.emplace_back(row, row, diag);
            // -J a1^dag a2: couples |n1,n2> -> |n1+1,n2-1>. The square roots
            // are multiplied first so the two hop branches produce bitwise
            // mirror-equal coefficients on a square truncation.
            if (n1 < t.n_max_1 && n2 >= 1)
                trip.emplace_back(t.index(n1 + 1, n2 - 1), row,
                                  -p.J * (std::sqrt(double(n1 + 1)) * std::sqrt(double(n2))));
            if (n2 < t.n_max_2 && n1 >= 1)
                trip.emplace_back(t.index(n1 - 1, n2 + 1), row,
                                  -p.J * (std::sqrt(double(n1)) * std::sqrt(double(n2 + 1))));
            // F a_j (lowers) + F a_j^dag (raises), F real
            if (p.F != 0.0) {
                if (n1 >= 1) trip.emplace_back(t.index(n1 - 1, n2), row, p.F * std::sqrt(double(n1)));
                if (n2 >= 1) trip.emplace_back(t.index(n1, n2 - 1), row, p.F * std::sqrt(double(n2)));
                if (n1 < t.n_max_1) trip.emplace_back(t.index(n1 + 1, n2), row, p.F * std::sqrt(double(n1 + 1)));
                if (n2 < t.n_max_2) trip.emplace_back(t.index(n1, n2 + 1), row, p.F * std::sqrt(double(n2 + 1)));
            }
        }
    }
    return make_operator(t.dim, trip);
}

SparseOperator build_effective_hamiltonian(const PhysicalParams& p, const ModeTruncation& t) {
    SparseOperator h = build_hermitian_hamiltonian(p, t);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(t.dim);
    for (int n1 = 0; n1 <= t.n_max_1; ++n1)
        for (int n2 = 0; n2 <= t.n_max_2; ++n2)
            if (n1 + n2 > 0)
                trip.emplace_back(t.index(n1, n2), t.index(n1, n2),
                                  cplx(0.0, -0.5 * p.gamma * (n1 + n2)));
    return add(h, make_operator(t.dim, trip));
}

WaveFunction basis_state(const ModeTruncation& t, int n1, int n2) {
    if (n1 < 0 || n1 > t.n_max_1 || n2 < 0 || n2 > t.n_max_2)
        throw std::invalid_argument("basis_state: level outside truncation");
    WaveFunction psi = WaveFunction::Zero(t.dim);
    psi[t.index(n1, n2)] = 1.0;
    return psi;
}

WaveFunction apply_operator(const SparseOperator& op, const WaveFunction& psi) {
    if (op.dim != psi.size()) throw std::invalid_argument("apply_operator: dimension mismatch");
    return op.mat * psi;
}

cplx expectation(const SparseOperator& op, const WaveFunction& psi) {
    if (op.dim != psi.size()) throw std::invalid_argument("expectation: dimension mismatch");
    return psi.dot(op.mat * psi);
}

}  // namespace dimer
