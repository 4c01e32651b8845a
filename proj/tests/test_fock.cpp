#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>
#include <random>

#include "dimer/fock.hpp"
#include "dimer/semiclassical.hpp"
#include "doctest.h"

using namespace dimer;

namespace {

PhysicalParams study_params(double F = 2.0) {
    PhysicalParams p;
    p.J = -3.5;
    p.Delta = 4.5;
    p.U = 0.5;
    p.gamma = 2.0;
    p.F = F;
    return p;
}

cplx element(const SparseOperator& op, const ModeTruncation& t, int r1, int r2, int c1,
             int c2) {
    WaveFunction bra = basis_state(t, r1, r2);
    WaveFunction ket = basis_state(t, c1, c2);
    return bra.dot(apply_operator(op, ket));
}

}  // namespace

TEST_CASE("truncation dimensions and index map") {
    CHECK(make_truncation(2, 2).dim == 9);
    CHECK(make_truncation(6, 3).dim == 28);
    ModeTruncation t = make_truncation(1, 1);
    CHECK(t.index(1, 0) == 2);
    CHECK(t.levels(2) == std::pair<int, int>(1, 0));
    for (int idx = 0; idx < t.dim; ++idx) {
        auto [n1, n2] = t.levels(idx);
        CHECK(t.index(n1, n2) == idx);
    }
    CHECK_THROWS(make_truncation(0, 3));
    CHECK_THROWS(make_truncation(3, -1));
}

TEST_CASE("annihilators act as ladder operators") {
    ModeTruncation t = make_truncation(4, 4);
    SparseOperator a1 = mode_annihilator(t, 1);
    SparseOperator a2 = mode_annihilator(t, 2);

    WaveFunction out = apply_operator(a1, basis_state(t, 2, 0));
    CHECK(std::abs(out(t.index(1, 0)) - std::sqrt(2.0)) < 1e-15);
    CHECK(out.squaredNorm() == doctest::Approx(2.0).epsilon(1e-14));

    CHECK(apply_operator(a2, basis_state(t, 1, 0)).norm() == 0.0);
    CHECK(apply_operator(a1, basis_state(t, 1, 1)).isApprox(basis_state(t, 0, 1)));

    SparseOperator n1 = compose(adjoint(a1), a1);
    WaveFunction v = basis_state(t, 3, 1);
    CHECK(apply_operator(n1, v).isApprox(3.0 * v));
    CHECK_THROWS(mode_annihilator(t, 3));
}

TEST_CASE("commutator holds below the truncation edge") {
    ModeTruncation t = make_truncation(5, 3);
    for (int mode = 1; mode <= 2; ++mode) {
        SparseOperator a = mode_annihilator(t, mode);
        SparseOperator comm = add(compose(a, adjoint(a)), scale(-1.0, compose(adjoint(a), a)));
        int edge = mode == 1 ? t.n_max_1 : t.n_max_2;
        for (int n1 = 0; n1 <= t.n_max_1; ++n1)
            for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
                int level = mode == 1 ? n1 : n2;
                if (level >= edge) continue;
                WaveFunction v = basis_state(t, n1, n2);
                // sqrt(n)*sqrt(n) rounds within one ulp of n
                CHECK((apply_operator(comm, v) - v).cwiseAbs().maxCoeff() <
                      1e-14 * (level + 2));
            }
    }
}

TEST_CASE("adjoint is an involution and reverses products") {
    ModeTruncation t = make_truncation(3, 3);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Triplet<cplx>> ea, eb;
    for (int k = 0; k < 30; ++k) {
        ea.emplace_back(rng() % t.dim, rng() % t.dim, cplx(u(rng), u(rng)));
        eb.emplace_back(rng() % t.dim, rng() % t.dim, cplx(u(rng), u(rng)));
    }
    SparseOperator X = make_operator(t.dim, ea);
    SparseOperator Y = make_operator(t.dim, eb);
    CHECK(Eigen::MatrixXcd(adjoint(adjoint(X)).mat).isApprox(Eigen::MatrixXcd(X.mat)));
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd(adjoint(compose(X, Y)).mat);
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd(compose(adjoint(Y), adjoint(X)).mat);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("effective hamiltonian matrix elements") {
    ModeTruncation t = make_truncation(3, 3);
    SparseOperator h = build_effective_hamiltonian(study_params(), t);

    CHECK(std::abs(element(h, t, 0, 0, 0, 0)) == 0.0);
    CHECK(std::abs(element(h, t, 1, 0, 1, 0) - cplx(-4.5, -1.0)) < 1e-14);
    CHECK(std::abs(element(h, t, 1, 0, 0, 1) - cplx(3.5, 0.0)) < 1e-14);
    // drive couples |0,0> to |1,0> with amplitude F
    CHECK(std::abs(element(h, t, 1, 0, 0, 0) - cplx(2.0, 0.0)) < 1e-14);
}

TEST_CASE("hermitian hamiltonian matches the effective one up to the loss term") {
    ModeTruncation t = make_truncation(4, 4);
    PhysicalParams p = study_params();
    SparseOperator h = build_hermitian_hamiltonian(p, t);
    SparseOperator he = build_effective_hamiltonian(p, t);

    Eigen::MatrixXcd H(h.mat);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(element(h, t, 1, 0, 1, 0) - cplx(-4.5, 0.0)) < 1e-14);
    CHECK(std::abs(element(h, t, 2, 0, 2, 0) - cplx(-8.0, 0.0)) < 1e-14);

    SparseOperator loss =
        scale(cplx(0.0, -0.5 * p.gamma), add(mode_number(t, 1), mode_number(t, 2)));
    Eigen::MatrixXcd diff = Eigen::MatrixXcd(he.mat) - H - Eigen::MatrixXcd(loss.mat);
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective hamiltonian is invariant under the mode swap") {
    ModeTruncation t = make_truncation(4, 4);
    SparseOperator h = build_effective_hamiltonian(study_params(), t);
    Eigen::MatrixXcd H(h.mat);
    for (int r = 0; r < t.dim; ++r)
        for (int c = 0; c < t.dim; ++c) {
            auto [r1, r2] = t.levels(r);
            auto [c1, c2] = t.levels(c);
            CHECK(H(r, c) == H(t.index(r2, r1), t.index(c2, c1)));
        }
}

TEST_CASE("apply_operator basics") {
    ModeTruncation t = make_truncation(2, 2);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WaveFunction psi(t.dim);
    for (int i = 0; i < t.dim; ++i) psi(i) = cplx(u(rng), u(rng));
    psi.normalize();

    CHECK(apply_operator(identity_operator(t.dim), psi).isApprox(psi));
    CHECK(apply_operator(make_operator(t.dim, {}), psi).norm() == 0.0);
    WaveFunction wrong(t.dim + 1);
    wrong.setZero();
    CHECK_THROWS(apply_operator(identity_operator(t.dim), wrong));
}

TEST_CASE("expectation values") {
    ModeTruncation t = make_truncation(2, 2);
    SparseOperator n1 = mode_number(t, 1);

    CHECK(std::abs(expectation(n1, basis_state(t, 1, 0)) - 1.0) < 1e-15);

    WaveFunction sup = (basis_state(t, 0, 0) + basis_state(t, 1, 0)) / std::sqrt(2.0);
    CHECK(std::abs(expectation(n1, sup) - 0.5) < 1e-15);

    SparseOperator a1 = mode_annihilator(t, 1);
    SparseOperator a2 = mode_annihilator(t, 2);
    SparseOperator pair_op =
        compose(compose(adjoint(a1), adjoint(a2)), compose(a1, a2));
    CHECK(std::abs(expectation(pair_op, basis_state(t, 1, 1)) - 1.0) < 1e-15);
}

TEST_CASE("mu scaling preserves the reduced drive") {
    PhysicalParams p = study_params(4.0);
    auto [u3, f3] = mu_rescale(p.U, p.F, 3.0);
    CHECK(u3 == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
    CHECK(f3 == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-15));

    auto [u_back, f_back] = mu_rescale(u3 * 3.0, f3 / std::sqrt(3.0), 1.0);
    CHECK(u_back == doctest::Approx(p.U).epsilon(1e-14));
    CHECK(f_back == doctest::Approx(p.F).epsilon(1e-14));

    p.mu = 3.0;
    PhysicalParams q = apply_mu_scaling(p);
    CHECK(q.U == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
    CHECK(q.F == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(q.gamma == p.gamma);
}
