#include <cmath>
#include <limits>
#include <random>

#include "dimer/observables.hpp"
#include "doctest.h"

using namespace dimer;

namespace {

WaveFunction random_state(const ModeTruncation& t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WaveFunction psi(t.dim);
    for (int i = 0; i < t.dim; ++i) psi(i) = cplx(u(rng), u(rng));
    psi.normalize();
    return psi;
}

WaveFunction swap_modes(const WaveFunction& psi, const ModeTruncation& t) {
    WaveFunction out(t.dim);
    for (int idx = 0; idx < t.dim; ++idx) {
        auto [n1, n2] = t.levels(idx);
        out(t.index(n2, n1)) = psi(idx);
    }
    return out;
}

WaveFunction coherent_product(const ModeTruncation& t, cplx alpha, cplx beta) {
    WaveFunction psi(t.dim);
    std::vector<cplx> ca(t.n_max_1 + 1), cb(t.n_max_2 + 1);
    ca[0] = 1.0;
    cb[0] = 1.0;
    for (int n = 1; n <= t.n_max_1; ++n) ca[n] = ca[n - 1] * alpha / std::sqrt(double(n));
    for (int n = 1; n <= t.n_max_2; ++n) cb[n] = cb[n - 1] * beta / std::sqrt(double(n));
    for (int n1 = 0; n1 <= t.n_max_1; ++n1)
        for (int n2 = 0; n2 <= t.n_max_2; ++n2) psi(t.index(n1, n2)) = ca[n1] * cb[n2];
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("photon numbers of simple states") {
    ModeTruncation t = make_truncation(3, 3);
    auto [a, b] = photon_numbers(basis_state(t, 2, 1), t);
    CHECK(a == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-14));

    WaveFunction bell = (basis_state(t, 0, 0) + basis_state(t, 1, 1)) / std::sqrt(2.0);
    auto [c, d] = photon_numbers(bell, t);
    CHECK(c == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d == doctest::Approx(0.5).epsilon(1e-14));

    auto [e, f] = photon_numbers(basis_state(t, 0, 0), t);
    CHECK(e == 0.0);
    CHECK(f == 0.0);
}

TEST_CASE("moment accumulators agree with the operator route") {
    ModeTruncation t = make_truncation(4, 5);
    SparseOperator a1 = mode_annihilator(t, 1);
    SparseOperator a2 = mode_annihilator(t, 2);
    SparseOperator n1 = compose(adjoint(a1), a1);
    SparseOperator n2 = compose(adjoint(a2), a2);
    SparseOperator n1n2 = compose(n1, n2);
    SparseOperator g21 = compose(adjoint(a1), compose(adjoint(a1), compose(a1, a1)));
    SparseOperator g22 = compose(adjoint(a2), compose(adjoint(a2), compose(a2, a2)));

    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        WaveFunction psi = random_state(t, seed);
        ModeMoments m = mode_moments(psi, t);
        CHECK(m.norm2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.n1 == doctest::Approx(expectation(n1, psi).real()).epsilon(1e-12));
        CHECK(m.n2 == doctest::Approx(expectation(n2, psi).real()).epsilon(1e-12));
        CHECK(m.n12 == doctest::Approx(expectation(n1n2, psi).real()).epsilon(1e-12));
        CHECK(m.g2m1 == doctest::Approx(expectation(g21, psi).real()).epsilon(1e-12));
        CHECK(m.g2m2 == doctest::Approx(expectation(g22, psi).real()).epsilon(1e-12));
        CHECK(pairwise_norm2(psi, t) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("factorisation ratio") {
    ModeTruncation t = make_truncation(6, 6);
    CHECK(factorisation_ratio(basis_state(t, 1, 1), t) == doctest::Approx(1.0).epsilon(1e-12));

    WaveFunction split = (basis_state(t, 1, 0) + basis_state(t, 0, 1)) / std::sqrt(2.0);
    CHECK(factorisation_ratio(split, t) == doctest::Approx(0.0));

    WaveFunction coh = coherent_product(t, cplx(0.6, 0.2), cplx(-0.3, 0.5));
    CHECK(factorisation_ratio(coh, t) == doctest::Approx(1.0).epsilon(1e-9));

    // vacuum has no defined ratio
    CHECK(std::isnan(factorisation_ratio(basis_state(t, 0, 0), t)));
}

TEST_CASE("second factorial moments") {
    ModeTruncation t = make_truncation(6, 6);
    CHECK(g2_moments(basis_state(t, 2, 0), t, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g2_moments(basis_state(t, 1, 0), t, 1) == doctest::Approx(0.0));

    // Fock-state g2 via moments equals (n-1)/n
    for (int n = 1; n <= 5; ++n) {
        WaveFunction psi = basis_state(t, n, 0);
        double m = g2_moments(psi, t, 1);
        double mean = photon_numbers(psi, t).first;
        CHECK(m / (mean * mean) == doctest::Approx(double(n - 1) / n).epsilon(1e-12));
    }

    // the quartic moment needs more headroom above the mean than the ratio tests
    ModeTruncation tc = make_truncation(12, 12);
    WaveFunction coh = coherent_product(tc, cplx(0.7, 0.1), cplx(0.0, 0.0));
    double mean = photon_numbers(coh, tc).first;
    CHECK(g2_moments(coh, tc, 1) / (mean * mean) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reduced density matrices") {
    ModeTruncation t = make_truncation(3, 3);

    DensityMatrix r1 = reduced_density(basis_state(t, 1, 0), t, 1);
    CHECK(r1(1, 1).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r1.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));

    WaveFunction split = (basis_state(t, 0, 1) + basis_state(t, 1, 0)) / std::sqrt(2.0);
    DensityMatrix r2 = reduced_density(split, t, 1);
    CHECK(r2(0, 0).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(r2(1, 1).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(r2(0, 1)) < 1e-14);

    WaveFunction prod = coherent_product(t, cplx(0.4, 0.3), cplx(-0.2, 0.6));
    DensityMatrix rp = reduced_density(prod, t, 1);
    // product state reduces to a projector
    CHECK((rp * rp - rp).cwiseAbs().maxCoeff() < 1e-12);

    for (int keep : {1, 2}) {
        WaveFunction psi = random_state(t, 99);
        DensityMatrix r = reduced_density(psi, t, keep);
        CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(r.trace() - cplx(1.0, 0.0)) < 1e-8);
        Eigen::SelfAdjointEigenSolver<DensityMatrix> es(r);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("von Neumann entropy values") {
    DensityMatrix pure = DensityMatrix::Zero(3, 3);
    pure(2, 2) = 1.0;
    CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0));

    DensityMatrix half = DensityMatrix::Zero(2, 2);
    half(0, 0) = 0.5;
    half(1, 1) = 0.5;
    CHECK(von_neumann_entropy(half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    DensityMatrix skew = DensityMatrix::Zero(2, 2);
    skew(0, 0) = 0.9;
    skew(1, 1) = 0.1;
    CHECK(von_neumann_entropy(skew) ==
          doctest::Approx(-0.9 * std::log(0.9) - 0.1 * std::log(0.1)).epsilon(1e-10));

    ModeTruncation t = make_truncation(4, 4);
    WaveFunction prod = coherent_product(t, cplx(0.3, 0.2), cplx(0.1, -0.4));
    CHECK(von_neumann_entropy(reduced_density(prod, t, 1)) < 1e-10);

    WaveFunction psi = random_state(t, 123);
    double e1 = von_neumann_entropy(reduced_density(psi, t, 1));
    double e2 = von_neumann_entropy(reduced_density(psi, t, 2));
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
    CHECK(e1 <= std::log(double(t.n_max_1 + 1)) + 1e-12);
}

TEST_CASE("sum and difference observables") {
    CHECK(sum_diff(2.0, 1.0) == std::pair<double, double>(3.0, 1.0));
    CHECK(sum_diff(0.7, 0.7).second == 0.0);
    auto fwd = sum_diff(1.3, 0.4);
    auto rev = sum_diff(0.4, 1.3);
    CHECK(fwd.first == rev.first);
    CHECK(fwd.second == -rev.second);
}

TEST_CASE("time averaging with discard window") {
    std::vector<double> times, vals;
    for (int i = 0; i <= 100; ++i) {
        times.push_back(0.1 * i);
        vals.push_back(3.25);
    }
    TimeAverage c = time_average(vals, times, 5.0);
    CHECK(c.mean == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(c.count == 50);

    std::vector<double> alt;
    for (int i = 0; i <= 100; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
    TimeAverage z = time_average(alt, times, 0.05);
    CHECK(std::abs(z.mean) <= 0.011);

    std::vector<double> withnan = vals;
    withnan[80] = std::numeric_limits<double>::quiet_NaN();
    TimeAverage n = time_average(withnan, times, 5.0);
    CHECK(n.excluded == 1);
    CHECK(n.mean == doctest::Approx(3.25).epsilon(1e-15));

    CHECK_THROWS(time_average(vals, times, 100.0));
}

TEST_CASE("mode swap carries every observable") {
    ModeTruncation t = make_truncation(5, 5);
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        WaveFunction psi = random_state(t, seed);
        WaveFunction phi = swap_modes(psi, t);

        ModeMoments mp = mode_moments(psi, t);
        ModeMoments mq = mode_moments(phi, t);
        CHECK(mp.n1 == mq.n2);
        CHECK(mp.n2 == mq.n1);
        CHECK(mp.g2m1 == mq.g2m2);
        CHECK(mp.g2m2 == mq.g2m1);
        CHECK(mp.n12 == mq.n12);
        CHECK(mp.norm2 == mq.norm2);

        CHECK(factorisation_ratio(psi, t) == factorisation_ratio(phi, t));
        CHECK(edge_population(psi, t) == edge_population(phi, t));
        CHECK(entropy_canonical(psi, t) == entropy_canonical(phi, t));

        auto [s, d] = sum_diff(mp.n1 / mp.norm2, mp.n2 / mp.norm2);
        auto [s2, d2] = sum_diff(mq.n1 / mq.norm2, mq.n2 / mq.norm2);
        CHECK(s == s2);
        CHECK(d == -d2);
    }
}
