#include <cmath>
#include <random>

#include "dimer/observables.hpp"
#include "dimer/trajectory.hpp"
#include "doctest.h"

using namespace dimer;

namespace {

PhysicalParams study_params(double F) {
    PhysicalParams p;
    p.J = -3.5;
    p.Delta = 4.5;
    p.U = 0.5;
    p.gamma = 2.0;
    p.F = F;
    return p;
}

PhysicalParams decay_only() {
    PhysicalParams p;
    p.gamma = 2.0;
    return p;
}

WaveFunction swap_modes(const WaveFunction& psi, const ModeTruncation& t) {
    WaveFunction out(t.dim);
    for (int idx = 0; idx < t.dim; ++idx) {
        auto [n1, n2] = t.levels(idx);
        out(t.index(n2, n1)) = psi(idx);
    }
    return out;
}

}  // namespace

TEST_CASE("deterministic segment evolution") {
    ModeTruncation t = make_truncation(3, 3);

    SparseOperator h0 = build_effective_hamiltonian(study_params(0.0), t);
    WaveFunction vac = basis_state(t, 0, 0);
    CHECK((evolve_segment(vac, h0, 0.05) - vac).norm() < 1e-15);

    SparseOperator hd = build_effective_hamiltonian(decay_only(), t);
    WaveFunction one = basis_state(t, 1, 0);
    double n2 = evolve_segment(one, hd, 0.1).squaredNorm();
    CHECK(std::abs(n2 - std::exp(-0.2)) < 1e-6);
}

TEST_CASE("segment integrator converges at fourth order") {
    ModeTruncation t = make_truncation(3, 3);
    SparseOperator hd = build_effective_hamiltonian(decay_only(), t);
    WaveFunction one = basis_state(t, 1, 0);

    auto norm_error = [&](double h, int steps) {
        WaveFunction psi = one;
        for (int i = 0; i < steps; ++i) psi = evolve_segment(psi, hd, h);
        return std::abs(psi.squaredNorm() - std::exp(-2.0 * h * steps));
    };
    double coarse = norm_error(0.1, 2);
    double fine = norm_error(0.05, 4);
    CHECK(coarse / fine > 12.0);
    CHECK(coarse / fine < 20.0);
}

TEST_CASE("jump time bisection against closed-form decay") {
    ModeTruncation t = make_truncation(2, 2);
    SparseOperator hd = build_effective_hamiltonian(decay_only(), t);
    WaveFunction one = basis_state(t, 1, 0);

    double t_half = find_jump_time(one, hd, 0.0, 0.6, 0.5);
    CHECK(std::abs(t_half - 0.5 * std::log(2.0)) < 1e-5);

    double t_e2 = find_jump_time(one, hd, 2.0, 1.3, std::exp(-2.0));
    CHECK(std::abs(t_e2 - 3.0) < 1e-4);

    double t_now = find_jump_time(one, hd, 0.0, 0.5, 1.0 - 1e-9);
    CHECK(t_now < 1e-5);

    CHECK_THROWS(find_jump_time(one, hd, 0.0, 0.1, 1.5));
    CHECK_THROWS(find_jump_time(one, hd, 0.0, 0.05, 0.5));
}

TEST_CASE("jump channel selection and renormalisation") {
    ModeTruncation t = make_truncation(2, 2);

    auto [out1, ch1] = perform_jump(basis_state(t, 1, 0), t, 0.999);
    CHECK(ch1 == 1);
    CHECK((out1 - basis_state(t, 0, 0)).norm() < 1e-15);

    WaveFunction tilted = (std::sqrt(3.0) * basis_state(t, 1, 0) + basis_state(t, 0, 1)) / 2.0;
    CHECK(perform_jump(tilted, t, 0.74).second == 1);
    CHECK(perform_jump(tilted, t, 0.76).second == 2);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WaveFunction psi(t.dim);
    for (int i = 0; i < t.dim; ++i) psi(i) = cplx(u(rng), u(rng));
    psi.normalize();
    for (double draw : {0.1, 0.5, 0.9}) {
        auto [out, ch] = perform_jump(psi, t, draw);
        CHECK(std::abs(out.squaredNorm() - 1.0) < 1e-12);
        CHECK((ch == 1 || ch == 2));
    }

    CHECK_THROWS(perform_jump(basis_state(t, 0, 0), t, 0.5));
}

TEST_CASE("vacuum without drive stays dark") {
    TrajectoryConfig cfg;
    cfg.params = study_params(0.0);
    cfg.trunc = make_truncation(4, 4);
    cfg.t_final = 5.0;
    cfg.sample_interval = 0.5;
    TrajectoryRecord rec = run_trajectory(cfg);
    CHECK(rec.jumps.empty());
    for (const SampleRow& r : rec.samples) {
        CHECK(r.n1 == 0.0);
        CHECK(r.n2 == 0.0);
    }
}

TEST_CASE("same configuration reruns bit-identically") {
    TrajectoryConfig cfg;
    cfg.params = study_params(2.0);
    cfg.trunc = make_truncation(12, 12);
    cfg.t_final = 8.0;
    cfg.sample_interval = 0.2;
    cfg.seed = 31;
    TrajectoryRecord a = run_trajectory(cfg);
    TrajectoryRecord b = run_trajectory(cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    REQUIRE(a.jumps.size() == b.jumps.size());
    CHECK(!a.jumps.empty());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].n1 == b.samples[i].n1);
        CHECK(a.samples[i].n2 == b.samples[i].n2);
        CHECK(a.samples[i].g2m1 == b.samples[i].g2m1);
        CHECK(a.samples[i].entropy == b.samples[i].entropy);
    }
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        CHECK(a.jumps[i].t == b.jumps[i].t);
        CHECK(a.jumps[i].channel == b.jumps[i].channel);
    }
    CHECK(a.config_digest == b.config_digest);
}

TEST_CASE("mode swap with relabelled channels mirrors the trajectory exactly") {
    ModeTruncation t = make_truncation(12, 12);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // random amplitudes on the low-occupation block, zero elsewhere
    WaveFunction psi0 = WaveFunction::Zero(t.dim);
    for (int n1 = 0; n1 <= 3; ++n1)
        for (int n2 = 0; n2 <= 3; ++n2) psi0(t.index(n1, n2)) = cplx(u(rng), u(rng));
    psi0.normalize();

    TrajectoryConfig cfg;
    cfg.params = study_params(2.0);
    cfg.trunc = t;
    cfg.t_final = 6.0;
    cfg.sample_interval = 0.2;
    cfg.seed = 5;
    cfg.edge_tol = 1e-3;
    cfg.initial_state = psi0;

    TrajectoryConfig mirrored = cfg;
    mirrored.initial_state = swap_modes(psi0, t);
    mirrored.swap_channels = true;

    TrajectoryRecord a = run_trajectory(cfg);
    TrajectoryRecord b = run_trajectory(mirrored);

    REQUIRE(!a.jumps.empty());
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        CHECK(a.jumps[i].t == b.jumps[i].t);
        CHECK(a.jumps[i].channel == 3 - b.jumps[i].channel);
    }
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].n1 == b.samples[i].n2);
        CHECK(a.samples[i].n2 == b.samples[i].n1);
        CHECK(a.samples[i].g2m1 == b.samples[i].g2m2);
        CHECK(a.samples[i].g2m2 == b.samples[i].g2m1);
        bool both_nan = std::isnan(a.samples[i].O) && std::isnan(b.samples[i].O);
        CHECK((both_nan || a.samples[i].O == b.samples[i].O));
        CHECK(a.samples[i].entropy == b.samples[i].entropy);
    }
    CHECK(a.max_edge_population == b.max_edge_population);
}

TEST_CASE("linear cavity reaches the closed-form intensity") {
    PhysicalParams p;
    p.Delta = 4.5;
    p.gamma = 2.0;
    p.F = 1.0;
    TrajectoryConfig cfg;
    cfg.params = p;
    cfg.trunc = make_truncation(6, 6);
    cfg.t_final = 20.0;
    cfg.sample_interval = 0.1;
    cfg.compute_entropy = false;

    double avg = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        TrajectoryRecord rec = run_trajectory(cfg);
        for (const SampleRow& r : rec.samples)
            if (r.t > 10.0) {
                avg += r.n1;
                ++count;
            }
    }
    avg /= count;
    CHECK(std::abs(avg - 1.0 / 21.25) < 1e-3);
}

TEST_CASE("ramped drive is exactly linear in time") {
    TrajectoryConfig cfg;
    cfg.params = study_params(0.0);
    cfg.trunc = make_truncation(22, 22);
    cfg.t_final = 4.0;
    cfg.sample_interval = 0.25;
    cfg.ramp = RampSchedule{1.25, 0.5};
    TrajectoryRecord rec = run_trajectory(cfg);
    for (const SampleRow& r : rec.samples) CHECK(r.F == 0.5 + 1.25 * r.t);
    CHECK(rec.samples.back().n1 > 0.01);
}

TEST_CASE("ensembles aggregate deterministically across worker counts") {
    TrajectoryConfig cfg;
    cfg.params = study_params(2.0);
    cfg.trunc = make_truncation(12, 12);
    cfg.t_final = 3.0;
    cfg.sample_interval = 0.5;

    EnsembleResult serial = run_ensemble(cfg, 6, 1000, 1);
    EnsembleResult pooled = run_ensemble(cfg, 6, 1000, 3);
    REQUIRE(serial.records.size() == 6);
    REQUIRE(pooled.records.size() == 6);

    bool distinct = false;
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(serial.records[k].seed == 1000 + k);
        REQUIRE(serial.records[k].samples.size() == pooled.records[k].samples.size());
        for (std::size_t i = 0; i < serial.records[k].samples.size(); ++i) {
            CHECK(serial.records[k].samples[i].n1 == pooled.records[k].samples[i].n1);
            CHECK(serial.records[k].samples[i].n2 == pooled.records[k].samples[i].n2);
        }
        if (k > 0 && serial.records[k].jumps.size() != serial.records[0].jumps.size())
            distinct = true;
    }
    CHECK(distinct);
    for (std::size_t i = 0; i < serial.mean.size(); ++i) {
        CHECK(serial.mean[i].n1 == pooled.mean[i].n1);
        CHECK(serial.mean[i].n2 == pooled.mean[i].n2);
    }
}

TEST_CASE("ensemble mean tracks the density-matrix evolution") {
    PhysicalParams p = study_params(1.0);
    ModeTruncation t = make_truncation(6, 6);
    TrajectoryConfig cfg;
    cfg.params = p;
    cfg.trunc = t;
    cfg.t_final = 3.0;
    cfg.sample_interval = 0.5;
    cfg.compute_entropy = false;
    cfg.edge_tol = 5e-2;

    EnsembleResult ens = run_ensemble(cfg, 120, 400, 1);

    DensityMatrix rho0 = DensityMatrix::Zero(t.dim, t.dim);
    rho0(0, 0) = 1.0;
    SparseOperator num1 = mode_number(t, 1);
    for (const SampleRow& row : ens.mean) {
        if (row.t == 0.0) continue;
        DensityMatrix rho = master_equation_evolve(p, t, rho0, row.t, 0.002);
        double n_me = (DensityMatrix(num1.mat) * rho).trace().real();
        CHECK(std::abs(row.n1 - n_me) < 0.05);
    }
}

TEST_CASE("master equation basics") {
    ModeTruncation t = make_truncation(3, 3);

    DensityMatrix vac = DensityMatrix::Zero(t.dim, t.dim);
    vac(0, 0) = 1.0;
    DensityMatrix r0 = master_equation_evolve(study_params(0.0), t, vac, 2.0, 0.002);
    CHECK((r0 - vac).cwiseAbs().maxCoeff() < 1e-12);

    DensityMatrix one = DensityMatrix::Zero(t.dim, t.dim);
    one(t.index(1, 0), t.index(1, 0)) = 1.0;
    PhysicalParams pd = decay_only();
    DensityMatrix r1 = master_equation_evolve(pd, t, one, 1.5, 0.002);
    SparseOperator num1 = mode_number(t, 1);
    double n1 = (DensityMatrix(num1.mat) * r1).trace().real();
    CHECK(std::abs(n1 - std::exp(-3.0)) < 1e-8);
    CHECK(std::abs(r1.trace().real() - 1.0) < 1e-8);
    CHECK((r1 - r1.adjoint()).cwiseAbs().maxCoeff() < 1e-10);

    PhysicalParams lin;
    lin.Delta = 4.5;
    lin.gamma = 2.0;
    lin.F = 1.0;
    DensityMatrix rs = master_equation_evolve(lin, t, vac, 12.0, 0.002);
    double n_steady = (DensityMatrix(num1.mat) * rs).trace().real();
    CHECK(std::abs(n_steady - 0.047059) < 1e-4);
}

TEST_CASE("truncation sizing helpers") {
    CHECK(suggest_n_max(0.0) >= 5);
    CHECK(suggest_n_max(10.0) > suggest_n_max(2.0));

    PhysicalParams p = study_params(2.0);
    double dt_small = rk4_stable_dt(p, make_truncation(40, 40), 2.0);
    double dt_large = rk4_stable_dt(p, make_truncation(10, 10), 2.0);
    CHECK(dt_small > 0.0);
    CHECK(dt_small < dt_large);

    TrajectoryConfig cfg;
    cfg.params = study_params(2.0);
    cfg.trunc = make_truncation(4, 4);
    cfg.t_final = 20.0;
    cfg.sample_interval = 0.5;
    ModeTruncation grown = adapt_truncation(cfg, 6.0);
    CHECK(grown.n_max_1 > 4);

    cfg.trunc = grown;
    TrajectoryRecord rec = run_trajectory(cfg);
    CHECK(rec.max_edge_population < 1e-4);
}

TEST_CASE("edge guard reports undersized truncations") {
    TrajectoryConfig cfg;
    cfg.params = study_params(6.0);
    cfg.trunc = make_truncation(5, 5);
    cfg.t_final = 10.0;
    cfg.sample_interval = 0.5;
    CHECK_THROWS_WITH_AS(run_trajectory(cfg),
                         doctest::Contains("truncation too small"), std::runtime_error);
}

TEST_CASE("config validation") {
    TrajectoryConfig cfg;
    cfg.params = study_params(1.0);
    cfg.trunc = make_truncation(4, 4);

    TrajectoryConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS(run_trajectory(bad));

    bad = cfg;
    bad.sample_interval = 0.0;
    CHECK_THROWS(run_trajectory(bad));

    bad = cfg;
    bad.t_final = -1.0;
    CHECK_THROWS(run_trajectory(bad));

    bad = cfg;
    bad.initial_state = WaveFunction::Zero(3);
    CHECK_THROWS(run_trajectory(bad));
}
