#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimer/fock.hpp"

namespace dimer {

// Parameters of the rescaled mean-field ODE
//   dA/dt = -A + i(delta + xi|A|^2)A + i kappa B + f   (B by A<->B symmetry)
struct ScaledParams {
    double delta = 0.0;
    double kappa = 0.0;
    double f = 0.0;
    int xi = 1;  // sign(U)
};

ScaledParams scaled_params(const PhysicalParams& p);

// (U, F, mu) -> (U/mu, sqrt(mu)*F)
std::pair<double, double> mu_rescale(double U, double F, double mu);

// ODE time unit is (gamma/2) * physical time.
double ode_time_per_physical_time(double gamma);

struct SemiState {
    cplx A{0.0, 0.0};
    cplx B{0.0, 0.0};

    Eigen::Vector4d to_real() const {
        return Eigen::Vector4d(A.real(), A.imag(), B.real(), B.imag());
    }
    static SemiState from_real(const Eigen::Vector4d& v) {
        return SemiState{cplx(v[0], v[1]), cplx(v[2], v[3])};
    }
    SemiState swapped() const { return SemiState{B, A}; }
    double int_A() const { return std::norm(A); }
    double int_B() const { return std::norm(B); }
};

SemiState rhs(const SemiState& s, const ScaledParams& q);
Eigen::Matrix4d jacobian(const SemiState& s, const ScaledParams& q);

std::vector<SemiState> symmetric_equilibria(double f, const ScaledParams& q);

struct NewtonResult {
    SemiState state;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};
NewtonResult newton_equilibrium(const SemiState& guess, const ScaledParams& q);

enum class Stability { stable, saddle_1, saddle_2p, marginal };
std::string stability_name(Stability s);

struct BranchPoint {
    double f = 0.0;
    SemiState state;
    std::array<cplx, 4> eigenvalues{};  // sorted by (re, im)
    Stability stability = Stability::stable;
    bool symmetric = false;
};

struct BranchRecord {
    ScaledParams q;  // f field is ignored; each point carries its own f
    std::vector<BranchPoint> points;
    bool terminated_by_failure = false;
    std::string termination;
};

struct StepControl {
    double ds_min = 1e-4;
    double ds_max = 0.05;
    double ds_init = 1e-3;
    double f_lo = 0.0;
    double f_hi = 22.0;
    int max_points = 200000;
};

// Pseudo-arclength continuation: secant predictor, Newton corrector on the
// bordered system. `direction` sets the sign of the initial f tangent.
BranchRecord continue_branch(double f0, const SemiState& s0, const ScaledParams& q,
                             const StepControl& ctl, int direction = +1);

enum class BifKind { pitchfork, hopf, saddle_node };
std::string bif_kind_name(BifKind k);

struct BifurcationPoint {
    BifKind kind;
    double f = 0.0;
    SemiState state;
    double residual = 0.0;  // test-function value at the located point
    bool flagged = false;   // coincident zeros within tolerance
};

std::vector<BifurcationPoint> detect_bifurcations(const BranchRecord& br);

// Antisymmetric-block determinant at a symmetric state with intensity x:
// 1 + (delta + 2 xi x - kappa)^2 - x^2.
double pitchfork_test(double x, const ScaledParams& q);

std::pair<SemiState, SemiState> branch_switch_pitchfork(const BifurcationPoint& bp,
                                                        const ScaledParams& q);

std::vector<std::pair<double, SemiState>> integrate_orbit(const SemiState& s0,
                                                          const ScaledParams& q,
                                                          double T, double dt);

struct LimitCycle {
    bool found = false;
    double f = 0.0;
    double period = 0.0;
    double frequency = 0.0;  // 1/period
    double max_int_A = 0.0;
    double max_int_B = 0.0;
    double residual = 0.0;  // Poincare return-map residual
    std::vector<std::pair<double, SemiState>> orbit;  // one period
};

LimitCycle find_limit_cycle(const ScaledParams& q, const SemiState& seed,
                            double transient = 200.0, double dt = 1e-3);

struct SweepResult {
    ScaledParams q;
    BranchRecord symmetric_branch;
    std::vector<BranchRecord> asymmetric_branches;  // the two swap-related branches
    std::vector<BifurcationPoint> bifurcations;     // sorted by f
    std::vector<LimitCycle> cycles;                 // sampled between the Hopf points
};

// Full one-parameter study: symmetric branch over [f_lo, f_hi], pitchfork
// branch switching, asymmetric continuation through the folds, bifurcation
// classification, and limit-cycle sampling inside the Hopf interval.
SweepResult run_sweep(const ScaledParams& q, double f_lo, double f_hi,
                      int cycle_samples = 10);

}  // namespace dimer
