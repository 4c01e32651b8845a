#include "dimer/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimer {

ScaledParams scaled_params(const PhysicalParams& p) {
    if (p.gamma <= 0.0) throw std::invalid_argument("scaled_params: gamma must be > 0");
    if (p.U == 0.0) throw std::invalid_argument("scaled_params: U must be nonzero");
    ScaledParams q;
    q.delta = -2.0 * p.Delta / p.gamma;
    q.kappa = -2.0 * p.J / p.gamma;
    q.f = 4.0 * p.F * std::sqrt(std::abs(p.U)) / std::pow(p.gamma, 1.5);
    q.xi = (p.U > 0.0) ? 1 : -1;
    return q;
}

std::pair<double, double> mu_rescale(double U, double F, double mu) {
    if (mu <= 0.0) throw std::invalid_argument("mu_rescale: mu must be > 0");
    return {U / mu, std::sqrt(mu) * F};
}

double ode_time_per_physical_time(double gamma) { return 0.5 * gamma; }

namespace {

// Single-mode derivative; used for both components so that the vector field
// commutes with the swap (A,B) -> (B,A) exactly, bit for bit.
inline cplx mode_rate(const cplx& X, const cplx& Y, const ScaledParams& q) {
    double x2 = X.real() * X.real() + X.imag() * X.imag();
    cplx iXcoef(0.0, q.delta + q.xi * x2);
    cplx iK(0.0, q.kappa);
    return -X + iXcoef * X + iK * Y + q.f;
}

inline Eigen::Vector4d rhs4(const Eigen::Vector4d& v, const ScaledParams& q) {
    SemiState s = SemiState::from_real(v);
    SemiState d{mode_rate(s.A, s.B, q), mode_rate(s.B, s.A, q)};
    return d.to_real();
}

inline Eigen::Vector4d rk4_step(const Eigen::Vector4d& v, const ScaledParams& q, double h) {
    Eigen::Vector4d k1 = rhs4(v, q);
    Eigen::Vector4d k2 = rhs4(v + 0.5 * h * k1, q);
    Eigen::Vector4d k3 = rhs4(v + 0.5 * h * k2, q);
    Eigen::Vector4d k4 = rhs4(v + h * k3, q);
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::array<cplx, 4> sorted_eigenvalues(const Eigen::Matrix4d& m) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    std::array<cplx, 4> ev;
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ev;
}

constexpr double kStabilityMargin = 1e-8;

Stability classify(const std::array<cplx, 4>& ev) {
    int positive = 0;
    bool marginal = false;
    for (const auto& e : ev) {
        if (std::abs(e.real()) <= kStabilityMargin) marginal = true;
        else if (e.real() > 0.0) ++positive;
    }
    if (marginal) return Stability::marginal;
    if (positive == 0) return Stability::stable;
    if (positive == 1) return Stability::saddle_1;
    return Stability::saddle_2p;
}

constexpr double kSymTol = 1e-9;

BranchPoint make_branch_point(double f, const SemiState& s, const ScaledParams& q0) {
    ScaledParams q = q0;
    q.f = f;
    BranchPoint pt;
    pt.f = f;
    pt.state = s;
    pt.eigenvalues = sorted_eigenvalues(jacobian(s, q));
    pt.stability = classify(pt.eigenvalues);
    pt.symmetric = std::abs(s.A - s.B) < kSymTol;
    return pt;
}

}  // namespace

std::string stability_name(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::saddle_1: return "saddle-1";
        case Stability::saddle_2p: return "saddle-2+";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

std::string bif_kind_name(BifKind k) {
    switch (k) {
        case BifKind::pitchfork: return "pitchfork";
        case BifKind::hopf: return "hopf";
        case BifKind::saddle_node: return "saddle-node";
    }
    return "?";
}

SemiState rhs(const SemiState& s, const ScaledParams& q) {
    return SemiState{mode_rate(s.A, s.B, q), mode_rate(s.B, s.A, q)};
}

Eigen::Matrix4d jacobian(const SemiState& s, const ScaledParams& q) {
    double x = s.A.real(), y = s.A.imag();
    double u = s.B.real(), v = s.B.imag();
    double xi = q.xi;
    double sA = x * x + y * y;
    double sB = u * u + v * v;
    Eigen::Matrix4d m;
    m(0, 0) = -1.0 - 2.0 * xi * x * y;
    m(0, 1) = -q.delta - xi * sA - 2.0 * xi * y * y;
    m(0, 2) = 0.0;
    m(0, 3) = -q.kappa;
    m(1, 0) = q.delta + xi * sA + 2.0 * xi * x * x;
    m(1, 1) = -1.0 + 2.0 * xi * x * y;
    m(1, 2) = q.kappa;
    m(1, 3) = 0.0;
    m(2, 0) = 0.0;
    m(2, 1) = -q.kappa;
    m(2, 2) = -1.0 - 2.0 * xi * u * v;
    m(2, 3) = -q.delta - xi * sB - 2.0 * xi * v * v;
    m(3, 0) = q.kappa;
    m(3, 1) = 0.0;
    m(3, 2) = q.delta + xi * sB + 2.0 * xi * u * u;
    m(3, 3) = -1.0 + 2.0 * xi * u * v;
    return m;
}

double pitchfork_test(double x, const ScaledParams& q) {
    double w = q.delta + 2.0 * q.xi * x - q.kappa;
    return 1.0 + w * w - x * x;
}

std::vector<SemiState> symmetric_equilibria(double f, const ScaledParams& q) {
    // x(1 + (c + xi*x)^2) = f^2 with c = delta + kappa and x = |A|^2, i.e.
    // x^3 + 2*c*xi*x^2 + (1+c^2)*x - f^2 = 0 (using xi^2 = 1).
    double c = q.delta + q.kappa;
    if (f == 0.0) return {SemiState{cplx(0, 0), cplx(0, 0)}};
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 2) = f * f;
    companion(1, 0) = 1.0;
    companion(1, 2) = -(1.0 + c * c);
    companion(2, 1) = 1.0;
    companion(2, 2) = -2.0 * c * q.xi;
    Eigen::EigenSolver<Eigen::Matrix3d> es(companion);

    std::vector<double> roots;
    for (int i = 0; i < 3; ++i) {
        cplx r = es.eigenvalues()[i];
        if (std::abs(r.imag()) < 1e-8 && r.real() > 1e-12) roots.push_back(r.real());
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                roots.end());

    ScaledParams qf = q;
    qf.f = f;
    std::vector<SemiState> out;
    for (double x : roots) {
        // A(1 - i(c + xi*x)) = f on the symmetric subspace.
        cplx A = f / cplx(1.0, -(c + q.xi * x));
        // Polish with Newton restricted to A = B (keeps the state exactly symmetric).
        for (int it = 0; it < 50; ++it) {
            cplx g = mode_rate(A, A, qf);
            if (std::abs(g) < 1e-14) break;
            double ar = A.real(), ai = A.imag();
            double s2 = ar * ar + ai * ai;
            // d(g)/d(ar, ai) for g = -A + i(delta + kappa + xi|A|^2)A + f
            double w = q.delta + q.kappa + q.xi * s2;
            Eigen::Matrix2d J;
            J(0, 0) = -1.0 - 2.0 * q.xi * ar * ai;
            J(0, 1) = -w - 2.0 * q.xi * ai * ai;
            J(1, 0) = w + 2.0 * q.xi * ar * ar;
            J(1, 1) = -1.0 + 2.0 * q.xi * ar * ai;
            Eigen::Vector2d rhs2(-g.real(), -g.imag());
            Eigen::Vector2d d = J.fullPivLu().solve(rhs2);
            A = cplx(ar + d[0], ai + d[1]);
        }
        out.push_back(SemiState{A, A});
    }
    return out;
}

NewtonResult newton_equilibrium(const SemiState& guess, const ScaledParams& q) {
    NewtonResult res;
    Eigen::Vector4d v = guess.to_real();
    double rn = rhs4(v, q).norm();
    int it = 0;
    for (; it < 100; ++it) {
        Eigen::Vector4d g = rhs4(v, q);
        rn = g.norm();
        if (rn < 1e-12) break;
        Eigen::Matrix4d J = jacobian(SemiState::from_real(v), q);
        Eigen::Vector4d step = J.colPivHouseholderQr().solve(-g);
        if (!step.allFinite()) break;
        double lambda = 1.0;
        Eigen::Vector4d vn = v + step;
        double rnew = rhs4(vn, q).norm();
        int halvings = 0;
        while (rnew >= rn && halvings < 25) {
            lambda *= 0.5;
            vn = v + lambda * step;
            rnew = rhs4(vn, q).norm();
            ++halvings;
        }
        if (rnew >= rn) break;  // no descent; report current iterate
        v = vn;
    }
    res.state = SemiState::from_real(v);
    res.residual = rhs4(v, q).norm();
    res.converged = res.residual < 1e-12;
    res.iterations = it;
    return res;
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// G_f: derivative of the vector field with respect to f.
const Eigen::Vector4d kGf(1.0, 0.0, 1.0, 0.0);

// One corrector solve of the bordered system
//   rhs(v; f) = 0,  tangent . (z - z_pred) = 0.
bool correct_bordered(Vec5& z, const Vec5& z_pred, const Vec5& tangent,
                      const ScaledParams& q0, int* iters_out = nullptr) {
    ScaledParams q = q0;
    for (int it = 0; it < 14; ++it) {
        q.f = z[4];
        Eigen::Vector4d v = z.head<4>();
        Eigen::Vector4d g = rhs4(v, q);
        double orth = tangent.dot(z - z_pred);
        if (g.norm() < 1e-12 && std::abs(orth) < 1e-10) {
            if (iters_out) *iters_out = it;
            return true;
        }
        Mat5 M = Mat5::Zero();
        M.topLeftCorner<4, 4>() = jacobian(SemiState::from_real(v), q);
        M.topRightCorner<4, 1>() = kGf;
        M.bottomRows<1>() = tangent.transpose();
        Vec5 r;
        r.head<4>() = -g;
        r[4] = -orth;
        Vec5 step = M.colPivHouseholderQr().solve(r);
        if (!step.allFinite()) return false;
        z += step;
        if (step.norm() > 1e3) return false;
    }
    return false;
}

}  // namespace

BranchRecord continue_branch(double f0, const SemiState& s0, const ScaledParams& q,
                             const StepControl& ctl, int direction) {
    BranchRecord rec;
    rec.q = q;

    Vec5 z;
    z.head<4>() = s0.to_real();
    z[4] = f0;

    // Initial tangent from the linearised system J t_v + G_f t_f = 0.
    ScaledParams qf = q;
    qf.f = f0;
    Eigen::Matrix4d J0 = jacobian(s0, qf);
    Eigen::Vector4d tv = J0.colPivHouseholderQr().solve(-kGf);
    Vec5 tangent;
    tangent.head<4>() = tv;
    tangent[4] = 1.0;
    tangent.normalize();
    if (direction < 0) tangent = -tangent;

    rec.points.push_back(make_branch_point(f0, s0, q));

    const bool started_asymmetric = std::abs(s0.A - s0.B) >= kSymTol;
    cplx prev_diff = s0.A - s0.B;

    double ds = ctl.ds_init;
    const double f_margin = 1e-9;

    while (static_cast<int>(rec.points.size()) < ctl.max_points) {
        Vec5 z_pred = z + ds * tangent;
        Vec5 z_new = z_pred;
        int iters = 0;
        if (!correct_bordered(z_new, z_pred, tangent, q, &iters)) {
            ds *= 0.5;
            if (ds < ctl.ds_min) {
                rec.terminated_by_failure = true;
                rec.termination = "corrector failed at minimal step";
                break;
            }
            continue;
        }

        Vec5 secant = z_new - z;
        double slen = secant.norm();
        if (slen < 1e-15) {
            rec.terminated_by_failure = true;
            rec.termination = "stagnated";
            break;
        }
        secant /= slen;
        if (secant.dot(tangent) < 0.0) secant = -secant;

        SemiState s_new = SemiState::from_real(z_new.head<4>());
        cplx diff = s_new.A - s_new.B;

        if (started_asymmetric) {
            // Crossing through the symmetric subspace means the branch has
            // reached a pitchfork and is re-emerging as its own swap image.
            double cross = diff.real() * prev_diff.real() + diff.imag() * prev_diff.imag();
            if (std::abs(diff) < 1e-8 || cross < 0.0) {
                rec.termination = "merged with symmetric branch";
                break;
            }
        }

        z = z_new;
        tangent = secant;
        rec.points.push_back(make_branch_point(z[4], s_new, q));
        prev_diff = diff;

        if (iters <= 3) ds = std::min(ds * 1.4, ctl.ds_max);
        else if (iters > 6) ds = std::max(ds * 0.6, ctl.ds_min);

        if (z[4] > ctl.f_hi + f_margin || z[4] < ctl.f_lo - f_margin) {
            rec.termination = "left f range";
            break;
        }
    }
    if (rec.termination.empty() && static_cast<int>(rec.points.size()) >= ctl.max_points)
        rec.termination = "max points reached";
    return rec;
}

namespace {

// Test function for Hopf points: largest real part over complex-conjugate
// eigenvalue pairs, or NaN when the spectrum is entirely real.
double hopf_test(const std::array<cplx, 4>& ev) {
    double g = std::numeric_limits<double>::quiet_NaN();
    for (const auto& e : ev)
        if (std::abs(e.imag()) > 1e-8)
            g = std::isnan(g) ? e.real() : std::max(g, e.real());
    return g;
}

double det_at(const SemiState& s, const ScaledParams& q0, double f) {
    ScaledParams q = q0;
    q.f = f;
    return jacobian(s, q).determinant();
}

// Newton-correct at fixed f starting from an interpolated state.
bool solve_at_f(SemiState& s, double f, const ScaledParams& q0) {
    ScaledParams q = q0;
    q.f = f;
    NewtonResult nr = newton_equilibrium(s, q);
    if (!nr.converged && nr.residual > 1e-10) return false;
    s = nr.state;
    return true;
}

// Symmetric-branch intensity at pump f, continuous with a reference value.
double symmetric_x_near(double f, double x_ref, const ScaledParams& q) {
    auto eqs = symmetric_equilibria(f, q);
    double best = x_ref;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& s : eqs) {
        double x = s.int_A();
        if (std::abs(x - x_ref) < dist) {
            dist = std::abs(x - x_ref);
            best = x;
        }
    }
    return best;
}

SemiState symmetric_state_near(double f, double x_ref, const ScaledParams& q) {
    auto eqs = symmetric_equilibria(f, q);
    SemiState best = eqs.front();
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& s : eqs) {
        double x = s.int_A();
        if (std::abs(x - x_ref) < dist) {
            dist = std::abs(x - x_ref);
            best = s;
        }
    }
    return best;
}

}  // namespace

std::vector<BifurcationPoint> detect_bifurcations(const BranchRecord& br) {
    std::vector<BifurcationPoint> out;
    const ScaledParams& q = br.q;
    const auto& pts = br.points;

    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const BranchPoint& p1 = pts[i];
        const BranchPoint& p2 = pts[i + 1];

        if (p1.symmetric && p2.symmetric) {
            // Pitchfork: antisymmetric-block determinant changes sign.  The
            // symmetric-block determinant is scanned as well, which would pick
            // up folds of the symmetric branch for parameter sets that have
            // them.  Hopf points cannot occur on the symmetric branch: both
            // 2x2 blocks have trace -2, so complex pairs sit at Re = -1.
            double x1 = p1.state.int_A(), x2 = p2.state.int_A();
            double g1 = pitchfork_test(x1, q);
            double g2 = pitchfork_test(x2, q);
            if (g1 == 0.0 || g1 * g2 < 0.0) {
                double fa = p1.f, fb = p2.f;
                double xa = x1;
                for (int it = 0; it < 200 && std::abs(fb - fa) > 1e-10; ++it) {
                    double fm = 0.5 * (fa + fb);
                    double xm = symmetric_x_near(fm, xa, q);
                    double gm = pitchfork_test(xm, q);
                    if ((g1 < 0.0) == (gm < 0.0)) { fa = fm; g1 = gm; xa = xm; }
                    else fb = fm;
                }
                double fP = 0.5 * (fa + fb);
                BifurcationPoint bp;
                bp.kind = BifKind::pitchfork;
                bp.f = fP;
                bp.state = symmetric_state_near(fP, xa, q);
                bp.residual = pitchfork_test(bp.state.int_A(), q);
                out.push_back(bp);
            }
            continue;
        }

        if (!p1.symmetric && !p2.symmetric) {
            // Saddle-node: determinant of the Jacobian changes sign.
            double d1 = det_at(p1.state, q, p1.f);
            double d2 = det_at(p2.state, q, p2.f);
            if (d1 == 0.0 || d1 * d2 < 0.0) {
                Vec5 za, zb;
                za.head<4>() = p1.state.to_real(); za[4] = p1.f;
                zb.head<4>() = p2.state.to_real(); zb[4] = p2.f;
                Vec5 tangent = (zb - za).normalized();
                double ga = d1;
                for (int it = 0; it < 120; ++it) {
                    Vec5 zm = 0.5 * (za + zb);
                    Vec5 z = zm;
                    if (!correct_bordered(z, zm, tangent, q)) break;
                    double gm = det_at(SemiState::from_real(z.head<4>()), q, z[4]);
                    if ((ga < 0.0) == (gm < 0.0)) { za = z; ga = gm; }
                    else zb = z;
                    if (std::abs(zb[4] - za[4]) < 1e-10 && (zb - za).norm() < 1e-9) break;
                }
                SemiState s_loc = SemiState::from_real(za.head<4>());
                if (std::abs(s_loc.A - s_loc.B) > 1e-4) {
                    BifurcationPoint bp;
                    bp.kind = BifKind::saddle_node;
                    bp.f = za[4];
                    bp.state = s_loc;
                    bp.residual = det_at(s_loc, q, za[4]);
                    out.push_back(bp);
                }
            }

            // Hopf: real part of a complex pair changes sign.
            double h1 = hopf_test(p1.eigenvalues);
            double h2 = hopf_test(p2.eigenvalues);
            if (!std::isnan(h1) && !std::isnan(h2) && (h1 == 0.0 || h1 * h2 < 0.0) &&
                p1.f != p2.f) {
                double fa = p1.f, fb = p2.f;
                SemiState sa = p1.state;
                double ga = h1;
                for (int it = 0; it < 200 && std::abs(fb - fa) > 1e-10; ++it) {
                    double fm = 0.5 * (fa + fb);
                    SemiState sm = sa;
                    if (!solve_at_f(sm, fm, q)) break;
                    ScaledParams qm = q;
                    qm.f = fm;
                    double gm = hopf_test(sorted_eigenvalues(jacobian(sm, qm)));
                    if (std::isnan(gm)) break;
                    if ((ga < 0.0) == (gm < 0.0)) { fa = fm; ga = gm; sa = sm; }
                    else fb = fm;
                }
                double fH = 0.5 * (fa + fb);
                SemiState sH = sa;
                solve_at_f(sH, fH, q);
                ScaledParams qH = q;
                qH.f = fH;
                auto ev = sorted_eigenvalues(jacobian(sH, qH));
                bool complex_pair = false;
                for (const auto& e : ev)
                    if (std::abs(e.imag()) > 1e-6 && std::abs(e.real()) < 1e-4) complex_pair = true;
                if (complex_pair) {
                    BifurcationPoint bp;
                    bp.kind = BifKind::hopf;
                    bp.f = fH;
                    bp.state = sH;
                    bp.residual = hopf_test(ev);
                    out.push_back(bp);
                }
            }
        }
    }

    std::sort(out.begin(), out.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.f < b.f; });
    for (size_t i = 0; i + 1 < out.size(); ++i)
        if (std::abs(out[i].f - out[i + 1].f) < 1e-6 && out[i].kind != out[i + 1].kind) {
            out[i].flagged = true;
            out[i + 1].flagged = true;
        }
    return out;
}

std::pair<SemiState, SemiState> branch_switch_pitchfork(const BifurcationPoint& bp,
                                                        const ScaledParams& q) {
    if (bp.kind != BifKind::pitchfork)
        throw std::invalid_argument("branch_switch_pitchfork: not a pitchfork point");

    // Null direction of the antisymmetric linearisation block at the
    // symmetric state A0: for a perturbation (A,B) = (A0 + e, A0 - e),
    // de/dt = c e + d conj(e) with c = -1 + i(delta + 2 xi x - kappa),
    // d = i xi A0^2.
    cplx A0 = bp.state.A;
    double x = std::norm(A0);
    cplx c(-1.0, q.delta + 2.0 * q.xi * x - q.kappa);
    cplx d = cplx(0.0, double(q.xi)) * (A0 * A0);
    Eigen::Matrix2d Ma;
    Ma(0, 0) = c.real() + d.real();
    Ma(0, 1) = -c.imag() + d.imag();
    Ma(1, 0) = c.imag() + d.imag();
    Ma(1, 1) = c.real() - d.real();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(Ma, Eigen::ComputeFullV);
    Eigen::Vector2d v = svd.matrixV().col(1);  // direction of the smallest singular value
    cplx e(v[0], v[1]);

    const double eps = 1e-3;
    const double df = 1e-3;
    for (double side : {+1.0, -1.0}) {
        ScaledParams qs = q;
        qs.f = bp.f + side * df;
        SemiState guess_p{A0 + eps * e, A0 - eps * e};
        SemiState guess_m{A0 - eps * e, A0 + eps * e};
        NewtonResult rp = newton_equilibrium(guess_p, qs);
        NewtonResult rm = newton_equilibrium(guess_m, qs);
        if (rp.converged && rm.converged &&
            std::abs(rp.state.A - rp.state.B) > 1e-6 &&
            std::abs(rm.state.A - rm.state.B) > 1e-6)
            return {rp.state, rm.state};
    }
    throw std::runtime_error("branch_switch_pitchfork: corrector failed on both sides");
}

std::vector<std::pair<double, SemiState>> integrate_orbit(const SemiState& s0,
                                                          const ScaledParams& q,
                                                          double T, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_orbit: dt must be > 0");
    std::vector<std::pair<double, SemiState>> out;
    Eigen::Vector4d v = s0.to_real();
    long n = std::lround(std::ceil(T / dt));
    out.reserve(n + 1);
    out.emplace_back(0.0, s0);
    for (long i = 0; i < n; ++i) {
        double h = std::min(dt, T - i * dt);
        v = rk4_step(v, q, h);
        if (!v.allFinite()) throw std::runtime_error("integrate_orbit: state diverged");
        out.emplace_back(std::min((i + 1) * dt, T), SemiState::from_real(v));
    }
    return out;
}

LimitCycle find_limit_cycle(const ScaledParams& q, const SemiState& seed,
                            double transient, double dt) {
    LimitCycle lc;
    lc.f = q.f;

    Eigen::Vector4d v = seed.to_real();
    long n_trans = std::lround(transient / dt);
    for (long i = 0; i < n_trans; ++i) {
        v = rk4_step(v, q, dt);
        if (!v.allFinite()) return lc;
    }

    const double T_obs = 150.0;
    long n_obs = std::lround(T_obs / dt);
    std::vector<Eigen::Vector4d> samples;
    samples.reserve(n_obs);
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    for (long i = 0; i < n_obs; ++i) {
        v = rk4_step(v, q, dt);
        if (!v.allFinite()) return lc;
        samples.push_back(v);
        mean += v;
    }
    mean /= double(n_obs);

    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    for (const auto& s : samples) cov += (s - mean) * (s - mean).transpose();
    cov /= double(n_obs);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
    if (es.eigenvalues()[3] < 1e-16) return lc;  // no oscillation left
    Eigen::Vector4d normal = es.eigenvectors().col(3);

    // Upward crossings of the section through the mean.
    std::vector<double> t_cross;
    std::vector<Eigen::Vector4d> s_cross;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        double g1 = normal.dot(samples[i] - mean);
        double g2 = normal.dot(samples[i + 1] - mean);
        if (g1 < 0.0 && g2 >= 0.0) {
            double tl = dt * g1 / (g1 - g2);  // local offset past sample i
            Eigen::Vector4d w = samples[i];
            double t_acc = 0.0;
            for (int it = 0; it < 8; ++it) {
                double step = tl - t_acc;
                w = rk4_step(w, q, step);
                t_acc = tl;
                double g = normal.dot(w - mean);
                double gdot = normal.dot(rhs4(w, q));
                if (gdot == 0.0) break;
                double corr = g / gdot;
                tl -= corr;
                if (std::abs(corr) < 1e-14) break;
            }
            t_cross.push_back(double(i) * dt + tl);
            s_cross.push_back(w);
        }
    }
    if (t_cross.size() < 4) return lc;

    size_t k_use = std::min<size_t>(20, t_cross.size() - 1);
    size_t first = t_cross.size() - 1 - k_use;
    double period = (t_cross.back() - t_cross[first]) / double(k_use);
    double residual = 0.0;
    for (size_t i = first; i + 1 < t_cross.size(); ++i)
        residual = std::max(residual, (s_cross[i + 1] - s_cross[i]).norm());

    lc.period = period;
    lc.frequency = 1.0 / period;
    lc.residual = residual;
    lc.found = residual < 1e-8 && period > 0.0;

    const int n_orb = 256;
    double h = period / n_orb;
    Eigen::Vector4d w = s_cross.back();
    lc.orbit.reserve(n_orb + 1);
    lc.max_int_A = 0.0;
    lc.max_int_B = 0.0;
    for (int i = 0; i <= n_orb; ++i) {
        SemiState s = SemiState::from_real(w);
        lc.orbit.emplace_back(i * h, s);
        lc.max_int_A = std::max(lc.max_int_A, s.int_A());
        lc.max_int_B = std::max(lc.max_int_B, s.int_B());
        if (i < n_orb) w = rk4_step(w, q, h);
    }
    return lc;
}

SweepResult run_sweep(const ScaledParams& q, double f_lo, double f_hi, int cycle_samples) {
    SweepResult res;
    res.q = q;

    StepControl ctl;
    ctl.f_lo = f_lo;
    ctl.f_hi = f_hi;

    // Symmetric branch. The f = 0 start is the origin, known analytically.
    double f_start = std::max(f_lo, 0.0);
    SemiState s_start;
    if (f_start == 0.0) s_start = SemiState{cplx(0, 0), cplx(0, 0)};
    else s_start = symmetric_equilibria(f_start, q).front();
    res.symmetric_branch = continue_branch(f_start, s_start, q, ctl, +1);

    auto bifs = detect_bifurcations(res.symmetric_branch);
    for (const auto& b : bifs) res.bifurcations.push_back(b);

    // Asymmetric branches from the first pitchfork.
    const BifurcationPoint* first_pf = nullptr;
    for (const auto& b : res.bifurcations)
        if (b.kind == BifKind::pitchfork && (!first_pf || b.f < first_pf->f)) first_pf = &b;

    if (first_pf) {
        auto seeds = branch_switch_pitchfork(*first_pf, q);
        ScaledParams qs = q;
        double f_seed = first_pf->f + 1e-3;
        // The switch helper already picked the side on which the asymmetric
        // pair exists; recover it from the seed residual.
        qs.f = f_seed;
        if (rhs(seeds.first, qs).to_real().norm() > 1e-8) f_seed = first_pf->f - 1e-3;

        for (const SemiState& seed : {seeds.first, seeds.second}) {
            BranchRecord abr = continue_branch(f_seed, seed, q, ctl, +1);
            res.asymmetric_branches.push_back(std::move(abr));
        }
        if (!res.asymmetric_branches.empty()) {
            auto abifs = detect_bifurcations(res.asymmetric_branches.front());
            for (const auto& b : abifs) res.bifurcations.push_back(b);
        }
    }

    std::sort(res.bifurcations.begin(), res.bifurcations.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.f < b.f; });

    // Limit cycles between the Hopf points.
    std::vector<double> hopf_f;
    for (const auto& b : res.bifurcations)
        if (b.kind == BifKind::hopf) hopf_f.push_back(b.f);
    if (hopf_f.size() >= 2 && cycle_samples > 0 && !res.asymmetric_branches.empty()) {
        double h1 = hopf_f.front(), h2 = hopf_f.back();
        double margin = 0.02 * (h2 - h1);
        const BranchRecord& abr = res.asymmetric_branches.front();
        for (int k = 0; k < cycle_samples; ++k) {
            double fc = h1 + margin + (h2 - h1 - 2 * margin) * (cycle_samples == 1 ? 0.5 : double(k) / (cycle_samples - 1));
            // Nearest recorded asymmetric point, then Newton at fixed f.
            const BranchPoint*nearest = nullptr;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& pt : abr.points) {
                double dfp = std::abs(pt.f - fc);
                if (dfp < best) { best = dfp; nearest = &pt; }
            }
            if (!nearest) continue;
            SemiState eq = nearest->state;
            if (!solve_at_f(eq, fc, q)) continue;
            ScaledParams qc = q;
            qc.f = fc;
            // Perturb along the unstable complex pair's eigenvector.
            Eigen::EigenSolver<Eigen::Matrix4d> ev(jacobian(eq, qc));
            Eigen::Vector4d dir = Eigen::Vector4d::Ones().normalized();
            double best_re = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < 4; ++i) {
                cplx lam = ev.eigenvalues()[i];
                if (std::abs(lam.imag()) > 1e-8 && lam.real() > best_re) {
                    best_re = lam.real();
                    Eigen::Vector4d re = ev.eigenvectors().col(i).real();
                    if (re.norm() > 1e-12) dir = re.normalized();
                }
            }
            SemiState seed = SemiState::from_real(eq.to_real() + 1e-2 * dir);
            LimitCycle lc = find_limit_cycle(qc, seed);
            if (lc.found) res.cycles.push_back(std::move(lc));
        }
    }
    return res;
}

}  // namespace dimer
