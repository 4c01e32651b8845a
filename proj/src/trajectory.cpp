#include "dimer/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "dimer/observables.hpp"

namespace dimer {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_config(const TrajectoryConfig& c) {
    char buf[512];
    double rr = c.ramp ? c.ramp->rate : 0.0;
    double rf = c.ramp ? c.ramp->F_start : c.params.F;
    std::snprintf(buf, sizeof(buf),
                  "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%d",
                  c.params.J, c.params.Delta, c.params.U, c.params.gamma, c.params.F,
                  c.params.mu, c.trunc.n_max_1, c.trunc.n_max_2, c.t_final, c.dt,
                  c.sample_interval, c.jump_time_tol, c.edge_tol, rr, rf, c.ramp ? 1 : 0,
                  c.swap_channels ? 1 : 0);
    char out[32];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf)));
    return out;
}

// Right-hand side and RK4 stepper for the non-Hermitian Schroedinger
// equation on the Fock lattice. All complex arithmetic is written out in
// real components, and the per-site stencil groups its terms so that on a
// square truncation the derivative commutes with the mode swap bit for bit:
// the hop pair and the per-mode drive pairs are two-term sums whose operands
// exchange places under the swap, and two-term floating-point sums and
// products are commutative exactly.
class DimerEngine {
  public:
    DimerEngine(const PhysicalParams& p, const ModeTruncation& t)
        : nm1_(t.n_max_1), nm2_(t.n_max_2), dim_(t.dim), off_(t.n_max_2 + 1),
          minus_j_(-p.J) {
        int top = std::max(nm1_, nm2_) + 2;
        sq_.resize(top);
        for (int n = 0; n < top; ++n) sq_[n] = std::sqrt(double(n));
        diag_.resize(dim_);
        damp_.resize(dim_);
        for (int n1 = 0; n1 <= nm1_; ++n1) {
            for (int n2 = 0; n2 <= nm2_; ++n2) {
                int k = n1 * off_ + n2;
                diag_[k] = -p.Delta * (n1 + n2) +
                           p.U * (double(n1) * (n1 - 1) + double(n2) * (n2 - 1));
                damp_[k] = 0.5 * p.gamma * (n1 + n2);
            }
        }
        k1_.resize(dim_);
        k2_.resize(dim_);
        k3_.resize(dim_);
        k4_.resize(dim_);
        tmp_.resize(dim_);
    }

    // out = -i H_eff(F) psi
    void derivative(const cplx* psi, double F, cplx* out) const {
        for (int n1 = 0; n1 <= nm1_; ++n1) {
            for (int n2 = 0; n2 <= nm2_; ++n2) {
                int k = n1 * off_ + n2;
                double pr = psi[k].real();
                double pi = psi[k].imag();
                double hr = diag_[k] * pr;
                double hi = diag_[k] * pi;

                double har = 0.0, hai = 0.0, hbr = 0.0, hbi = 0.0;
                if (n1 < nm1_ && n2 > 0) {
                    double c = sq_[n1 + 1] * sq_[n2];
                    const cplx& v = psi[k + off_ - 1];
                    har = c * v.real();
                    hai = c * v.imag();
                }
                if (n1 > 0 && n2 < nm2_) {
                    double c = sq_[n1] * sq_[n2 + 1];
                    const cplx& v = psi[k - off_ + 1];
                    hbr = c * v.real();
                    hbi = c * v.imag();
                }
                hr += minus_j_ * (har + hbr);
                hi += minus_j_ * (hai + hbi);

                double s1r = 0.0, s1i = 0.0;
                if (n1 > 0) {
                    const cplx& v = psi[k - off_];
                    s1r = sq_[n1] * v.real();
                    s1i = sq_[n1] * v.imag();
                }
                if (n1 < nm1_) {
                    const cplx& v = psi[k + off_];
                    s1r += sq_[n1 + 1] * v.real();
                    s1i += sq_[n1 + 1] * v.imag();
                }
                double s2r = 0.0, s2i = 0.0;
                if (n2 > 0) {
                    const cplx& v = psi[k - 1];
                    s2r = sq_[n2] * v.real();
                    s2i = sq_[n2] * v.imag();
                }
                if (n2 < nm2_) {
                    const cplx& v = psi[k + 1];
                    s2r += sq_[n2 + 1] * v.real();
                    s2i += sq_[n2 + 1] * v.imag();
                }
                hr += F * (s1r + s2r);
                hi += F * (s1i + s2i);

                double g = damp_[k];
                out[k] = cplx(hi - g * pr, -(hr + g * pi));
            }
        }
    }

    // One RK4 step of size h with the drive evaluated at the stage times.
    void rk4_step(cplx* psi, double h, double f0, double f_mid, double f_end) {
        double h2 = 0.5 * h;
        derivative(psi, f0, k1_.data());
        for (int k = 0; k < dim_; ++k) tmp_[k] = psi[k] + h2 * k1_[k];
        derivative(tmp_.data(), f_mid, k2_.data());
        for (int k = 0; k < dim_; ++k) tmp_[k] = psi[k] + h2 * k2_[k];
        derivative(tmp_.data(), f_mid, k3_.data());
        for (int k = 0; k < dim_; ++k) tmp_[k] = psi[k] + h * k3_[k];
        derivative(tmp_.data(), f_end, k4_.data());
        double h6 = h / 6.0;
        for (int k = 0; k < dim_; ++k) {
            psi[k] += h6 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
        }
    }

  private:
    int nm1_, nm2_, dim_, off_;
    double minus_j_;
    std::vector<double> sq_;
    std::vector<double> diag_;
    std::vector<double> damp_;
    std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

// phi = a_channel psi (stencil form, swap-covariant together with the
// channel relabelling).
void apply_annihilator_inplace(WaveFunction& psi, const ModeTruncation& t, int channel) {
    int off = t.n_max_2 + 1;
    if (channel == 1) {
        for (int n1 = 0; n1 <= t.n_max_1; ++n1) {
            double c = (n1 < t.n_max_1) ? std::sqrt(double(n1 + 1)) : 0.0;
            for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
                int k = n1 * off + n2;
                psi[k] = (n1 < t.n_max_1) ? cplx(c * psi[k + off].real(), c * psi[k + off].imag())
                                          : cplx(0.0, 0.0);
            }
        }
    } else {
        for (int n1 = 0; n1 <= t.n_max_1; ++n1) {
            for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
                int k = n1 * off + n2;
                double c = (n2 < t.n_max_2) ? std::sqrt(double(n2 + 1)) : 0.0;
                psi[k] = (n2 < t.n_max_2) ? cplx(c * psi[k + 1].real(), c * psi[k + 1].imag())
                                          : cplx(0.0, 0.0);
            }
        }
    }
}

struct DriveSchedule {
    double F0 = 0.0;
    double rate = 0.0;
    double at(double t) const { return F0 + rate * t; }
};

SampleRow make_sample(const WaveFunction& psi, const ModeTruncation& trunc, double t,
                      double F, bool with_entropy) {
    ModeMoments m = mode_moments(psi, trunc);
    SampleRow row;
    row.t = t;
    row.F = F;
    double inv = 1.0 / m.norm2;
    row.n1 = m.n1 * inv;
    row.n2 = m.n2 * inv;
    row.O = (m.n1 * inv > 1e-12 && m.n2 * inv > 1e-12)
                ? (m.n12 * m.norm2) / (m.n1 * m.n2)
                : std::numeric_limits<double>::quiet_NaN();
    row.g2m1 = m.g2m1 * inv;
    row.g2m2 = m.g2m2 * inv;
    row.entropy = with_entropy ? entropy_canonical(psi, trunc)
                               : std::numeric_limits<double>::quiet_NaN();
    return row;
}

void validate_config(const TrajectoryConfig& cfg) {
    if (cfg.trunc.dim <= 0 || cfg.trunc.n_max_1 < 1 || cfg.trunc.n_max_2 < 1)
        throw std::invalid_argument("trajectory: truncation not set");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("trajectory: dt must be positive");
    if (!(cfg.sample_interval > 0.0))
        throw std::invalid_argument("trajectory: sample_interval must be positive");
    if (!(cfg.t_final > 0.0))
        throw std::invalid_argument("trajectory: t_final must be positive");
    if (!(cfg.jump_time_tol > 0.0))
        throw std::invalid_argument("trajectory: jump_time_tol must be positive");
    if (!(cfg.edge_tol > 0.0))
        throw std::invalid_argument("trajectory: edge_tol must be positive");
    if (cfg.initial_state.size() != 0 && cfg.initial_state.size() != cfg.trunc.dim)
        throw std::invalid_argument("trajectory: initial state has wrong dimension");
    if (cfg.params.gamma <= 0.0)
        throw std::invalid_argument("trajectory: gamma must be positive");
}

}  // namespace

double rk4_stable_dt(const PhysicalParams& p, const ModeTruncation& t, double F) {
    double radius = 0.0;
    double fab = std::abs(F);
    double jab = std::abs(p.J);
    for (int n1 = 0; n1 <= t.n_max_1; ++n1) {
        for (int n2 = 0; n2 <= t.n_max_2; ++n2) {
            double row = std::abs(-p.Delta * (n1 + n2) +
                                  p.U * (double(n1) * (n1 - 1) + double(n2) * (n2 - 1))) +
                         0.5 * p.gamma * (n1 + n2);
            if (n1 < t.n_max_1 && n2 > 0) row += jab * std::sqrt(double(n1 + 1) * n2);
            if (n1 > 0 && n2 < t.n_max_2) row += jab * std::sqrt(double(n1) * (n2 + 1));
            double dr = 0.0;
            if (n1 > 0) dr += std::sqrt(double(n1));
            if (n1 < t.n_max_1) dr += std::sqrt(double(n1 + 1));
            if (n2 > 0) dr += std::sqrt(double(n2));
            if (n2 < t.n_max_2) dr += std::sqrt(double(n2 + 1));
            row += fab * dr;
            radius = std::max(radius, row);
        }
    }
    if (radius <= 0.0) return 1.0;
    return 2.5 / radius;
}

int suggest_n_max(double n_peak) {
    double n = std::max(0.0, n_peak);
    return int(std::ceil(n + 5.0 * std::sqrt(n + 1.0) + 4.0));
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg) {
    validate_config(cfg);
    const ModeTruncation& trunc = cfg.trunc;
    DriveSchedule drive;
    if (cfg.ramp) {
        drive.F0 = cfg.ramp->F_start;
        drive.rate = cfg.ramp->rate;
    } else {
        drive.F0 = cfg.params.F;
        drive.rate = 0.0;
    }

    int n_samples = int(std::ceil(cfg.t_final / cfg.sample_interval - 1e-9));
    if (n_samples < 1) n_samples = 1;
    double t_total = n_samples * cfg.sample_interval;

    double f_peak = std::max(std::abs(drive.at(0.0)), std::abs(drive.at(t_total)));
    double dt_stab = rk4_stable_dt(cfg.params, trunc, f_peak);
    double dt_target = std::min(cfg.dt, dt_stab);
    int n_sub = int(std::ceil(cfg.sample_interval / dt_target - 1e-12));
    if (n_sub < 1) n_sub = 1;
    double dt_used = cfg.sample_interval / n_sub;
    double jump_tol = std::min(cfg.jump_time_tol, 0.5 * dt_used);

    DimerEngine engine(cfg.params, trunc);

    WaveFunction psi;
    if (cfg.initial_state.size() == 0) {
        psi = basis_state(trunc, 0, 0);
    } else {
        psi = cfg.initial_state;
        double n2 = pairwise_norm2(psi, trunc);
        if (!(n2 > 0.0)) throw std::invalid_argument("trajectory: initial state has zero norm");
        psi *= 1.0 / std::sqrt(n2);
    }

    std::mt19937_64 rng(cfg.seed);
    double r = uniform_open(rng());

    int jump_first = cfg.swap_channels ? 2 : 1;
    int jump_second = cfg.swap_channels ? 1 : 2;

    TrajectoryRecord rec;
    rec.seed = cfg.seed;
    rec.config_digest = digest_config(cfg);
    rec.dt_used = dt_used;
    rec.steps_per_sample = n_sub;
    rec.samples.reserve(n_samples + 1);
    rec.samples.push_back(make_sample(psi, trunc, 0.0, drive.at(0.0), cfg.compute_entropy));

    WaveFunction psi_pre(trunc.dim), psi_try(trunc.dim);

    for (int s = 0; s < n_samples; ++s) {
        double t_base = s * cfg.sample_interval;
        for (int j = 0; j < n_sub; ++j) {
            double t0 = t_base + j * dt_used;
            double tau = 0.0;
            while (dt_used - tau > 0.0) {
                double h = dt_used - tau;
                double ts = t0 + tau;
                psi_pre = psi;
                engine.rk4_step(psi.data(), h, drive.at(ts), drive.at(ts + 0.5 * h),
                                drive.at(ts + h));
                double nrm2 = pairwise_norm2(psi, trunc);
                if (!std::isfinite(nrm2))
                    throw std::runtime_error("trajectory: state norm became non-finite");
                if (nrm2 > r) {
                    tau += h;
                    continue;
                }
                // The norm crossed the jump threshold inside (ts, ts+h]:
                // locate the crossing by bisection from the saved state.
                double lo = 0.0, hi = h;
                while (hi - lo > jump_tol) {
                    double mid = 0.5 * (lo + hi);
                    psi_try = psi_pre;
                    engine.rk4_step(psi_try.data(), mid, drive.at(ts),
                                    drive.at(ts + 0.5 * mid), drive.at(ts + mid));
                    if (pairwise_norm2(psi_try, trunc) > r)
                        lo = mid;
                    else
                        hi = mid;
                }
                psi = psi_pre;
                engine.rk4_step(psi.data(), hi, drive.at(ts), drive.at(ts + 0.5 * hi),
                                drive.at(ts + hi));
                ModeMoments m = mode_moments(psi, trunc);
                double p_first = (cfg.swap_channels ? m.n2 : m.n1) / (m.n1 + m.n2);
                double u = uniform_open(rng());
                int channel = (u < p_first) ? jump_first : jump_second;
                apply_annihilator_inplace(psi, trunc, channel);
                double post2 = pairwise_norm2(psi, trunc);
                if (!(post2 > 0.0))
                    throw std::runtime_error("trajectory: jump annihilated the state");
                psi *= 1.0 / std::sqrt(post2);
                rec.jumps.push_back({ts + hi, channel});
                r = uniform_open(rng());
                tau += hi;
            }
        }
        double t_sample = (s + 1) * cfg.sample_interval;
        double nrm2 = pairwise_norm2(psi, trunc);
        if (!std::isfinite(nrm2) || nrm2 <= 0.0)
            throw std::runtime_error("trajectory: state norm became non-finite");
        double edge = edge_population(psi, trunc) / nrm2;
        rec.max_edge_population = std::max(rec.max_edge_population, edge);
        if (edge > cfg.edge_tol) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "trajectory: truncation too small (edge weight %.3g at t=%.6g, "
                          "n_max=%d/%d)",
                          edge, t_sample, trunc.n_max_1, trunc.n_max_2);
            throw std::runtime_error(msg);
        }
        rec.samples.push_back(
            make_sample(psi, trunc, t_sample, drive.at(t_sample), cfg.compute_entropy));
    }
    return rec;
}

ModeTruncation adapt_truncation(const TrajectoryConfig& cfg, double probe_time) {
    int n = std::max(std::max(cfg.trunc.n_max_1, cfg.trunc.n_max_2), 4);
    for (int attempt = 0; attempt < 10; ++attempt) {
        TrajectoryConfig probe = cfg;
        probe.trunc = make_truncation(n, n);
        probe.t_final = std::min(cfg.t_final, probe_time);
        probe.compute_entropy = false;
        bool grown = false;
        try {
            TrajectoryRecord rec = run_trajectory(probe);
            if (rec.max_edge_population < 1e-6) return probe.trunc;
            grown = true;
        } catch (const std::runtime_error&) {
            grown = true;
        }
        if (grown) n = std::max(n + 2, int(std::ceil(1.25 * n)));
    }
    return make_truncation(n, n);
}

EnsembleResult run_ensemble(const TrajectoryConfig& cfg, int n_traj, std::uint64_t base_seed,
                            int threads) {
    if (n_traj < 1) throw std::invalid_argument("ensemble: need at least one trajectory");
    EnsembleResult out;
    out.records.resize(n_traj);
    int n_workers = std::max(1, std::min(threads, n_traj));

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n_workers);
    auto worker = [&](int w) {
        try {
            for (;;) {
                int k = next.fetch_add(1);
                if (k >= n_traj) break;
                TrajectoryConfig c = cfg;
                c.seed = base_seed + std::uint64_t(k);
                out.records[k] = run_trajectory(c);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (n_workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Mean over trajectories, accumulated in trajectory index order so the
    // result does not depend on the thread count.
    std::size_t n_rows = out.records[0].samples.size();
    out.mean.resize(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        SampleRow acc;
        acc.t = out.records[0].samples[i].t;
        acc.F = out.records[0].samples[i].F;
        acc.n1 = acc.n2 = 0.0;
        double so = 0.0, sg1 = 0.0, sg2 = 0.0, se = 0.0;
        int co = 0, cg1 = 0, cg2 = 0, ce = 0;
        for (const auto& rec : out.records) {
            const SampleRow& row = rec.samples.at(i);
            acc.n1 += row.n1;
            acc.n2 += row.n2;
            if (std::isfinite(row.O)) { so += row.O; ++co; }
            if (std::isfinite(row.g2m1)) { sg1 += row.g2m1; ++cg1; }
            if (std::isfinite(row.g2m2)) { sg2 += row.g2m2; ++cg2; }
            if (std::isfinite(row.entropy)) { se += row.entropy; ++ce; }
        }
        double inv = 1.0 / n_traj;
        acc.n1 *= inv;
        acc.n2 *= inv;
        acc.O = co ? so / co : std::numeric_limits<double>::quiet_NaN();
        acc.g2m1 = cg1 ? sg1 / cg1 : std::numeric_limits<double>::quiet_NaN();
        acc.g2m2 = cg2 ? sg2 / cg2 : std::numeric_limits<double>::quiet_NaN();
        acc.entropy = ce ? se / ce : std::numeric_limits<double>::quiet_NaN();
        out.mean[i] = acc;
    }
    return out;
}

WaveFunction evolve_segment(const WaveFunction& psi, const SparseOperator& h_eff, double dt) {
    if (psi.size() != h_eff.dim)
        throw std::invalid_argument("evolve_segment: dimension mismatch");
    const cplx mi(0.0, -1.0);
    WaveFunction k1 = mi * (h_eff.mat * psi);
    WaveFunction k2 = mi * (h_eff.mat * (psi + 0.5 * dt * k1).eval());
    WaveFunction k3 = mi * (h_eff.mat * (psi + 0.5 * dt * k2).eval());
    WaveFunction k4 = mi * (h_eff.mat * (psi + dt * k3).eval());
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

double norm2_after(const WaveFunction& psi0, const SparseOperator& h_eff, double tau) {
    if (!(tau > 0.0)) return psi0.squaredNorm();
    int n = std::max(1, static_cast<int>(std::ceil(tau / 0.01)));
    double h = tau / n;
    WaveFunction psi = psi0;
    for (int i = 0; i < n; ++i) psi = evolve_segment(psi, h_eff, h);
    return psi.squaredNorm();
}

}  // namespace

double find_jump_time(const WaveFunction& psi0, const SparseOperator& h_eff, double t0,
                      double dt, double r, double tol) {
    if (!(psi0.squaredNorm() > r))
        throw std::invalid_argument("find_jump_time: norm already at or below threshold");
    if (norm2_after(psi0, h_eff, dt) > r)
        throw std::invalid_argument("find_jump_time: no crossing inside the segment");
    double lo = 0.0, hi = dt;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (norm2_after(psi0, h_eff, mid) > r)
            lo = mid;
        else
            hi = mid;
    }
    return t0 + hi;
}

std::pair<WaveFunction, int> perform_jump(const WaveFunction& psi, const ModeTruncation& t,
                                          double channel_draw) {
    ModeMoments m = mode_moments(psi, t);
    if (!(m.n1 + m.n2 > 0.0))
        throw std::invalid_argument("perform_jump: state carries no photons");
    double p1 = m.n1 / (m.n1 + m.n2);
    int channel = (channel_draw < p1) ? 1 : 2;
    WaveFunction phi = psi;
    apply_annihilator_inplace(phi, t, channel);
    double n2 = pairwise_norm2(phi, t);
    if (!(n2 > 0.0)) throw std::runtime_error("perform_jump: jump annihilated the state");
    phi *= 1.0 / std::sqrt(n2);
    return {phi, channel};
}

DensityMatrix master_equation_evolve(const PhysicalParams& p, const ModeTruncation& t,
                                     const DensityMatrix& rho0, double t_final, double dt) {
    if (rho0.rows() != t.dim || rho0.cols() != t.dim)
        throw std::invalid_argument("master_equation: dimension mismatch");
    if (!(dt > 0.0) || !(t_final > 0.0))
        throw std::invalid_argument("master_equation: non-positive time step or horizon");

    DensityMatrix H = DensityMatrix(build_hermitian_hamiltonian(p, t).mat);
    DensityMatrix a1 = DensityMatrix(mode_annihilator(t, 1).mat);
    DensityMatrix a2 = DensityMatrix(mode_annihilator(t, 2).mat);
    DensityMatrix a1d = a1.adjoint();
    DensityMatrix a2d = a2.adjoint();
    DensityMatrix num1 = a1d * a1;
    DensityMatrix num2 = a2d * a2;
    double hg = 0.5 * p.gamma;
    const cplx mi(0.0, -1.0);

    auto deriv = [&](const DensityMatrix& rho) -> DensityMatrix {
        DensityMatrix d = mi * (H * rho - rho * H);
        d += hg * (2.0 * (a1 * rho * a1d) - num1 * rho - rho * num1);
        d += hg * (2.0 * (a2 * rho * a2d) - num2 * rho - rho * num2);
        return d;
    };

    int steps = int(std::ceil(t_final / dt - 1e-12));
    double h = t_final / steps;
    double tr0 = rho0.trace().real();
    DensityMatrix rho = rho0;
    for (int s = 0; s < steps; ++s) {
        DensityMatrix k1 = deriv(rho);
        DensityMatrix k2 = deriv(rho + (0.5 * h) * k1);
        DensityMatrix k3 = deriv(rho + (0.5 * h) * k2);
        DensityMatrix k4 = deriv(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double tnow = (s + 1) * h;
        double drift = std::abs(rho.trace().real() - tr0);
        if (!std::isfinite(drift) || drift > 1e-8 * (1.0 + tnow))
            throw std::runtime_error("master_equation: trace drift exceeded tolerance");
    }
    double herm = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm > 1e-8)
        throw std::runtime_error("master_equation: state lost Hermiticity");
    return rho;
}

}  // namespace dimer
