#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimer/fock.hpp"

namespace dimer {

struct RampSchedule {
    double rate = 0.0;     // drive increase per unit time
    double F_start = 0.0;  // F(t) = F_start + rate * t
};

struct TrajectoryConfig {
    PhysicalParams params;  // F is the instantaneous drive (ignored under a ramp)
    ModeTruncation trunc;
    double t_final = 100.0;
    double dt = 0.002;
    double sample_interval = 0.1;
    double jump_time_tol = 1e-6;
    double edge_tol = 1e-4;  // abort when boundary weight exceeds this
    std::uint64_t seed = 1;
    WaveFunction initial_state;  // empty: vacuum
    std::optional<RampSchedule> ramp;
    bool compute_entropy = true;
    // Relabels the jump channels through the mode swap; together with a
    // swapped initial state this reproduces the mode-swapped trajectory
    // exactly.
    bool swap_channels = false;
};

struct JumpEvent {
    double t = 0.0;
    int channel = 0;  // 1 or 2
};

struct SampleRow {
    double t = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    double O = 0.0;      // <n1 n2>/(<n1><n2>), NaN marks an undefined sample
    double g2m1 = 0.0;   // second factorial moment <n1(n1-1)>
    double g2m2 = 0.0;
    double entropy = 0.0;  // NaN when disabled
    double F = 0.0;        // instantaneous drive (not exported to CSV)
};

struct TrajectoryRecord {
    std::vector<SampleRow> samples;
    std::vector<JumpEvent> jumps;
    std::uint64_t seed = 0;
    std::string config_digest;
    double dt_used = 0.0;
    int steps_per_sample = 0;
    double max_edge_population = 0.0;  // largest relative boundary weight seen
};

// Gershgorin-bound stability limit for the RK4 step at drive amplitude F.
double rk4_stable_dt(const PhysicalParams& p, const ModeTruncation& t, double F);

// Suggested truncation level for expected per-mode occupation n_peak.
int suggest_n_max(double n_peak);

// Pilot-run truncation rule: evolve a short probe trajectory and grow n_max
// by 25% until the edge population stays below 1e-6.
ModeTruncation adapt_truncation(const TrajectoryConfig& cfg, double probe_time);

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg);

struct EnsembleResult {
    std::vector<TrajectoryRecord> records;
    std::vector<SampleRow> mean;  // ensemble means (entropy averaged where defined)
};

EnsembleResult run_ensemble(const TrajectoryConfig& cfg, int n_traj, std::uint64_t base_seed,
                            int threads = 1);

// Contract-level operations on sparse operators (oracle scale).
WaveFunction evolve_segment(const WaveFunction& psi, const SparseOperator& h_eff, double dt);
double find_jump_time(const WaveFunction& psi0, const SparseOperator& h_eff, double t0,
                      double dt, double r, double tol = 1e-6);
std::pair<WaveFunction, int> perform_jump(const WaveFunction& psi, const ModeTruncation& t,
                                          double channel_draw);

DensityMatrix master_equation_evolve(const PhysicalParams& p, const ModeTruncation& t,
                                     const DensityMatrix& rho0, double t_final, double dt);

// Uniform draw on the open interval (0,1) from a 64-bit word.
inline double uniform_open(std::uint64_t x) {
    return (double(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dimer
