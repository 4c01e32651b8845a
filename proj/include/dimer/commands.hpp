#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimer/config.hpp"
#include "dimer/semiclassical.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

std::uint64_t fnv1a64_bytes(const void* data, std::size_t n);

// Shortest round-trip decimal form (what every CSV cell uses).
std::string format_double(double v);

// Strict reader for the trajectory CSV schema written by the run commands.
std::vector<SampleRow> read_trajectory_csv(const std::string& path);

// Largest per-mode intensity over all branch points and sampled cycles with
// f <= f_hi.
double branch_intensity_max(const SweepResult& sweep, double f_hi);

// As above but restricted to |f - f_work| <= window, falling back to the
// global bound when the window is empty.
double local_branch_intensity(const SweepResult& sweep, double f_work, double window);

void cmd_sweep(const RunConfig& cfg);
void cmd_trajectory(const RunConfig& cfg);
void cmd_ensemble(const RunConfig& cfg);
void cmd_ramp(const RunConfig& cfg);
void cmd_stats(const RunConfig& cfg);
void cmd_indicators(const RunConfig& cfg);

// Dispatches cfg.command, reporting failures on stderr.
// Returns 0 iff every output was written and all internal checks passed.
int run_command(const RunConfig& cfg);

}  // namespace dimer
