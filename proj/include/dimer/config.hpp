#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dimer/fock.hpp"

namespace dimer {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kPrngId = "std::mt19937_64, one stream per trajectory, seed = base_seed + index";
inline constexpr int kManifestSchema = 1;

struct TrajectorySettings {
    double t_final = 1000.0;
    double dt = 0.002;
    double sample_interval = 0.1;
    double jump_time_tol = 1e-6;
    int n_max = 0;  // photons per mode; 0 selects automatic sizing
    bool entropy = true;
};

struct EnsembleSettings {
    int n_traj = 3;
};

struct RampSettings {
    double rate = 0.216;  // drive amplitude per unit time
    double F_start = 0.0;
    double F_final = 50.0;
};

struct SweepSettings {
    double f_min = 0.0;
    double f_max = 22.0;
    int cycle_samples = 10;
};

struct ViolinSettings {
    double fmu_lo_over_mu = 2.0;
    double fmu_hi_over_mu = 15.75;
    double step_over_mu = 0.5;
    double t_final = 200.0;
    double sample_interval = 0.1;
};

struct StatsSettings {
    std::string mode = "hist2d";  // hist2d | hist1d | spectrum | violin
    std::vector<std::string> inputs;  // trajectory CSVs; empty = traj_*.csv in out_dir
    int bins_2d = 200;
    int bins_1d = 80;
    bool symmetrize = true;
    bool hann = false;
    double range_max = 0.0;  // upper histogram edge; 0 selects automatic sizing
    double transient = 100.0;
    ViolinSettings violin;
};

struct IndicatorSettings {
    std::vector<double> mu = {0.5, 1.0, 2.0, 3.0};
    double fmu_min = 2.0;
    double fmu_max = 22.0;
    double fmu_step = 0.5;
    double t_final = 500.0;
    double sample_interval = 0.1;
    double transient = 100.0;
};

struct RunConfig {
    std::string command;
    PhysicalParams params{-3.5, 4.5, 0.5, 2.0, 0.0, 1.0};
    double f = 0.0;  // scaled pump strength; when nonzero it determines params.F
    TrajectorySettings trajectory;
    EnsembleSettings ensemble;
    RampSettings ramp;
    SweepSettings sweep;
    StatsSettings stats;
    IndicatorSettings indicators;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
    bool heavy = false;
    std::map<std::string, std::string> overrides;  // flag values that won over the file
};

struct CliOptions {
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    bool heavy = false;
};

// Pump-strength conversions: f = 4 F sqrt(|U|) / gamma^(3/2) with the stored
// (mu = 1) parameter values.
double drive_for_f(const PhysicalParams& p, double f);
double f_for_drive(const PhysicalParams& p, double F);

// Layered resolution: defaults <- preset <- config file <- flags. The config
// file may be a run manifest, in which case its embedded config is used.
RunConfig resolve_config(const CliOptions& opt);

RunConfig config_from_json(const nlohmann::json& j, const std::string& source);
nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json preset_json(const std::string& name);  // throws on unknown name
std::vector<std::string> preset_names();

}  // namespace dimer
