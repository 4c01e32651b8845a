#include "dimer/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "dimer/observables.hpp"
#include "dimer/stats.hpp"

namespace fs = std::filesystem;

namespace dimer {

using nlohmann::json;

std::uint64_t fnv1a64_bytes(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kTrajHeader = "t,n1,n2,O,g2m1,g2m2,entropy";

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Manifest lifecycle around a command: written with status "running" before
// any work, finalized with checksums and wall clock after.
class RunWriter {
  public:
    explicit RunWriter(const RunConfig& cfg)
        : dir_(cfg.out_dir), start_(std::chrono::steady_clock::now()) {
        fs::create_directories(dir_);
        manifest_["schema_version"] = kManifestSchema;
        manifest_["code_version"] = kVersion;
        manifest_["command"] = cfg.command;
        manifest_["prng"] = kPrngId;
        manifest_["config"] = config_to_json(cfg);
        manifest_["overrides"] = cfg.overrides;
        manifest_["status"] = "running";
        manifest_["outputs"] = json::object();
        flush();
    }

    void extra(const std::string& key, json v) { manifest_[key] = std::move(v); }

    void write(const std::string& name, const std::string& content) {
        atomic_write(dir_ / name, content);
        manifest_["outputs"][name] = {{"bytes", content.size()},
                                      {"fnv1a64", hex64(fnv1a64_bytes(content.data(), content.size()))}};
    }

    void finish() {
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
        manifest_["wall_clock_seconds"] = elapsed.count();
        manifest_["status"] = "complete";
        flush();
    }

  private:
    void flush() { atomic_write(dir_ / "manifest.json", manifest_.dump(2) + "\n"); }

    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    json manifest_;
};

std::string trajectory_csv(const std::vector<SampleRow>& rows) {
    std::string out(kTrajHeader);
    out += '\n';
    for (const SampleRow& r : rows) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.n1);
        out += ',';
        out += format_double(r.n2);
        out += ',';
        out += format_double(r.O);
        out += ',';
        out += format_double(r.g2m1);
        out += ',';
        out += format_double(r.g2m2);
        out += ',';
        out += format_double(r.entropy);
        out += '\n';
    }
    return out;
}

std::string jumps_ndjson(const std::vector<JumpEvent>& jumps) {
    std::string out;
    for (const JumpEvent& j : jumps) {
        out += "{\"t\": ";
        out += format_double(j.t);
        out += ", \"channel\": ";
        out += std::to_string(j.channel);
        out += "}\n";
    }
    return out;
}

constexpr const char* kBranchHeader =
    "f,reA,imA,reB,imB,int_A,int_B,ev1re,ev1im,ev2re,ev2im,ev3re,ev3im,ev4re,ev4im,"
    "stability,symmetric";

std::string branch_csv(const BranchRecord& br) {
    std::string out(kBranchHeader);
    out += '\n';
    for (const BranchPoint& p : br.points) {
        out += format_double(p.f);
        out += ',';
        out += format_double(p.state.A.real());
        out += ',';
        out += format_double(p.state.A.imag());
        out += ',';
        out += format_double(p.state.B.real());
        out += ',';
        out += format_double(p.state.B.imag());
        out += ',';
        out += format_double(p.state.int_A());
        out += ',';
        out += format_double(p.state.int_B());
        for (const cplx& ev : p.eigenvalues) {
            out += ',';
            out += format_double(ev.real());
            out += ',';
            out += format_double(ev.imag());
        }
        out += ',';
        out += stability_name(p.stability);
        out += ',';
        out += p.symmetric ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string bifurcations_csv(const std::vector<BifurcationPoint>& bifs) {
    std::string out("kind,f,int_A,int_B\n");
    for (const BifurcationPoint& b : bifs) {
        out += bif_kind_name(b.kind);
        out += ',';
        out += format_double(b.f);
        out += ',';
        out += format_double(b.state.int_A());
        out += ',';
        out += format_double(b.state.int_B());
        out += '\n';
    }
    return out;
}

std::string cycles_csv(const std::vector<LimitCycle>& cycles) {
    std::string out("f,period,frequency,max_int_A,max_int_B,residual\n");
    for (const LimitCycle& c : cycles) {
        if (!c.found) continue;
        out += format_double(c.f);
        out += ',';
        out += format_double(c.period);
        out += ',';
        out += format_double(c.frequency);
        out += ',';
        out += format_double(c.max_int_A);
        out += ',';
        out += format_double(c.max_int_B);
        out += ',';
        out += format_double(c.residual);
        out += '\n';
    }
    return out;
}

std::string hist2d_csv(const Histogram2D& h, const std::string& label) {
    std::string out;
    out += "# observable," + label + "\n";
    out += "# xlo," + format_double(h.x_lo) + "\n";
    out += "# xhi," + format_double(h.x_hi) + "\n";
    out += "# ylo," + format_double(h.y_lo) + "\n";
    out += "# yhi," + format_double(h.y_hi) + "\n";
    out += "# nx," + std::to_string(h.nx) + "\n";
    out += "# ny," + std::to_string(h.ny) + "\n";
    out += "# total," + std::to_string(h.total) + "\n";
    out += "# overflow," + std::to_string(h.overflow) + "\n";
    for (int ix = 0; ix < h.nx; ++ix) {
        for (int iy = 0; iy < h.ny; ++iy) {
            if (iy) out += ',';
            out += format_double(h.at(ix, iy));
        }
        out += '\n';
    }
    return out;
}

std::string hist1d_csv(const Histogram1D& h, const std::string& label) {
    std::string out;
    out += "# observable," + label + "\n";
    out += "# lo," + format_double(h.lo) + "\n";
    out += "# hi," + format_double(h.hi) + "\n";
    out += "# bins," + std::to_string(h.counts.size()) + "\n";
    out += "# total," + std::to_string(h.total) + "\n";
    out += "# overflow," + std::to_string(h.overflow) + "\n";
    out += "# scale," + format_double(h.scale) + "\n";
    out += "center,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += format_double(h.center(int(i)));
        out += ',';
        out += format_double(h.counts[i]);
        out += '\n';
    }
    return out;
}

std::string spectrum_csv(const PowerSpectrum& s) {
    std::string out("freq,magnitude\n");
    for (std::size_t i = 0; i < s.freq.size(); ++i) {
        out += format_double(s.freq[i]);
        out += ',';
        out += format_double(s.mag[i]);
        out += '\n';
    }
    return out;
}

double parse_field(const std::string& text, const std::string& path) {
    const char* b = text.c_str();
    char* end = nullptr;
    double v = std::strtod(b, &end);
    if (end == b) throw std::runtime_error("stats: malformed number in " + path);
    return v;
}

// The working scaled pump strength of a run config.
double working_f(const RunConfig& cfg) {
    if (cfg.f > 0.0) return cfg.f;
    return f_for_drive(cfg.params, cfg.params.F);
}

TrajectoryConfig base_trajectory_config(const RunConfig& cfg) {
    TrajectoryConfig t;
    t.params = apply_mu_scaling(cfg.params);
    t.t_final = cfg.trajectory.t_final;
    t.dt = cfg.trajectory.dt;
    t.sample_interval = cfg.trajectory.sample_interval;
    t.jump_time_tol = cfg.trajectory.jump_time_tol;
    t.compute_entropy = cfg.trajectory.entropy;
    t.seed = cfg.seed;
    return t;
}

json truncation_json(const ModeTruncation& t, bool automatic) {
    return json{{"n_max_1", t.n_max_1}, {"n_max_2", t.n_max_2}, {"auto", automatic}};
}

// Cost estimate used both for the printed notice and the heavy-run gate.
double estimate_minutes(const TrajectoryConfig& t, int n_runs) {
    double f_peak = std::abs(t.params.F);
    if (t.ramp)
        f_peak = std::max(std::abs(t.ramp->F_start),
                          std::abs(t.ramp->F_start + t.ramp->rate * t.t_final));
    double dt_s = std::min(t.dt, rk4_stable_dt(t.params, t.trunc, f_peak));
    double steps = t.t_final / dt_s;
    double flops = steps * double(t.trunc.dim) * 120.0 * n_runs;
    return flops / 2.0e9 / 60.0;
}

void heavy_gate(const RunConfig& cfg, const TrajectoryConfig& t, int n_runs) {
    double minutes = estimate_minutes(t, n_runs);
    if (minutes > 20.0 && !cfg.heavy) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "estimated %.0f minutes of compute (truncation %d, %d run%s); "
                      "rerun with --heavy to proceed",
                      minutes, t.trunc.n_max_1, n_runs, n_runs == 1 ? "" : "s");
        throw std::runtime_error(msg);
    }
    if (minutes > 1.0)
        std::cerr << "note: estimated compute ~" << int(std::ceil(minutes)) << " min\n";
}

// Runs fn, growing a square truncation by 25% on truncation-overflow aborts.
template <typename Fn>
auto run_with_growth(TrajectoryConfig& tcfg, bool allow_grow, Fn fn) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fn(tcfg);
        } catch (const std::runtime_error& e) {
            bool overflow = std::string(e.what()).find("truncation too small") != std::string::npos;
            if (!allow_grow || attempt >= 3 || !overflow) throw;
            int n = std::max(tcfg.trunc.n_max_1 + 2,
                             int(std::ceil(1.25 * tcfg.trunc.n_max_1)));
            tcfg.trunc = make_truncation(n, n);
            std::cerr << "note: truncation grown to " << n << " photons per mode\n";
        }
    }
}

SweepResult sizing_sweep(const RunConfig& cfg, double f_hi) {
    ScaledParams q = scaled_params(cfg.params);
    return run_sweep(q, 0.0, f_hi, 4);
}

}  // namespace

std::vector<SampleRow> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("stats: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("stats: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajHeader)
        throw std::runtime_error("stats: " + path + " does not match the trajectory schema");
    std::vector<SampleRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 7> fields;
        std::size_t start = 0;
        for (int i = 0; i < 7; ++i) {
            std::size_t comma = line.find(',', start);
            if (i < 6 && comma == std::string::npos)
                throw std::runtime_error("stats: " + path + " has a short row");
            fields[i] = line.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
            start = comma + 1;
        }
        SampleRow r;
        r.t = parse_field(fields[0], path);
        r.n1 = parse_field(fields[1], path);
        r.n2 = parse_field(fields[2], path);
        r.O = parse_field(fields[3], path);
        r.g2m1 = parse_field(fields[4], path);
        r.g2m2 = parse_field(fields[5], path);
        r.entropy = parse_field(fields[6], path);
        rows.push_back(r);
    }
    return rows;
}

double branch_intensity_max(const SweepResult& sweep, double f_hi) {
    double x = 1.0;
    auto scan = [&](const BranchRecord& br) {
        for (const BranchPoint& p : br.points)
            if (p.f <= f_hi) x = std::max({x, p.state.int_A(), p.state.int_B()});
    };
    scan(sweep.symmetric_branch);
    for (const auto& br : sweep.asymmetric_branches) scan(br);
    for (const LimitCycle& c : sweep.cycles)
        if (c.found && c.f <= f_hi) x = std::max({x, c.max_int_A, c.max_int_B});
    return x;
}

double local_branch_intensity(const SweepResult& sweep, double f_work, double window) {
    double x = 0.0;
    auto scan = [&](const BranchRecord& br) {
        for (const BranchPoint& p : br.points)
            if (std::abs(p.f - f_work) <= window)
                x = std::max({x, p.state.int_A(), p.state.int_B()});
    };
    scan(sweep.symmetric_branch);
    for (const auto& br : sweep.asymmetric_branches) scan(br);
    for (const LimitCycle& c : sweep.cycles)
        if (c.found && std::abs(c.f - f_work) <= window)
            x = std::max({x, c.max_int_A, c.max_int_B});
    if (x <= 0.0) return branch_intensity_max(sweep, f_work + window);
    return std::max(x, 1.0);
}

void cmd_sweep(const RunConfig& cfg) {
    RunWriter writer(cfg);
    ScaledParams q = scaled_params(cfg.params);
    SweepResult sweep = run_sweep(q, cfg.sweep.f_min, cfg.sweep.f_max, cfg.sweep.cycle_samples);
    writer.write("branch_sym.csv", branch_csv(sweep.symmetric_branch));
    BranchRecord empty;
    writer.write("branch_asym_a.csv",
                 branch_csv(sweep.asymmetric_branches.size() > 0 ? sweep.asymmetric_branches[0]
                                                                 : empty));
    writer.write("branch_asym_b.csv",
                 branch_csv(sweep.asymmetric_branches.size() > 1 ? sweep.asymmetric_branches[1]
                                                                 : empty));
    writer.write("bifurcations.csv", bifurcations_csv(sweep.bifurcations));
    writer.write("cycles.csv", cycles_csv(sweep.cycles));
    writer.extra("scaled_params", json{{"delta", q.delta}, {"kappa", q.kappa}, {"xi", q.xi}});
    writer.finish();
}

namespace {

void run_single_trajectory(const RunConfig& cfg, bool ramped) {
    RunWriter writer(cfg);
    TrajectoryConfig tcfg = base_trajectory_config(cfg);
    double f_work;
    if (ramped) {
        tcfg.ramp = RampSchedule{cfg.ramp.rate, cfg.ramp.F_start};
        tcfg.t_final = (cfg.ramp.F_final - cfg.ramp.F_start) / cfg.ramp.rate;
        f_work = f_for_drive(cfg.params, cfg.ramp.F_final / std::sqrt(cfg.params.mu));
    } else {
        f_work = working_f(cfg);
    }

    bool automatic = cfg.trajectory.n_max == 0;
    if (automatic) {
        SweepResult sweep = sizing_sweep(cfg, f_work + 0.5);
        double x = ramped ? branch_intensity_max(sweep, f_work + 0.5)
                          : local_branch_intensity(sweep, f_work, 1.0);
        int n = suggest_n_max(cfg.params.mu * x);
        tcfg.trunc = make_truncation(n, n);
    } else {
        tcfg.trunc = make_truncation(cfg.trajectory.n_max, cfg.trajectory.n_max);
    }
    heavy_gate(cfg, tcfg, 1);

    TrajectoryRecord rec =
        run_with_growth(tcfg, automatic, [](TrajectoryConfig& t) { return run_trajectory(t); });
    writer.extra("truncation", truncation_json(tcfg.trunc, automatic));
    writer.extra("integrator", json{{"dt_used", rec.dt_used},
                                    {"steps_per_sample", rec.steps_per_sample},
                                    {"max_edge_population", rec.max_edge_population}});
    writer.write("traj.csv", trajectory_csv(rec.samples));
    writer.write("jumps.ndjson", jumps_ndjson(rec.jumps));
    writer.finish();
}

}  // namespace

void cmd_trajectory(const RunConfig& cfg) { run_single_trajectory(cfg, false); }

void cmd_ramp(const RunConfig& cfg) { run_single_trajectory(cfg, true); }

void cmd_ensemble(const RunConfig& cfg) {
    RunWriter writer(cfg);
    TrajectoryConfig tcfg = base_trajectory_config(cfg);
    double f_work = working_f(cfg);
    bool automatic = cfg.trajectory.n_max == 0;
    if (automatic) {
        SweepResult sweep = sizing_sweep(cfg, f_work + 0.5);
        int n = suggest_n_max(cfg.params.mu * local_branch_intensity(sweep, f_work, 1.0));
        tcfg.trunc = make_truncation(n, n);
    } else {
        tcfg.trunc = make_truncation(cfg.trajectory.n_max, cfg.trajectory.n_max);
    }
    heavy_gate(cfg, tcfg, cfg.ensemble.n_traj);

    EnsembleResult ens = run_with_growth(tcfg, automatic, [&](TrajectoryConfig& t) {
        return run_ensemble(t, cfg.ensemble.n_traj, cfg.seed, cfg.threads);
    });
    writer.extra("truncation", truncation_json(tcfg.trunc, automatic));
    writer.extra("integrator",
                 json{{"dt_used", ens.records[0].dt_used},
                      {"steps_per_sample", ens.records[0].steps_per_sample}});
    for (std::size_t k = 0; k < ens.records.size(); ++k) {
        char name[40];
        std::snprintf(name, sizeof(name), "traj_%03zu.csv", k);
        writer.write(name, trajectory_csv(ens.records[k].samples));
        std::snprintf(name, sizeof(name), "jumps_%03zu.ndjson", k);
        writer.write(name, jumps_ndjson(ens.records[k].jumps));
    }
    writer.write("mean.csv", trajectory_csv(ens.mean));
    writer.finish();
}

namespace {

std::vector<std::string> default_stats_inputs(const RunConfig& cfg) {
    std::vector<std::string> found;
    if (!fs::is_directory(cfg.out_dir)) return found;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name == "traj.csv" ||
            (name.rfind("traj_", 0) == 0 && name.size() > 4 &&
             name.substr(name.size() - 4) == ".csv"))
            found.push_back(entry.path().string());
    }
    std::sort(found.begin(), found.end());
    return found;
}

struct LoadedSamples {
    std::vector<std::pair<double, double>> n_points;  // (n1, n2), post transient
    std::vector<double> diffs;                        // n1 - n2
    std::vector<double> pooled;                       // n1 and n2 samples
};

LoadedSamples load_samples(const std::vector<std::string>& inputs, double transient) {
    LoadedSamples out;
    for (const std::string& path : inputs) {
        std::vector<SampleRow> rows = read_trajectory_csv(path);
        for (const SampleRow& r : rows) {
            if (r.t <= transient) continue;
            out.n_points.emplace_back(r.n1, r.n2);
            out.diffs.push_back(r.n1 - r.n2);
            out.pooled.push_back(r.n1);
            out.pooled.push_back(r.n2);
        }
    }
    return out;
}

void run_violin(const RunConfig& cfg, RunWriter& writer) {
    double mu = cfg.params.mu;
    const ViolinSettings& v = cfg.stats.violin;
    std::vector<double> grid;
    for (double s = v.fmu_lo_over_mu; s <= v.fmu_hi_over_mu + 1e-9; s += v.step_over_mu)
        grid.push_back(s * mu);
    if (grid.empty()) throw std::runtime_error("stats: violin grid is empty");

    double f_top = f_for_drive(cfg.params, grid.back() / std::sqrt(mu));
    SweepResult sweep = sizing_sweep(cfg, f_top + 0.5);
    double range_n = cfg.stats.range_max > 0.0
                         ? cfg.stats.range_max
                         : 1.1 * mu * branch_intensity_max(sweep, f_top + 0.5);

    std::string violin_d("F_mu,center,count\n");
    std::string violin_n("F_mu,center,count\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double fmu = grid[i];
        RunConfig point = cfg;
        point.params.F = fmu / std::sqrt(mu);
        TrajectoryConfig tcfg = base_trajectory_config(point);
        tcfg.t_final = v.t_final;
        tcfg.sample_interval = v.sample_interval;
        tcfg.compute_entropy = false;
        tcfg.seed = cfg.seed + i;
        double f_pt = f_for_drive(cfg.params, point.params.F);
        bool automatic = cfg.trajectory.n_max == 0;
        int n = automatic
                    ? suggest_n_max(mu * local_branch_intensity(sweep, f_pt, 1.0))
                    : cfg.trajectory.n_max;
        tcfg.trunc = make_truncation(n, n);
        TrajectoryRecord rec = run_with_growth(
            tcfg, automatic, [](TrajectoryConfig& t) { return run_trajectory(t); });

        std::vector<double> diffs, pooled;
        for (const SampleRow& r : rec.samples) {
            if (r.t <= cfg.stats.transient) continue;
            diffs.push_back(r.n1 - r.n2);
            if (cfg.stats.symmetrize) diffs.push_back(r.n2 - r.n1);
            pooled.push_back(r.n1);
            pooled.push_back(r.n2);
        }
        Histogram1D hd =
            histogram1d_scaled(diffs, -range_n, range_n, cfg.stats.bins_1d, 0.5 * mu);
        Histogram1D hn = histogram1d_scaled(pooled, 0.0, range_n, cfg.stats.bins_1d, 0.5 * mu);
        for (std::size_t b = 0; b < hd.counts.size(); ++b) {
            violin_d += format_double(fmu);
            violin_d += ',';
            violin_d += format_double(hd.center(int(b)));
            violin_d += ',';
            violin_d += format_double(hd.counts[b]);
            violin_d += '\n';
        }
        for (std::size_t b = 0; b < hn.counts.size(); ++b) {
            violin_n += format_double(fmu);
            violin_n += ',';
            violin_n += format_double(hn.center(int(b)));
            violin_n += ',';
            violin_n += format_double(hn.counts[b]);
            violin_n += '\n';
        }
    }
    writer.write("violin_d.csv", violin_d);
    writer.write("violin_n.csv", violin_n);
}

}  // namespace

void cmd_stats(const RunConfig& cfg) {
    RunWriter writer(cfg);
    const StatsSettings& st = cfg.stats;

    if (st.mode == "violin") {
        run_violin(cfg, writer);
        writer.finish();
        return;
    }

    std::vector<std::string> inputs = st.inputs;
    if (inputs.empty()) inputs = default_stats_inputs(cfg);
    if (inputs.empty())
        throw std::runtime_error("stats: no input trajectory files (set stats/inputs)");
    writer.extra("inputs", inputs);

    if (st.mode == "spectrum") {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            std::vector<SampleRow> rows = read_trajectory_csv(inputs[i]);
            std::vector<double> series;
            double dt = 0.0, prev_t = 0.0;
            for (const SampleRow& r : rows) {
                if (r.t <= st.transient) continue;
                if (!series.empty() && dt == 0.0) dt = r.t - prev_t;
                series.push_back(r.n1 + r.n2);
                prev_t = r.t;
            }
            if (series.size() < 16)
                throw std::runtime_error("stats: " + inputs[i] + ": too few samples after transient");
            PowerSpectrum spec = power_spectrum(series, dt, st.hann);
            char name[40];
            std::snprintf(name, sizeof(name), "spectrum_%03zu.csv", i);
            writer.write(name, spectrum_csv(spec));
        }
        writer.finish();
        return;
    }

    LoadedSamples data = load_samples(inputs, st.transient);
    if (data.n_points.empty())
        throw std::runtime_error("stats: no samples after the transient window");

    double range = st.range_max;
    if (range <= 0.0) {
        double top = 0.0;
        for (const auto& p : data.n_points) top = std::max({top, p.first, p.second});
        range = top > 0.0 ? 1.05 * top : 1.0;
    }

    if (st.mode == "hist2d") {
        std::vector<std::pair<double, double>> pts =
            st.symmetrize ? symmetrize_points(data.n_points) : data.n_points;
        Histogram2D h = histogram2d(pts, 0.0, range, 0.0, range, st.bins_2d, st.bins_2d);
        writer.write("hist2d.csv", hist2d_csv(h, "n1n2"));
    } else {  // hist1d
        std::vector<double> diffs = data.diffs;
        if (st.symmetrize) {
            std::size_t n0 = diffs.size();
            diffs.reserve(2 * n0);
            for (std::size_t i = 0; i < n0; ++i) diffs.push_back(-diffs[i]);
        }
        Histogram1D hd = histogram1d_scaled(diffs, -range, range, st.bins_1d, 0.0);
        Histogram1D hn = histogram1d_scaled(data.pooled, 0.0, range, st.bins_1d, 0.0);
        writer.write("hist1d_d.csv", hist1d_csv(hd, "D_o"));
        writer.write("hist1d_n.csv", hist1d_csv(hn, "n_pooled"));
    }
    writer.finish();
}

void cmd_indicators(const RunConfig& cfg) {
    RunWriter writer(cfg);
    const IndicatorSettings& ind = cfg.indicators;

    std::vector<double> grid;
    for (double fmu = ind.fmu_min; fmu <= ind.fmu_max + 1e-9; fmu += ind.fmu_step)
        grid.push_back(fmu);
    if (grid.empty()) throw std::runtime_error("indicators: empty grid");

    double mu_min = *std::min_element(ind.mu.begin(), ind.mu.end());
    double f_top = f_for_drive(cfg.params, grid.back() / std::sqrt(mu_min));
    SweepResult sweep = sizing_sweep(cfg, f_top + 0.5);

    std::string csv("mu,F_mu,g2min,entropy\n");
    std::size_t run_index = 0;
    for (double mu : ind.mu) {
        for (double fmu : grid) {
            RunConfig point = cfg;
            point.params.mu = mu;
            point.params.F = fmu / std::sqrt(mu);
            TrajectoryConfig tcfg = base_trajectory_config(point);
            tcfg.t_final = ind.t_final;
            tcfg.sample_interval = ind.sample_interval;
            tcfg.compute_entropy = true;
            tcfg.seed = cfg.seed + run_index;
            double f_pt = f_for_drive(cfg.params, point.params.F);
            bool automatic = cfg.trajectory.n_max == 0;
            int n = automatic
                        ? suggest_n_max(mu * local_branch_intensity(sweep, f_pt, 1.0))
                        : cfg.trajectory.n_max;
            tcfg.trunc = make_truncation(n, n);
            TrajectoryRecord rec = run_with_growth(
                tcfg, automatic, [](TrajectoryConfig& t) { return run_trajectory(t); });

            // Sites are ranked by instantaneous occupancy before the moments are
            // pooled: label-based averages mix the bright and dim phases whenever
            // the asymmetric roles exchange during the run, which washes out the
            // antibunching of the brighter site.
            std::vector<double> times, nhi, nlo, mhi, mlo, ent;
            times.reserve(rec.samples.size());
            for (const SampleRow& r : rec.samples) {
                times.push_back(r.t);
                bool first_hi = r.n1 >= r.n2;
                nhi.push_back(first_hi ? r.n1 : r.n2);
                nlo.push_back(first_hi ? r.n2 : r.n1);
                mhi.push_back(first_hi ? r.g2m1 : r.g2m2);
                mlo.push_back(first_hi ? r.g2m2 : r.g2m1);
                ent.push_back(r.entropy);
            }
            TimeAverage a1 = time_average(nhi, times, ind.transient);
            TimeAverage a2 = time_average(nlo, times, ind.transient);
            TimeAverage b1 = time_average(mhi, times, ind.transient);
            TimeAverage b2 = time_average(mlo, times, ind.transient);
            TimeAverage ae = time_average(ent, times, ind.transient);
            double g2_1 = (a1.mean > 1e-9) ? b1.mean / (a1.mean * a1.mean)
                                           : std::numeric_limits<double>::quiet_NaN();
            double g2_2 = (a2.mean > 1e-9) ? b2.mean / (a2.mean * a2.mean)
                                           : std::numeric_limits<double>::quiet_NaN();
            double g2min = std::fmin(g2_1, g2_2);
            csv += format_double(mu);
            csv += ',';
            csv += format_double(fmu);
            csv += ',';
            csv += format_double(g2min);
            csv += ',';
            csv += format_double(ae.mean);
            csv += '\n';
            ++run_index;
        }
    }
    writer.write("indicators.csv", csv);
    writer.finish();
}

int run_command(const RunConfig& cfg) {
    try {
        if (cfg.command == "sweep")
            cmd_sweep(cfg);
        else if (cfg.command == "trajectory")
            cmd_trajectory(cfg);
        else if (cfg.command == "ensemble")
            cmd_ensemble(cfg);
        else if (cfg.command == "ramp")
            cmd_ramp(cfg);
        else if (cfg.command == "stats")
            cmd_stats(cfg);
        else if (cfg.command == "indicators")
            cmd_indicators(cfg);
        else {
            std::cerr << "error: unknown command '" << cfg.command << "'\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace dimer
