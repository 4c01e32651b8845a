#include "dimer/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace dimer {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

// Reads one JSON object, tracking which keys were consumed so leftovers can
// be reported by their full path.
class Reader {
  public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* take(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const char* key, double* out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) fail(path_ + "/" + key, "expected a number");
            *out = v->get<double>();
        }
    }
    void integer(const char* key, int* out) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) fail(path_ + "/" + key, "expected an integer");
            *out = v->get<int>();
        }
    }
    void uinteger(const char* key, std::uint64_t* out) {
        if (const json* v = take(key)) {
            bool ok = v->is_number_unsigned() ||
                      (v->is_number_integer() && v->get<std::int64_t>() >= 0);
            if (!ok) fail(path_ + "/" + key, "expected a non-negative integer");
            *out = v->get<std::uint64_t>();
        }
    }
    void boolean(const char* key, bool* out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) fail(path_ + "/" + key, "expected a boolean");
            *out = v->get<bool>();
        }
    }
    void text(const char* key, std::string* out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) fail(path_ + "/" + key, "expected a string");
            *out = v->get<std::string>();
        }
    }
    void number_list(const char* key, std::vector<double>* out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) fail(path_ + "/" + key, "expected an array of numbers");
            out->clear();
            for (const auto& e : *v) {
                if (!e.is_number()) fail(path_ + "/" + key, "expected an array of numbers");
                out->push_back(e.get<double>());
            }
        }
    }
    void text_list(const char* key, std::vector<std::string>* out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) fail(path_ + "/" + key, "expected an array of strings");
            out->clear();
            for (const auto& e : *v) {
                if (!e.is_string()) fail(path_ + "/" + key, "expected an array of strings");
                out->push_back(e.get<std::string>());
            }
        }
    }

    const json* object(const char* key) {
        if (const json* v = take(key)) {
            if (!v->is_object()) fail(path_ + "/" + key, "expected an object");
            return v;
        }
        return nullptr;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key()))
                fail(path_ + "/" + it.key(), "unknown key");
        }
    }

    const std::string& path() const { return path_; }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void apply_params(const json& j, const std::string& path, PhysicalParams* p) {
    Reader r(j, path);
    r.number("J", &p->J);
    r.number("Delta", &p->Delta);
    r.number("U", &p->U);
    r.number("gamma", &p->gamma);
    r.number("F", &p->F);
    r.number("mu", &p->mu);
    r.finish();
    if (!(p->gamma > 0.0)) fail(path + "/gamma", "must be positive");
    if (!(p->mu > 0.0)) fail(path + "/mu", "must be positive");
}

void apply_trajectory(const json& j, const std::string& path, TrajectorySettings* t) {
    Reader r(j, path);
    r.number("t_final", &t->t_final);
    r.number("dt", &t->dt);
    r.number("sample_interval", &t->sample_interval);
    r.number("jump_time_tol", &t->jump_time_tol);
    r.integer("n_max", &t->n_max);
    r.boolean("entropy", &t->entropy);
    r.finish();
    if (!(t->t_final > 0.0)) fail(path + "/t_final", "must be positive");
    if (!(t->dt > 0.0)) fail(path + "/dt", "must be positive");
    if (!(t->sample_interval > 0.0)) fail(path + "/sample_interval", "must be positive");
    if (!(t->jump_time_tol > 0.0)) fail(path + "/jump_time_tol", "must be positive");
    if (t->n_max < 0) fail(path + "/n_max", "must be non-negative");
}

void apply_ensemble(const json& j, const std::string& path, EnsembleSettings* e) {
    Reader r(j, path);
    r.integer("n_traj", &e->n_traj);
    r.finish();
    if (e->n_traj < 1) fail(path + "/n_traj", "must be at least 1");
}

void apply_ramp(const json& j, const std::string& path, RampSettings* rp) {
    Reader r(j, path);
    r.number("rate", &rp->rate);
    r.number("F_start", &rp->F_start);
    r.number("F_final", &rp->F_final);
    r.finish();
    if (!(rp->rate > 0.0)) fail(path + "/rate", "must be positive");
    if (!(rp->F_final > rp->F_start)) fail(path + "/F_final", "must exceed F_start");
}

void apply_sweep(const json& j, const std::string& path, SweepSettings* s) {
    Reader r(j, path);
    r.number("f_min", &s->f_min);
    r.number("f_max", &s->f_max);
    r.integer("cycle_samples", &s->cycle_samples);
    r.finish();
    if (s->f_min < 0.0) fail(path + "/f_min", "must be non-negative");
    if (!(s->f_max > s->f_min)) fail(path + "/f_max", "must exceed f_min");
    if (s->cycle_samples < 0) fail(path + "/cycle_samples", "must be non-negative");
}

void apply_violin(const json& j, const std::string& path, ViolinSettings* v) {
    Reader r(j, path);
    r.number("fmu_lo_over_mu", &v->fmu_lo_over_mu);
    r.number("fmu_hi_over_mu", &v->fmu_hi_over_mu);
    r.number("step_over_mu", &v->step_over_mu);
    r.number("t_final", &v->t_final);
    r.number("sample_interval", &v->sample_interval);
    r.finish();
    if (!(v->step_over_mu > 0.0)) fail(path + "/step_over_mu", "must be positive");
    if (!(v->fmu_hi_over_mu >= v->fmu_lo_over_mu))
        fail(path + "/fmu_hi_over_mu", "must not be below fmu_lo_over_mu");
    if (!(v->t_final > 0.0)) fail(path + "/t_final", "must be positive");
    if (!(v->sample_interval > 0.0)) fail(path + "/sample_interval", "must be positive");
}

void apply_stats(const json& j, const std::string& path, StatsSettings* s) {
    Reader r(j, path);
    r.text("mode", &s->mode);
    r.text_list("inputs", &s->inputs);
    r.integer("bins_2d", &s->bins_2d);
    r.integer("bins_1d", &s->bins_1d);
    r.boolean("symmetrize", &s->symmetrize);
    r.boolean("hann", &s->hann);
    r.number("range_max", &s->range_max);
    r.number("transient", &s->transient);
    if (const json* v = r.object("violin")) apply_violin(*v, path + "/violin", &s->violin);
    r.finish();
    if (s->mode != "hist2d" && s->mode != "hist1d" && s->mode != "spectrum" &&
        s->mode != "violin")
        fail(path + "/mode", "must be one of hist2d, hist1d, spectrum, violin");
    if (s->bins_2d < 2) fail(path + "/bins_2d", "must be at least 2");
    if (s->bins_1d < 2) fail(path + "/bins_1d", "must be at least 2");
    if (s->range_max < 0.0) fail(path + "/range_max", "must be non-negative");
    if (s->transient < 0.0) fail(path + "/transient", "must be non-negative");
}

void apply_indicators(const json& j, const std::string& path, IndicatorSettings* s) {
    Reader r(j, path);
    r.number_list("mu", &s->mu);
    r.number("fmu_min", &s->fmu_min);
    r.number("fmu_max", &s->fmu_max);
    r.number("fmu_step", &s->fmu_step);
    r.number("t_final", &s->t_final);
    r.number("sample_interval", &s->sample_interval);
    r.number("transient", &s->transient);
    r.finish();
    if (s->mu.empty()) fail(path + "/mu", "must list at least one value");
    for (double m : s->mu)
        if (!(m > 0.0)) fail(path + "/mu", "entries must be positive");
    if (!(s->fmu_step > 0.0)) fail(path + "/fmu_step", "must be positive");
    if (!(s->fmu_max >= s->fmu_min)) fail(path + "/fmu_max", "must not be below fmu_min");
    if (!(s->t_final > 0.0)) fail(path + "/t_final", "must be positive");
    if (!(s->sample_interval > 0.0)) fail(path + "/sample_interval", "must be positive");
    if (s->transient < 0.0) fail(path + "/transient", "must be non-negative");
}

// Applies one JSON layer onto cfg; only keys present in the layer change.
void apply_layer(const json& j, const std::string& source, RunConfig* cfg,
                 bool* threads_set) {
    Reader r(j, source);
    r.text("command", &cfg->command);
    if (const json* v = r.object("params")) apply_params(*v, source + "/params", &cfg->params);
    r.number("f", &cfg->f);
    if (const json* v = r.object("trajectory"))
        apply_trajectory(*v, source + "/trajectory", &cfg->trajectory);
    if (const json* v = r.object("ensemble"))
        apply_ensemble(*v, source + "/ensemble", &cfg->ensemble);
    if (const json* v = r.object("ramp")) apply_ramp(*v, source + "/ramp", &cfg->ramp);
    if (const json* v = r.object("sweep")) apply_sweep(*v, source + "/sweep", &cfg->sweep);
    if (const json* v = r.object("stats")) apply_stats(*v, source + "/stats", &cfg->stats);
    if (const json* v = r.object("indicators"))
        apply_indicators(*v, source + "/indicators", &cfg->indicators);
    r.text("out_dir", &cfg->out_dir);
    r.uinteger("seed", &cfg->seed);
    if (r.has("threads")) *threads_set = true;
    r.integer("threads", &cfg->threads);
    r.boolean("heavy", &cfg->heavy);
    r.finish();
    if (cfg->f < 0.0) fail(source + "/f", "must be non-negative");
    if (cfg->threads < 0) fail(source + "/threads", "must be non-negative");
}

}  // namespace

double drive_for_f(const PhysicalParams& p, double f) {
    double u = std::abs(p.U);
    if (!(u > 0.0))
        throw std::invalid_argument("config: pump strength f requires a nonzero U");
    return f * std::pow(p.gamma, 1.5) / (4.0 * std::sqrt(u));
}

double f_for_drive(const PhysicalParams& p, double F) {
    double u = std::abs(p.U);
    if (!(u > 0.0))
        throw std::invalid_argument("config: pump strength f requires a nonzero U");
    return 4.0 * F * std::sqrt(u) / std::pow(p.gamma, 1.5);
}

RunConfig config_from_json(const json& j, const std::string& source) {
    RunConfig cfg;
    bool threads_set = false;
    apply_layer(j, source, &cfg, &threads_set);
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["params"] = {{"J", cfg.params.J},         {"Delta", cfg.params.Delta},
                   {"U", cfg.params.U},         {"gamma", cfg.params.gamma},
                   {"F", cfg.params.F},         {"mu", cfg.params.mu}};
    j["f"] = cfg.f;
    j["trajectory"] = {{"t_final", cfg.trajectory.t_final},
                       {"dt", cfg.trajectory.dt},
                       {"sample_interval", cfg.trajectory.sample_interval},
                       {"jump_time_tol", cfg.trajectory.jump_time_tol},
                       {"n_max", cfg.trajectory.n_max},
                       {"entropy", cfg.trajectory.entropy}};
    j["ensemble"] = {{"n_traj", cfg.ensemble.n_traj}};
    j["ramp"] = {{"rate", cfg.ramp.rate},
                 {"F_start", cfg.ramp.F_start},
                 {"F_final", cfg.ramp.F_final}};
    j["sweep"] = {{"f_min", cfg.sweep.f_min},
                  {"f_max", cfg.sweep.f_max},
                  {"cycle_samples", cfg.sweep.cycle_samples}};
    j["stats"] = {{"mode", cfg.stats.mode},
                  {"inputs", cfg.stats.inputs},
                  {"bins_2d", cfg.stats.bins_2d},
                  {"bins_1d", cfg.stats.bins_1d},
                  {"symmetrize", cfg.stats.symmetrize},
                  {"hann", cfg.stats.hann},
                  {"range_max", cfg.stats.range_max},
                  {"transient", cfg.stats.transient},
                  {"violin",
                   {{"fmu_lo_over_mu", cfg.stats.violin.fmu_lo_over_mu},
                    {"fmu_hi_over_mu", cfg.stats.violin.fmu_hi_over_mu},
                    {"step_over_mu", cfg.stats.violin.step_over_mu},
                    {"t_final", cfg.stats.violin.t_final},
                    {"sample_interval", cfg.stats.violin.sample_interval}}}};
    j["indicators"] = {{"mu", cfg.indicators.mu},
                       {"fmu_min", cfg.indicators.fmu_min},
                       {"fmu_max", cfg.indicators.fmu_max},
                       {"fmu_step", cfg.indicators.fmu_step},
                       {"t_final", cfg.indicators.t_final},
                       {"sample_interval", cfg.indicators.sample_interval},
                       {"transient", cfg.indicators.transient}};
    j["out_dir"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["heavy"] = cfg.heavy;
    return j;
}

json preset_json(const std::string& name) {
    // Figure recipes; fig2..fig8 carry the working pump strengths
    // f in {2, 4, 6, 6, 10, 13, 17}.
    if (name == "fig1a")
        return json{{"sweep", {{"f_min", 0.0}, {"f_max", 22.0}}}};
    if (name == "fig1b")
        return json{{"params", {{"mu", 3.0}}},
                    {"ramp", {{"rate", 0.216}, {"F_start", 0.0}, {"F_final", 50.0}}},
                    {"trajectory", {{"sample_interval", 0.1}}}};
    auto hist_recipe = [](double f, double mu) {
        return json{{"f", f},
                    {"params", {{"mu", mu}}},
                    {"trajectory", {{"t_final", 1.0e4}, {"sample_interval", 0.2}}},
                    {"ensemble", {{"n_traj", 3}}},
                    {"stats", {{"mode", "hist2d"}}}};
    };
    if (name == "fig2") return hist_recipe(2.0, 1.0);
    if (name == "fig3") return hist_recipe(4.0, 1.0);
    if (name == "fig4") return hist_recipe(6.0, 1.0);
    if (name == "fig5")
        return json{{"f", 6.0},
                    {"params", {{"mu", 1.0}}},
                    {"trajectory", {{"t_final", 1.0e4}, {"sample_interval", 0.05}}},
                    {"ensemble", {{"n_traj", 1}}},
                    {"stats", {{"mode", "spectrum"}}}};
    if (name == "fig6") return hist_recipe(10.0, 1.0);
    if (name == "fig7") return hist_recipe(13.0, 3.0);
    if (name == "fig8") return hist_recipe(17.0, 3.0);
    if (name == "violin")
        return json{{"params", {{"mu", 1.0}}}, {"stats", {{"mode", "violin"}}}};
    if (name == "indicators") return json{{"params", {{"mu", 1.0}}}};
    throw std::invalid_argument("config: unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig2",  "fig3",   "fig4",      "fig5",
            "fig6",  "fig7",  "fig8",  "violin", "indicators"};
}

RunConfig resolve_config(const CliOptions& opt) {
    RunConfig cfg;
    bool threads_set = false;

    if (opt.preset) {
        json p = preset_json(*opt.preset);
        apply_layer(p, "preset " + *opt.preset, &cfg, &threads_set);
    }
    if (opt.config_path) {
        std::ifstream in(*opt.config_path);
        if (!in) throw std::invalid_argument("config: cannot open " + *opt.config_path);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config: " + *opt.config_path + ": " + e.what());
        }
        // A run manifest embeds its config; accept it directly.
        if (j.is_object() && j.contains("schema_version") && j.contains("config"))
            j = j.at("config");
        apply_layer(j, *opt.config_path, &cfg, &threads_set);
    }

    if (!cfg.command.empty() && !opt.command.empty() && cfg.command != opt.command)
        throw std::invalid_argument("config: file names command '" + cfg.command +
                                    "' but the subcommand is '" + opt.command + "'");
    if (!opt.command.empty()) cfg.command = opt.command;
    if (cfg.command.empty())
        throw std::invalid_argument("config: no command given");

    if (opt.seed) {
        cfg.seed = *opt.seed;
        cfg.overrides["seed"] = std::to_string(*opt.seed);
    }
    if (opt.out_dir) {
        cfg.out_dir = *opt.out_dir;
        cfg.overrides["out"] = *opt.out_dir;
    }
    if (opt.threads) {
        cfg.threads = *opt.threads;
        cfg.overrides["threads"] = std::to_string(*opt.threads);
    } else if (!threads_set) {
        if (const char* env = std::getenv("DIMER_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end && *end == '\0' && v >= 0) {
                cfg.threads = int(v);
                cfg.overrides["threads"] = std::string("DIMER_THREADS=") + env;
            }
        }
    }
    if (opt.heavy) {
        cfg.heavy = true;
        cfg.overrides["heavy"] = "true";
    }
    if (cfg.threads < 1) cfg.threads = 1;

    if (cfg.f > 0.0) cfg.params.F = drive_for_f(cfg.params, cfg.f);
    return cfg;
}

}  // namespace dimer
