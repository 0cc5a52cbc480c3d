#include "pks/cli_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pks/initial_data.hpp"

namespace pks::io {

namespace fs = std::filesystem;

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::evolve: return "evolve";
        case Mode::stationary: return "stationary";
        case Mode::sweep_evolve: return "sweep-evolve";
        case Mode::sweep_stationary: return "sweep-stationary";
        case Mode::validate: return "validate";
    }
    return "?";
}

namespace {

Mode mode_from_string(const std::string& s) {
    for (Mode m : {Mode::evolve, Mode::stationary, Mode::sweep_evolve, Mode::sweep_stationary, Mode::validate})
        if (to_string(m) == s) return m;
    throw ConfigError("mode: unknown value \"" + s +
                      "\" (expected evolve, stationary, sweep-evolve, sweep-stationary or validate)");
}

bool is_evolution(Mode m) { return m == Mode::evolve || m == Mode::sweep_evolve; }
bool is_stationary(Mode m) { return m == Mode::stationary || m == Mode::sweep_stationary; }

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where.empty() ? "config must be a JSON object" : where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) {
            std::string valid;
            for (const char* a : allowed) valid += std::string(valid.empty() ? "" : ", ") + a;
            throw ConfigError("unknown key \"" + (where.empty() ? key : where + "." + key) + "\" (valid keys: " +
                              valid + ")");
        }
    }
}

double number(const json& j, const std::string& name) {
    if (!j.is_number()) throw ConfigError(name + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(name + ": must be finite");
    return v;
}

long long integer(const json& j, const std::string& name) {
    if (!j.is_number_integer()) throw ConfigError(name + ": expected an integer");
    return j.get<long long>();
}

[[noreturn]] void out_of_range(const std::string& name, double v, const std::string& range) {
    std::ostringstream os;
    os << name << " = " << v << " is out of range; valid range: " << range;
    throw ConfigError(os.str());
}

void check_m(const std::string& name, double m, Mode mode, int n) {
    if (is_stationary(mode) || mode == Mode::sweep_evolve) {
        if (!(m >= 3.0) || m > 1000.0)
            out_of_range(name, m,
                         is_stationary(mode) ? "[3, 1000] (stationary states are computed for m >= 3)"
                                             : "[3, 1000] (sweeps cover m >= 3)");
    } else if (!(m > 2.0 - 2.0 / n) || m > 1000.0) {
        std::ostringstream os;
        os << "(" << 2.0 - 2.0 / n << ", 1000] (diffusion-dominated regime m > 2 - 2/n)";
        out_of_range(name, m, os.str());
    }
}

}  // namespace

RunConfig parse_config(const json& j) {
    reject_unknown(j, "",
                   {"mode", "n_dim", "m", "m_values", "grid", "initial", "t_end", "snapshots", "tolerances",
                    "output_dir", "seed", "perturbation"});
    RunConfig c;
    if (!j.contains("mode") || !j["mode"].is_string()) throw ConfigError("mode: required string");
    c.mode = mode_from_string(j["mode"].get<std::string>());

    if (j.contains("n_dim")) {
        const auto n = integer(j["n_dim"], "n_dim");
        if (n < 3 || n > 16) out_of_range("n_dim", static_cast<double>(n), "[3, 16]");
        c.n_dim = static_cast<int>(n);
    }

    const bool sweep = c.mode == Mode::sweep_evolve || c.mode == Mode::sweep_stationary;
    if (j.contains("m") && j.contains("m_values")) throw ConfigError("m and m_values are mutually exclusive");
    if (j.contains("m_values")) {
        if (!sweep) throw ConfigError("m_values: only valid for sweep modes (use m)");
        if (!j["m_values"].is_array() || j["m_values"].empty())
            throw ConfigError("m_values: expected a non-empty array of numbers");
        for (std::size_t i = 0; i < j["m_values"].size(); ++i)
            c.m_values.push_back(number(j["m_values"][i], "m_values[" + std::to_string(i) + "]"));
    } else if (j.contains("m")) {
        c.m = number(j["m"], "m");
        if (sweep) c.m_values = {c.m};
    } else if (sweep) {
        c.m_values = c.mode == Mode::sweep_evolve ? std::vector<double>{8, 16, 32, 64}
                                                  : std::vector<double>{4, 8, 16, 32, 64};
    } else if (c.mode != Mode::validate) {
        throw ConfigError("m: required for mode " + to_string(c.mode));
    }
    if (sweep) {
        for (std::size_t i = 0; i < c.m_values.size(); ++i) {
            check_m("m_values[" + std::to_string(i) + "]", c.m_values[i], c.mode, c.n_dim);
            if (i > 0 && !(c.m_values[i] > c.m_values[i - 1]))
                throw ConfigError("m_values: must be strictly increasing");
        }
        c.m = c.m_values.front();
    } else if (c.mode != Mode::validate) {
        check_m("m", c.m, c.mode, c.n_dim);
    }

    if (is_stationary(c.mode)) c.initial.kind = "stationary";
    if (j.contains("initial")) {
        const auto& ij = j["initial"];
        if (!ij.is_object() || !ij.contains("kind") || !ij["kind"].is_string())
            throw ConfigError("initial: expected an object with a string \"kind\"");
        c.initial.kind = ij["kind"].get<std::string>();
        if (c.initial.kind == "bump") {
            reject_unknown(ij, "initial", {"kind", "amplitude", "radius"});
            if (ij.contains("amplitude")) c.initial.amplitude = number(ij["amplitude"], "initial.amplitude");
            if (ij.contains("radius")) c.initial.radius = number(ij["radius"], "initial.radius");
            if (!(c.initial.amplitude > 0.0)) out_of_range("initial.amplitude", c.initial.amplitude, "(0, inf)");
        } else if (c.initial.kind == "patch") {
            reject_unknown(ij, "initial", {"kind", "radius"});
            if (ij.contains("radius")) c.initial.radius = number(ij["radius"], "initial.radius");
        } else if (c.initial.kind == "stationary") {
            reject_unknown(ij, "initial", {"kind", "mass"});
            if (ij.contains("mass")) c.initial.mass = number(ij["mass"], "initial.mass");
            if (!(c.initial.mass > 0.0)) out_of_range("initial.mass", c.initial.mass, "(0, inf)");
        } else {
            throw ConfigError("initial.kind: unknown preset \"" + c.initial.kind +
                              "\" (expected bump, patch or stationary)");
        }
        if (!(c.initial.radius > 0.0)) out_of_range("initial.radius", c.initial.radius, "(0, inf)");
    }
    if (is_stationary(c.mode) && c.initial.kind != "stationary")
        throw ConfigError("initial.kind: mode " + to_string(c.mode) + " needs the stationary preset");
    if (c.mode == Mode::sweep_evolve && c.initial.kind == "stationary")
        throw ConfigError("initial.kind: sweep-evolve needs data shared across m (bump or patch)");
    if (c.mode == Mode::evolve && c.initial.kind == "stationary" && c.m < 3.0)
        out_of_range("m", c.m, "[3, 1000] (stationary initial data)");

    const double extent =
        c.initial.kind == "stationary" ? limit_radius(c.initial.mass, c.n_dim) : c.initial.radius;
    c.r_max = 4.0 * extent;
    if (j.contains("grid")) {
        const auto& gj = j["grid"];
        reject_unknown(gj, "grid", {"r_max", "cells"});
        if (gj.contains("r_max")) c.r_max = number(gj["r_max"], "grid.r_max");
        if (gj.contains("cells")) {
            const auto cells = integer(gj["cells"], "grid.cells");
            if (cells < 8 || cells > (1 << 22)) out_of_range("grid.cells", static_cast<double>(cells), "[8, 4194304]");
            c.cells = static_cast<std::size_t>(cells);
        }
    }
    if (!(c.r_max > 0.0)) out_of_range("grid.r_max", c.r_max, "(0, inf)");
    if (c.initial.kind != "stationary" && !(c.initial.radius < c.r_max)) {
        std::ostringstream os;
        os << "(initial.radius = " << c.initial.radius << ", inf)";
        out_of_range("grid.r_max", c.r_max, os.str());
    }

    if (j.contains("t_end")) c.t_end = number(j["t_end"], "t_end");
    if (!(c.t_end >= 0.0)) out_of_range("t_end", c.t_end, "[0, inf)");
    if (j.contains("snapshots")) {
        const auto k = integer(j["snapshots"], "snapshots");
        if (k < 1 || k > 100000) out_of_range("snapshots", static_cast<double>(k), "[1, 100000]");
        c.snapshots = static_cast<int>(k);
    }
    if (j.contains("tolerances")) {
        const auto& tj = j["tolerances"];
        reject_unknown(tj, "tolerances", {"cfl_diffusion", "cfl_advection", "solve_rel_tol", "dr_ode"});
        auto& t = c.tolerances;
        if (tj.contains("cfl_diffusion")) t.cfl_diffusion = number(tj["cfl_diffusion"], "tolerances.cfl_diffusion");
        if (tj.contains("cfl_advection")) t.cfl_advection = number(tj["cfl_advection"], "tolerances.cfl_advection");
        if (tj.contains("solve_rel_tol")) t.solve_rel_tol = number(tj["solve_rel_tol"], "tolerances.solve_rel_tol");
        if (tj.contains("dr_ode")) t.dr_ode = number(tj["dr_ode"], "tolerances.dr_ode");
        if (!(t.cfl_diffusion > 0.0 && t.cfl_diffusion <= 0.5))
            out_of_range("tolerances.cfl_diffusion", t.cfl_diffusion, "(0, 0.5]");
        if (!(t.cfl_advection > 0.0 && t.cfl_advection <= 1.0))
            out_of_range("tolerances.cfl_advection", t.cfl_advection, "(0, 1]");
        if (!(t.solve_rel_tol > 0.0 && t.solve_rel_tol <= 1e-2))
            out_of_range("tolerances.solve_rel_tol", t.solve_rel_tol, "(0, 0.01]");
        if (!(t.dr_ode >= 0.0)) out_of_range("tolerances.dr_ode", t.dr_ode, "[0, inf) (0 = solver default)");
    }
    c.output_dir = to_string(c.mode);
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
            throw ConfigError("output_dir: expected a non-empty string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("perturbation")) {
        c.perturbation = number(j["perturbation"], "perturbation");
        if (!(c.perturbation >= 0.0 && c.perturbation < 0.5)) out_of_range("perturbation", c.perturbation, "[0, 0.5)");
        if (c.perturbation > 0.0 && c.mode != Mode::evolve)
            throw ConfigError("perturbation: only used by mode evolve");
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["n_dim"] = c.n_dim;
    if (c.mode == Mode::sweep_evolve || c.mode == Mode::sweep_stationary)
        j["m_values"] = c.m_values;
    else
        j["m"] = c.m;
    j["grid"] = {{"r_max", c.r_max}, {"cells", c.cells}};
    json ij;
    ij["kind"] = c.initial.kind;
    if (c.initial.kind == "bump") {
        ij["amplitude"] = c.initial.amplitude;
        ij["radius"] = c.initial.radius;
    } else if (c.initial.kind == "patch") {
        ij["radius"] = c.initial.radius;
    } else {
        ij["mass"] = c.initial.mass;
    }
    j["initial"] = ij;
    j["t_end"] = c.t_end;
    j["snapshots"] = c.snapshots;
    j["tolerances"] = {{"cfl_diffusion", c.tolerances.cfl_diffusion},
                       {"cfl_advection", c.tolerances.cfl_advection},
                       {"solve_rel_tol", c.tolerances.solve_rel_tol},
                       {"dr_ode", c.tolerances.dr_ode}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["perturbation"] = c.perturbation;
    return j;
}

RadialGrid config_grid(const RunConfig& c) { return RadialGrid(c.n_dim, c.r_max, c.cells); }

DensityField config_initial_density(const RunConfig& c) {
    const auto grid = config_grid(c);
    if (c.initial.kind == "bump") return bump_density(grid, c.initial.amplitude, c.initial.radius);
    if (c.initial.kind == "patch") return patch_density(grid, c.initial.radius);
    SolveOptions so;
    so.rel_tol = c.tolerances.solve_rel_tol;
    so.dr_ode = c.tolerances.dr_ode;
    return resample_density(solve_for_mass(c.initial.mass, c.m, c.n_dim, so), grid);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw Error("write failed: " + path.string());
}

void write_csv_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_double(values[i]);
    out << "\r\n";
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\r\n";
}

std::string m_tag(double m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "m%g", m);
    return buf;
}

json fit_json(const FitResult& f) {
    json j;
    j["slope"] = f.floor_limited ? json(nullptr) : json(f.slope);
    j["r2"] = f.floor_limited ? json(nullptr) : json(f.r2);
    j["status"] = f.floor_limited ? "floor-limited" : "ok";
    return j;
}

json evolution_json(const EvolutionSummary& e) {
    json j;
    j["m"] = e.m;
    j["ok"] = e.ok;
    j["error"] = e.error;
    j["initial_mass"] = e.initial_mass;
    j["final_mass"] = e.final_mass;
    j["mass_drift_rel"] = e.mass_drift_rel;
    j["clipped_mass"] = e.clipped_mass;
    j["steps"] = e.steps;
    j["excess_l2"] = e.excess_l2_final;
    j["comp_residual"] = e.comp_residual_final;
    j["omega_neg_l1"] = e.omega_neg_l1_qt;
    j["omega_neg_l3_cubed"] = e.omega_neg_l3_cubed_qt;
    j["gradP_l3"] = e.gradP_l3_qt;
    j["dtP_l1"] = e.dtP_l1;
    j["energy_excess"] = e.energy_excess;
    j["energy_ok"] = e.energy_ok;
    j["barrier_ok"] = e.barrier_ok;
    return j;
}

json stationary_json(const StationarySummary& s) {
    json j;
    j["m"] = s.m;
    j["ok"] = s.ok;
    j["error"] = s.error;
    j["alpha"] = s.alpha;
    j["support_radius"] = s.support_radius;
    j["mass"] = s.mass;
    j["mass_error_rel"] = s.mass_error_rel;
    j["radius_gap"] = s.radius_gap;
    j["l1_to_patch"] = s.l1_to_patch;
    j["pressure_gap"] = s.pressure_gap;
    j["omega_neg_l1"] = s.omega_neg_l1;
    j["omega_neg_l3_cubed"] = s.omega_neg_l3_cubed;
    j["residual"] = s.residual;
    j["alpha_ok"] = s.alpha_ok;
    j["uv_ok"] = s.uv_ok;
    j["radius_ok"] = s.radius_ok;
    return j;
}

}  // namespace

void write_series(const fs::path& path, std::span<const EstimateReport> reports) {
    auto out = open_out(path);
    write_csv_header(out, report_columns());
    for (const auto& r : reports) write_csv_row(out, report_values(r));
    close_out(out, path);
}

json sweep_to_json(const SweepResult& r, const std::vector<std::string>& files) {
    json j;
    j["kind"] = r.kind;
    j["n_dim"] = r.n;
    j["m_values"] = r.m_values;
    j["grid"] = {{"r_max", r.grid.r_max()}, {"cells", r.grid.cells()}};
    if (r.fitted_slopes.empty()) {
        j["slopes"] = nullptr;
    } else {
        json s;
        for (const auto& [name, f] : r.fitted_slopes) s[name] = fit_json(f);
        j["slopes"] = s;
    }
    const auto& ref = r.references;
    j["references"] = {{"mass", ref.mass},
                       {"limit_radius", ref.limit_radius},
                       {"alpha_max", ref.alpha_max},
                       {"alpha_pow_max", ref.alpha_pow_max},
                       {"rstar", ref.rstar},
                       {"floor",
                        {{"excess_l2", ref.floor.excess_l2},
                         {"omega_neg_l1", ref.floor.omega_neg_l1},
                         {"omega_neg_l3_cubed", ref.floor.omega_neg_l3_cubed},
                         {"comp_residual", ref.floor.comp_residual},
                         {"dissipation", ref.floor.dissipation}}}};
    json runs = json::array();
    for (std::size_t i = 0; i < r.m_values.size(); ++i) {
        json run = r.kind == "evolution" ? evolution_json(r.evolution.at(i)) : stationary_json(r.stationary.at(i));
        run["file"] = i < files.size() ? json(files[i]) : json(nullptr);
        runs.push_back(run);
    }
    j["runs"] = runs;
    return j;
}

SweepFiles write_sweep(const fs::path& dir, const SweepResult& r) {
    fs::create_directories(dir);
    SweepFiles out;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < r.m_values.size(); ++i) {
        if (r.kind == "evolution") {
            const auto name = "series_" + m_tag(r.m_values[i]) + ".csv";
            write_series(dir / name, r.evolution.at(i).series);
            names.push_back(name);
        } else {
            const auto& s = r.stationary.at(i);
            const auto name = "profile_" + m_tag(r.m_values[i]) + ".csv";
            auto f = open_out(dir / name);
            write_csv_header(f, {"r", "density", "pressure"});
            for (std::size_t k = 0; k < s.density.size(); ++k) {
                const double row[] = {r.grid.center(k), s.density[k], s.pressure[k]};
                write_csv_row(f, row);
            }
            close_out(f, dir / name);
            names.push_back(name);
        }
        out.per_m.push_back(dir / names.back());
    }
    out.summary = dir / "sweep.json";
    auto f = open_out(out.summary);
    f << sweep_to_json(r, names).dump(2) << "\n";
    close_out(f, out.summary);
    return out;
}

void write_profile(const fs::path& path, const StationaryProfile& p) {
    auto out = open_out(path);
    write_csv_header(out, {"r", "psi", "dpsi", "density", "pressure"});
    for (std::size_t k = 0; k < p.r.size(); ++k) {
        const double psi = std::max(p.psi[k], 0.0);
        const double row[] = {p.r[k], psi, p.dpsi[k], std::pow(psi, 1.0 / (p.m - 1.0)), p.m / (p.m - 1.0) * psi};
        write_csv_row(out, row);
    }
    close_out(out, path);
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path output_root() {
    const char* env = std::getenv(kOutputRootEnv);
    return env && *env ? fs::path(env) : fs::current_path();
}

RunManifest make_manifest(const RunConfig& cfg) {
    RunManifest m;
    m.config = to_json(cfg);
    m.code_version = kCodeVersion;
    m.start_time = utc_now();
    if (is_evolution(cfg.mode)) m.assumption_flags["pressure_time_derivative_compatibility"] = "not checked";
    return m;
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["code_version"] = m.code_version;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["config"] = m.config;
    json runs = json::array();
    for (const auto& r : m.runs) runs.push_back({{"label", r.label}, {"status", r.status}, {"error", r.error}});
    j["runs"] = runs;
    json audit = json::array();
    for (const auto& a : m.conservation)
        audit.push_back({{"label", a.label},
                         {"initial_mass", a.initial_mass},
                         {"final_mass", a.final_mass},
                         {"clipped_mass", a.clipped_mass}});
    j["conservation"] = audit;
    json flags = json::object();
    for (const auto& [k, v] : m.assumption_flags) flags[k] = v;
    j["assumption_flags"] = flags;
    return j;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    const auto path = dir / "manifest.json";
    auto out = open_out(path);
    out << manifest_to_json(m).dump(2) << "\n";
    close_out(out, path);
}

namespace {

// Writes the manifest when the run scope closes, whatever the exit path.
class ManifestScope {
public:
    ManifestScope(fs::path dir, RunManifest& m) : dir_(std::move(dir)), m_(m) {}
    ~ManifestScope() {
        try {
            m_.end_time = utc_now();
            write_manifest(dir_, m_);
        } catch (...) {
        }
    }
    ManifestScope(const ManifestScope&) = delete;
    ManifestScope& operator=(const ManifestScope&) = delete;

private:
    fs::path dir_;
    RunManifest& m_;
};

DensityField perturbed(const DensityField& rho, double amplitude, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v = rho.values;
    for (double& x : v) x *= 1.0 + amplitude * dist(gen);
    DensityField out(rho.grid, std::move(v));
    const double scale = rho.total_mass() / out.total_mass();
    for (double& x : out.values) x *= scale;
    return out;
}

void record(RunManifest& man, const EvolutionSummary& e, const std::string& label) {
    man.runs.push_back({label, e.ok ? "ok" : "failed", e.error});
    man.conservation.push_back({label, e.initial_mass, e.final_mass, e.clipped_mass});
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    close_out(out, path);
}

int run_evolve(const RunConfig& c, const fs::path& dir, RunManifest& man, std::ostream& log) {
    const auto rho0 = config_initial_density(c);
    man.assumption_flags["initial_density_at_most_half"] = rho0.max() <= 0.5 ? "holds" : "violated";
    const auto e = run_evolution(rho0, c.m, c.t_end, c.snapshots, c.tolerances.cfl_diffusion,
                                 c.tolerances.cfl_advection);
    record(man, e, m_tag(c.m));
    write_series(dir / "series.csv", e.series);
    auto j = evolution_json(e);
    j["file"] = "series.csv";
    int rc = e.ok ? 0 : 1;
    if (c.perturbation > 0.0) {
        const auto other = perturbed(rho0, c.perturbation, c.seed);
        const auto probe = uniqueness_probe(rho0, other, c.m, c.t_end, c.snapshots);
        auto f = open_out(dir / "probe.csv");
        write_csv_header(f, {"t", "distance"});
        for (std::size_t k = 0; k < probe.t.size(); ++k) {
            const double row[] = {probe.t[k], probe.distance[k]};
            write_csv_row(f, row);
        }
        close_out(f, dir / "probe.csv");
        j["probe"] = {{"file", "probe.csv"}, {"grew_tenfold", probe.grew_tenfold}, {"max_jump", probe.max_jump}};
        man.runs.push_back({"probe", probe.grew_tenfold ? "failed" : "ok",
                            probe.grew_tenfold ? "distance grew more than tenfold" : ""});
        if (probe.grew_tenfold) rc = 1;
    }
    write_json(dir / "summary.json", j);
    log << "evolve m=" << c.m << " steps=" << e.steps << " mass drift=" << e.mass_drift_rel
        << (e.ok ? "" : " FAILED: " + e.error) << "\n";
    return rc;
}

int run_stationary(const RunConfig& c, const fs::path& dir, RunManifest& man, std::ostream& log) {
    SolveOptions so;
    so.rel_tol = c.tolerances.solve_rel_tol;
    so.dr_ode = c.tolerances.dr_ode;
    const auto p = solve_for_mass(c.initial.mass, c.m, c.n_dim, so);
    const RadialGrid grid(c.n_dim, rstar_bound(c.initial.mass, c.n_dim), c.cells);
    const auto s = summarize_stationary(p, c.initial.mass, grid, so.rel_tol);
    write_profile(dir / "profile.csv", p);
    const auto uv = uv_trajectory(p);
    auto f = open_out(dir / "uv.csv");
    write_csv_header(f, {"r", "u", "v"});
    for (const auto& q : uv.samples) {
        const double row[] = {q.r, q.u, q.v};
        write_csv_row(f, row);
    }
    close_out(f, dir / "uv.csv");
    auto j = stationary_json(s);
    const auto ab = alpha_bound(c.initial.mass, c.n_dim);
    j["bounds"] = {{"alpha_max", ab.first},
                   {"alpha_pow_max", ab.second},
                   {"rstar", rstar_bound(c.initial.mass, c.n_dim)},
                   {"limit_radius", limit_radius(c.initial.mass, c.n_dim)}};
    j["files"] = {"profile.csv", "uv.csv"};
    write_json(dir / "summary.json", j);
    man.runs.push_back({m_tag(c.m), s.ok ? "ok" : "failed", s.error});
    log << "stationary m=" << c.m << " alpha=" << format_double(p.alpha) << " R=" << format_double(p.support_radius)
        << (s.ok ? "" : " FAILED: " + s.error) << "\n";
    return s.ok ? 0 : 1;
}

int run_sweep_evolve(const RunConfig& c, const fs::path& dir, RunManifest& man, std::ostream& log) {
    EvolutionSweepConfig sc;
    sc.initial = config_initial_density(c);
    man.assumption_flags["initial_density_at_most_half"] = sc.initial.max() <= 0.5 ? "holds" : "violated";
    sc.m_values = c.m_values;
    sc.t_end = c.t_end;
    sc.snapshots = c.snapshots;
    sc.cfl_diffusion = c.tolerances.cfl_diffusion;
    sc.cfl_advection = c.tolerances.cfl_advection;
    const auto r = run_evolution_sweep(sc);
    write_sweep(dir, r);
    int rc = 0;
    for (const auto& e : r.evolution) {
        record(man, e, m_tag(e.m));
        log << "sweep-evolve m=" << e.m << (e.ok ? " ok" : " FAILED: " + e.error) << "\n";
        if (!e.ok) rc = 1;
    }
    return rc;
}

int run_sweep_stationary(const RunConfig& c, const fs::path& dir, RunManifest& man, std::ostream& log) {
    StationarySweepConfig sc;
    sc.mass = c.initial.mass;
    sc.n = c.n_dim;
    sc.m_values = c.m_values;
    sc.cells = c.cells;
    sc.solve.rel_tol = c.tolerances.solve_rel_tol;
    sc.solve.dr_ode = c.tolerances.dr_ode;
    const auto r = run_stationary_sweep(sc);
    write_sweep(dir, r);
    int rc = 0;
    for (const auto& s : r.stationary) {
        man.runs.push_back({m_tag(s.m), s.ok ? "ok" : "failed", s.error});
        log << "sweep-stationary m=" << s.m << (s.ok ? " ok" : " FAILED: " + s.error) << "\n";
        if (!s.ok) rc = 1;
    }
    return rc;
}

int run_validate(RunManifest& man, std::ostream& log) {
    const auto checks = run_validation();
    int rc = 0;
    for (const auto& ch : checks) {
        log << (ch.passed ? "PASS  " : "FAIL  ") << ch.name << "  " << ch.detail << "\n";
        man.runs.push_back({ch.name, ch.passed ? "ok" : "failed", ch.passed ? "" : ch.detail});
        if (!ch.passed) rc = 1;
    }
    log << (rc == 0 ? "all oracles passed" : "oracle failures") << "\n";
    return rc;
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, std::ostream& log) {
    RunOutcome out;
    out.dir = output_root() / cfg.output_dir;
    fs::create_directories(out.dir);
    RunManifest man = make_manifest(cfg);
    ManifestScope scope(out.dir, man);
    try {
        switch (cfg.mode) {
            case Mode::evolve: out.exit_code = run_evolve(cfg, out.dir, man, log); break;
            case Mode::stationary: out.exit_code = run_stationary(cfg, out.dir, man, log); break;
            case Mode::sweep_evolve: out.exit_code = run_sweep_evolve(cfg, out.dir, man, log); break;
            case Mode::sweep_stationary: out.exit_code = run_sweep_stationary(cfg, out.dir, man, log); break;
            case Mode::validate: out.exit_code = run_validate(man, log); break;
        }
    } catch (const std::exception& e) {
        man.runs.push_back({to_string(cfg.mode), "failed", e.what()});
        log << "error: " << e.what() << "\n";
        out.exit_code = 1;
    }
    return out;
}

}  // namespace pks::io
