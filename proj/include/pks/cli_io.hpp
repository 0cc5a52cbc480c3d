#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pks/estimates.hpp"
#include "pks/limit_sweep.hpp"
#include "pks/radial_core.hpp"
#include "pks/stationary.hpp"

namespace pks::io {

using json = nlohmann::ordered_json;

enum class Mode { evolve, stationary, sweep_evolve, sweep_stationary, validate };

std::string to_string(Mode mode);

struct ConfigError : Error {
    using Error::Error;
};

struct InitialSpec {
    std::string kind = "bump";  // bump | patch | stationary
    double amplitude = 0.5;
    double radius = 1.0;
    double mass = 4.0 * 3.14159265358979323846 / 3.0;
};

struct Tolerances {
    double cfl_diffusion = 0.25;
    double cfl_advection = 0.5;
    double solve_rel_tol = 1e-8;
    double dr_ode = 0.0;  // 0 picks the solver default
};

struct RunConfig {
    Mode mode = Mode::evolve;
    int n_dim = 3;
    double m = 8.0;
    std::vector<double> m_values;
    double r_max = 4.0;
    std::size_t cells = 2048;
    InitialSpec initial;
    double t_end = 0.5;
    int snapshots = 50;
    Tolerances tolerances;
    std::string output_dir;
    std::uint64_t seed = 0;
    // Relative amplitude of the random radial perturbation for the
    // uniqueness probe; 0 disables the probe.
    double perturbation = 0.0;
};

// Strict: unknown keys and out-of-range values throw ConfigError naming the key.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::filesystem::path& path);
json to_json(const RunConfig& cfg);

// Grid and initial density described by the config.
RadialGrid config_grid(const RunConfig& cfg);
DensityField config_initial_density(const RunConfig& cfg);

// 17 significant digits; parses back to the same double.
std::string format_double(double x);

void write_series(const std::filesystem::path& path, std::span<const EstimateReport> reports);

struct SweepFiles {
    std::filesystem::path summary;
    std::vector<std::filesystem::path> per_m;
};

json sweep_to_json(const SweepResult& result, const std::vector<std::string>& per_m_files = {});
SweepFiles write_sweep(const std::filesystem::path& dir, const SweepResult& result);

void write_profile(const std::filesystem::path& path, const StationaryProfile& p);

struct RunStatus {
    std::string label;
    std::string status;  // ok | failed
    std::string error;
};

struct ConservationAudit {
    std::string label;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double clipped_mass = 0.0;
};

struct RunManifest {
    json config;
    std::string code_version;
    std::string start_time;
    std::string end_time;
    std::vector<RunStatus> runs;
    std::vector<ConservationAudit> conservation;
    std::map<std::string, std::string> assumption_flags;
};

RunManifest make_manifest(const RunConfig& cfg);
json manifest_to_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

// UTC, ISO 8601.
std::string utc_now();

inline constexpr const char* kCodeVersion = "0.3.1";
inline constexpr const char* kOutputRootEnv = "PKS_LAB_OUTPUT_ROOT";

// Output root from the environment, falling back to the working directory.
std::filesystem::path output_root();

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<OracleCheck> run_validation();

using Laplacian = std::function<std::vector<double>(const RadialGrid&, std::span<const double>)>;

// Largest |Laplacian P + rho| over cells strictly inside the unit ball patch.
// The stencil is injectable so a broken one can be shown to fail.
double patch_omega_defect(int n, const Laplacian& laplacian);

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 a run or check failed
    std::filesystem::path dir;
};

// Runs the configured mode under output_root()/output_dir, writing the
// manifest on every path out (including exceptions).
RunOutcome execute(const RunConfig& cfg, std::ostream& log);

}  // namespace pks::io
