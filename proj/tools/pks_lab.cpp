// Command-line driver: evolve, stationary, sweep-evolve, sweep-stationary, validate.
//
// Exit status: 0 ok, 1 a run or oracle failed, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pks/cli_io.hpp"

namespace {

using pks::io::json;

struct Overrides {
    std::string config;
    std::optional<double> m;
    std::optional<double> t_end;
    std::optional<long long> cells;
    std::optional<double> r_max;
    std::optional<int> snapshots;
    std::optional<std::string> output_dir;
};

void add_common(CLI::App* sub, Overrides& o, bool with_time) {
    sub->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--m", o.m, "Exponent (single-m sweep for sweep modes)");
    sub->add_option("--cells", o.cells, "Number of radial cells");
    sub->add_option("--r-max", o.r_max, "Outer radius of the grid");
    sub->add_option("-o,--output-dir", o.output_dir, "Run directory, relative to the output root");
    if (with_time) {
        sub->add_option("--t-end", o.t_end, "Final time");
        sub->add_option("--snapshots", o.snapshots, "Number of snapshots");
    }
}

json build_config(const std::string& mode, const Overrides& o) {
    json j = json::object();
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw pks::io::ConfigError("config " + o.config + ": " + e.what());
        }
        if (!j.is_object()) throw pks::io::ConfigError("config must be a JSON object");
        if (j.contains("mode") && j["mode"] != mode)
            throw pks::io::ConfigError("mode: config says " + j["mode"].dump() + " but the subcommand is " + mode);
    }
    j["mode"] = mode;
    if (o.m) {
        j.erase("m_values");
        j["m"] = *o.m;
    }
    if (o.t_end) j["t_end"] = *o.t_end;
    if (o.snapshots) j["snapshots"] = *o.snapshots;
    if (o.cells) j["grid"]["cells"] = *o.cells;
    if (o.r_max) j["grid"]["r_max"] = *o.r_max;
    if (o.output_dir) j["output_dir"] = *o.output_dir;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial aggregation-diffusion lab: evolution, stationary states and m-sweeps"};
    app.require_subcommand(1);
    Overrides o;
    add_common(app.add_subcommand("evolve", "Evolve one density to t_end"), o, true);
    add_common(app.add_subcommand("stationary", "Solve for the stationary state of a given mass"), o, false);
    add_common(app.add_subcommand("sweep-evolve", "Evolve shared data for each m and fit decay rates"), o, true);
    add_common(app.add_subcommand("sweep-stationary", "Stationary states across m against the patch limit"), o,
               false);
    auto* validate = app.add_subcommand("validate", "Run the oracle battery");
    validate->add_option("-o,--output-dir", o.output_dir, "Run directory, relative to the output root");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string mode = app.get_subcommands().front()->get_name();
    pks::io::RunConfig cfg;
    try {
        cfg = pks::io::parse_config(build_config(mode, o));
    } catch (const pks::io::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    try {
        const auto outcome = pks::io::execute(cfg, std::cout);
        std::cout << "output: " << outcome.dir.string() << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
