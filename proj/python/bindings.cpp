#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pks/cli_io.hpp"
#include "pks/estimates.hpp"
#include "pks/evolve.hpp"
#include "pks/initial_data.hpp"
#include "pks/limit_sweep.hpp"
#include "pks/potential.hpp"
#include "pks/radial_core.hpp"
#include "pks/stationary.hpp"

namespace py = pybind11;
using namespace pks;

namespace {

template <class Range>
py::array_t<double> to_array(const Range& v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

py::dict report_dict(const EstimateReport& r) {
    py::dict d;
    const auto& names = report_columns();
    const auto values = report_values(r);
    for (std::size_t i = 0; i < names.size(); ++i) d[py::str(names[i])] = values[i];
    return d;
}

py::dict fits_dict(const SweepResult& r) {
    py::dict d;
    for (const auto& [name, f] : r.fitted_slopes) d[py::str(name)] = f;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Radial aggregation-diffusion lab: fields, evolution, stationary states and m-sweeps";

    py::register_exception<Error>(m, "PksError", PyExc_ValueError);

    m.def("unit_ball_volume", &unit_ball_volume, py::arg("n"));

    py::class_<RadialGrid>(m, "RadialGrid")
        .def(py::init<int, double, std::size_t>(), py::arg("n_dim"), py::arg("r_max"), py::arg("cells"))
        .def_property_readonly("n_dim", &RadialGrid::n_dim)
        .def_property_readonly("r_max", &RadialGrid::r_max)
        .def_property_readonly("cells", &RadialGrid::cells)
        .def_property_readonly("dr", &RadialGrid::dr)
        .def_property_readonly("centers", [](const RadialGrid& g) { return to_array(g.centers()); })
        .def_property_readonly("faces", [](const RadialGrid& g) { return to_array(g.faces()); })
        .def_property_readonly("volumes", [](const RadialGrid& g) { return to_array(g.cell_volumes()); })
        .def("__repr__", [](const RadialGrid& g) {
            return "RadialGrid(n_dim=" + std::to_string(g.n_dim()) + ", r_max=" + std::to_string(g.r_max()) +
                   ", cells=" + std::to_string(g.cells()) + ")";
        });

    py::class_<DensityField>(m, "DensityField")
        .def(py::init([](const RadialGrid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 return DensityField(g, from_array(v));
             }),
             py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &DensityField::grid)
        .def_property_readonly("values", [](const DensityField& f) { return to_array(f.values); })
        .def("total_mass", &DensityField::total_mass)
        .def("max", &DensityField::max);

    py::class_<PressureField>(m, "PressureField")
        .def_readonly("grid", &PressureField::grid)
        .def_readonly("exponent", &PressureField::exponent)
        .def_property_readonly("values", [](const PressureField& f) { return to_array(f.values); });

    m.def("pressure_from_density", &pressure_from_density, py::arg("rho"), py::arg("m"));
    m.def("density_from_pressure", &density_from_pressure, py::arg("p"));
    m.def("bump_density", &bump_density, py::arg("grid"), py::arg("amplitude"), py::arg("radius"));
    m.def("patch_density", &patch_density, py::arg("grid"), py::arg("radius"));
    m.def("barenblatt_density", &barenblatt_density, py::arg("grid"), py::arg("t"), py::arg("m"), py::arg("c"));
    m.def("patch_pressure", &patch_pressure, py::arg("radius"), py::arg("n"), py::arg("grid"));

    m.def("potential_gradient", [](const DensityField& rho) { return to_array(potential_gradient(rho)); },
          py::arg("rho"));
    m.def("potential_value", [](const DensityField& rho) { return to_array(potential_value(rho)); }, py::arg("rho"));
    m.def("h_minus_one_distance", &h_minus_one_distance, py::arg("rho1"), py::arg("rho2"));

    m.def("free_energy", &free_energy, py::arg("rho"), py::arg("m"));
    m.def("dissipation", py::overload_cast<const DensityField&, double>(&dissipation), py::arg("rho"), py::arg("m"));
    m.def("dissipation", py::overload_cast<const DensityField&, const PressureField&>(&dissipation), py::arg("rho"),
          py::arg("p"));
    m.def("support_radius", &support_radius, py::arg("rho"), py::arg("tol") = kDefaultSupportTol);

    py::class_<EvolutionState>(m, "EvolutionState")
        .def_readonly("t", &EvolutionState::t)
        .def_readonly("rho", &EvolutionState::rho)
        .def_readonly("m", &EvolutionState::m)
        .def_readonly("step_count", &EvolutionState::step_count)
        .def_readonly("clipped_mass", &EvolutionState::clipped_mass)
        .def_readonly("max_density_seen", &EvolutionState::max_density_seen);

    m.def(
        "evolve",
        [](const DensityField& rho, double m, double t_end, std::vector<double> snapshot_times, bool attraction) {
            EvolveOptions opts;
            opts.t_end = t_end;
            opts.snapshot_times = std::move(snapshot_times);
            opts.attraction = attraction;
            py::gil_scoped_release release;
            auto res = evolve(make_state(rho, m), opts);
            return std::make_pair(res.state, res.snapshots);
        },
        py::arg("rho"), py::arg("m"), py::arg("t_end"), py::arg("snapshot_times") = std::vector<double>{},
        py::arg("attraction") = true, "Final state and snapshot states of one run.");

    py::class_<EvolutionSummary>(m, "EvolutionSummary")
        .def_readonly("m", &EvolutionSummary::m)
        .def_readonly("ok", &EvolutionSummary::ok)
        .def_readonly("error", &EvolutionSummary::error)
        .def_property_readonly("series",
                               [](const EvolutionSummary& e) {
                                   py::list l;
                                   for (const auto& r : e.series) l.append(report_dict(r));
                                   return l;
                               })
        .def_readonly("initial_mass", &EvolutionSummary::initial_mass)
        .def_readonly("final_mass", &EvolutionSummary::final_mass)
        .def_readonly("mass_drift_rel", &EvolutionSummary::mass_drift_rel)
        .def_readonly("clipped_mass", &EvolutionSummary::clipped_mass)
        .def_readonly("steps", &EvolutionSummary::steps)
        .def_readonly("excess_l2_final", &EvolutionSummary::excess_l2_final)
        .def_readonly("comp_residual_final", &EvolutionSummary::comp_residual_final)
        .def_readonly("omega_neg_l1_qt", &EvolutionSummary::omega_neg_l1_qt)
        .def_readonly("omega_neg_l3_cubed_qt", &EvolutionSummary::omega_neg_l3_cubed_qt)
        .def_readonly("gradP_l3_qt", &EvolutionSummary::gradP_l3_qt)
        .def_readonly("dtP_l1", &EvolutionSummary::dtP_l1)
        .def_readonly("energy_ok", &EvolutionSummary::energy_ok)
        .def_readonly("barrier_ok", &EvolutionSummary::barrier_ok);

    m.def(
        "run_evolution",
        [](const DensityField& rho, double m, double t_end, int snapshots) {
            py::gil_scoped_release release;
            return run_evolution(rho, m, t_end, snapshots);
        },
        py::arg("rho"), py::arg("m"), py::arg("t_end"), py::arg("snapshots") = 50);

    py::class_<StationaryProfile>(m, "StationaryProfile")
        .def_readonly("m", &StationaryProfile::m)
        .def_readonly("n", &StationaryProfile::n)
        .def_readonly("alpha", &StationaryProfile::alpha)
        .def_readonly("support_radius", &StationaryProfile::support_radius)
        .def_readonly("mass", &StationaryProfile::mass)
        .def_property_readonly("r", [](const StationaryProfile& p) { return to_array(p.r); })
        .def_property_readonly("psi", [](const StationaryProfile& p) { return to_array(p.psi); })
        .def("density_at", &StationaryProfile::density_at, py::arg("radius"))
        .def("pressure_at", &StationaryProfile::pressure_at, py::arg("radius"));

    m.def("shoot", &shoot, py::arg("alpha"), py::arg("m"), py::arg("n"), py::arg("dr_ode"));
    m.def(
        "solve_for_mass",
        [](double mass, double m, int n, double rel_tol) {
            SolveOptions opts;
            opts.rel_tol = rel_tol;
            py::gil_scoped_release release;
            return solve_for_mass(mass, m, n, opts);
        },
        py::arg("mass"), py::arg("m"), py::arg("n"), py::arg("rel_tol") = 1e-8);
    m.def("resample_density", &resample_density, py::arg("profile"), py::arg("grid"));
    m.def("uv_invariants_hold", [](const StationaryProfile& p) { return uv_trajectory(p).all(); }, py::arg("profile"));
    m.def("alpha_bound", &alpha_bound, py::arg("mass"), py::arg("n"));
    m.def("rstar_bound", &rstar_bound, py::arg("mass"), py::arg("n"));
    m.def("limit_radius", &limit_radius, py::arg("mass"), py::arg("n"));

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("slope", &FitResult::slope)
        .def_readonly("r2", &FitResult::r2)
        .def_readonly("floor_limited", &FitResult::floor_limited)
        .def("__repr__", [](const FitResult& f) {
            return "FitResult(slope=" + std::to_string(f.slope) + ", r2=" + std::to_string(f.r2) +
                   (f.floor_limited ? ", floor_limited)" : ")");
        });
    m.def(
        "fit_rate",
        [](const std::vector<double>& xs, const std::vector<double>& ys, double floor) {
            return fit_rate(xs, ys, floor);
        },
        py::arg("xs"), py::arg("ys"), py::arg("floor") = 0.0);

    py::class_<StationarySummary>(m, "StationarySummary")
        .def_readonly("m", &StationarySummary::m)
        .def_readonly("ok", &StationarySummary::ok)
        .def_readonly("alpha", &StationarySummary::alpha)
        .def_readonly("support_radius", &StationarySummary::support_radius)
        .def_readonly("radius_gap", &StationarySummary::radius_gap)
        .def_readonly("l1_to_patch", &StationarySummary::l1_to_patch)
        .def_readonly("pressure_gap", &StationarySummary::pressure_gap)
        .def_readonly("omega_neg_l3_cubed", &StationarySummary::omega_neg_l3_cubed);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("kind", &SweepResult::kind)
        .def_readonly("m_values", &SweepResult::m_values)
        .def_readonly("evolution", &SweepResult::evolution)
        .def_readonly("stationary", &SweepResult::stationary)
        .def_property_readonly("fitted_slopes", &fits_dict)
        .def_property_readonly("json", [](const SweepResult& r) { return io::sweep_to_json(r).dump(); });

    m.def(
        "run_evolution_sweep",
        [](const DensityField& rho, std::vector<double> m_values, double t_end, int snapshots) {
            EvolutionSweepConfig cfg;
            cfg.initial = rho;
            cfg.m_values = std::move(m_values);
            cfg.t_end = t_end;
            cfg.snapshots = snapshots;
            py::gil_scoped_release release;
            return run_evolution_sweep(cfg);
        },
        py::arg("rho"), py::arg("m_values"), py::arg("t_end") = 0.5, py::arg("snapshots") = 50);
    m.def(
        "run_stationary_sweep",
        [](double mass, int n, std::vector<double> m_values, std::size_t cells) {
            StationarySweepConfig cfg;
            cfg.mass = mass;
            cfg.n = n;
            cfg.m_values = std::move(m_values);
            cfg.cells = cells;
            py::gil_scoped_release release;
            return run_stationary_sweep(cfg);
        },
        py::arg("mass"), py::arg("n"), py::arg("m_values"), py::arg("cells") = 4096);

    m.def("validate", [] {
        py::list out;
        for (const auto& c : io::run_validation()) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    }, "Oracle battery as (name, passed, detail) tuples.");
}
