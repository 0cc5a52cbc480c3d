import math

import numpy as np
import pytest

import pks_lab as pk


def test_grid_and_density():
    g = pk.RadialGrid(3, 2.0, 64)
    assert g.cells == 64
    assert g.volumes.sum() == pytest.approx(4 * math.pi / 3 * 8, rel=1e-12)
    rho = pk.patch_density(g, 1.0)
    assert rho.total_mass() == pytest.approx(4 * math.pi / 3, rel=1e-12)
    p = pk.pressure_from_density(rho, 3.0)
    assert p.values.max() == pytest.approx(1.5)
    back = pk.density_from_pressure(p)
    assert np.allclose(back.values, rho.values)


def test_density_from_numpy_checks_size():
    g = pk.RadialGrid(3, 1.0, 8)
    pk.DensityField(g, np.ones(8))
    with pytest.raises(ValueError):
        pk.DensityField(g, np.ones(5))


def test_energy_and_distance():
    g = pk.RadialGrid(3, 4.0, 1024)
    rho = pk.patch_density(g, 1.0)
    assert pk.free_energy(rho, 2.0) == pytest.approx(16 * math.pi / 15, rel=1e-3)
    assert pk.h_minus_one_distance(rho, rho) == 0.0
    assert pk.dissipation(rho, 64.0) >= 0.0


def test_evolution_conserves_mass():
    g = pk.RadialGrid(3, 4.0, 128)
    rho = pk.bump_density(g, 0.5, 1.0)
    s = pk.run_evolution(rho, 8.0, 0.02, 4)
    assert s.ok
    assert len(s.series) == 5
    assert abs(s.mass_drift_rel) < 1e-10
    final, snaps = pk.evolve(rho, 8.0, 0.01, [0.005, 0.01])
    assert [x.t for x in snaps] == [0.005, 0.01]
    assert final.rho.total_mass() == pytest.approx(rho.total_mass(), rel=1e-12)


def test_stationary_solve():
    mass = 4 * math.pi / 3
    prof = pk.solve_for_mass(mass, 8.0, 3)
    assert prof.mass == pytest.approx(mass, rel=1e-8)
    a, a_pow = pk.alpha_bound(mass, 3)
    assert prof.alpha <= a
    assert prof.support_radius <= pk.rstar_bound(mass, 3)
    assert pk.uv_invariants_hold(prof)
    assert pk.limit_radius(mass, 3) == pytest.approx(1.0)
    assert pk.rstar_bound(4 * math.pi, 3) == pytest.approx(6.929182510314625, rel=1e-12)


def test_fit_rate():
    xs = [8.0, 16.0, 32.0, 64.0]
    f = pk.fit_rate(xs, [x**-0.5 for x in xs])
    assert f.slope == pytest.approx(-0.5, abs=1e-12)
    assert pk.fit_rate(xs, [0.0] * 4).floor_limited


def test_stationary_sweep():
    r = pk.run_stationary_sweep(4 * math.pi / 3, 3, [8.0, 16.0], cells=512)
    assert r.kind == "stationary"
    gaps = [s.radius_gap for s in r.stationary]
    assert gaps[1] < gaps[0]
    assert '"stationary"' in r.json


def test_errors_map_to_value_error():
    with pytest.raises(pk.PksError):
        pk.RadialGrid(3, -1.0, 10)
    with pytest.raises(ValueError):
        pk.fit_rate([1.0], [1.0])


def test_validate_battery():
    checks = pk.validate()
    assert checks and all(ok for _, ok, _ in checks)
