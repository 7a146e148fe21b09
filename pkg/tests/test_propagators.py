import numpy as np
import pytest

from abqsim import (ConfigurationError, NumericalFailure, ScenarioError, WaveField,
                    gaussian_packet, make_grid, string_gauge, superpose, zero_gauge)
from abqsim.observables import density, expectation_position, modular_momentum_expectation
from abqsim.propagators import (LineSystemState, PropagatorConfig, disk_mask,
                                evolve_lattice, evolve_line_system, evolve_staged,
                                free_evolution, make_line_system)


def spreading_sigma(sigma, t):
    return np.sqrt(sigma ** 2 + t ** 2 / (4 * sigma ** 2))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        PropagatorConfig(dt=0.0, t_end=1.0)
    with pytest.raises(ConfigurationError):
        PropagatorConfig(dt=0.01, t_end=1.005)          # not a step multiple
    with pytest.raises(ConfigurationError):
        PropagatorConfig(dt=0.01, t_end=1.0, solver_tolerance=1e-8)
    cfg = PropagatorConfig(dt=0.01, t_end=1.0, record_dt=0.05)
    assert cfg.n_steps == 100 and cfg.record_every() == 5
    with pytest.raises(ConfigurationError):
        PropagatorConfig(dt=0.01, t_end=1.0, snapshot_times=(0.5, 0.1)).snapshot_steps()


@pytest.mark.slow
def test_lattice_free_gaussian_matches_analytic_law():
    # fine spacing along the motion axis keeps dispersion below the
    # 1e-4 oracle tolerance (error ~ k^3 dy^2 t / 6)
    grid = make_grid(256, 2048, 0.125, 0.015625, -16.0, -16.0)
    sigma, k = 1.5, -1.0
    f = gaussian_packet(grid, (0.0, 0.0), sigma, (0.0, k))
    out = evolve_lattice(f, zero_gauge(grid), PropagatorConfig(dt=0.0025, t_end=1.0))
    x, y = expectation_position(out)
    assert abs(y - k * 1.0) < 1e-4
    assert abs(x) < 1e-10
    rho = density(out).values
    X, Y = grid.meshgrid()
    var_x = float(np.sum(rho * (X - x) ** 2) * grid.cell_area)
    var_y = float(np.sum(rho * (Y - y) ** 2) * grid.cell_area)
    s_t = spreading_sigma(sigma, 1.0)
    assert abs(np.sqrt(var_y) - s_t) < 1e-4
    assert abs(np.sqrt(var_x) - s_t) < 1e-4
    assert abs(out.norm_squared() - f.norm_squared()) < 1e-10


def test_lattice_flux_string_is_local():
    # a packet that never nears the x > 0 half of the y = 0 row evolves
    # as if the gauge were zero
    grid = make_grid(256, 256, 0.125, 0.125, -16.0, -15.9375)
    f = gaussian_packet(grid, (-6.0, 6.0), 0.9, (0.0, -1.0))
    cfg = PropagatorConfig(dt=0.004, t_end=0.5)
    out_zero = evolve_lattice(f, zero_gauge(grid), cfg)
    out_flux = evolve_lattice(f, string_gauge(grid, 2.0), cfg)
    assert np.max(np.abs(out_zero.amp - out_flux.amp)) < 1e-8


def test_lattice_unitarity_and_mask():
    grid = make_grid(128, 128, 0.25, 0.25, -16.0, -15.875)
    mask = disk_mask(grid, 1.0)
    f = gaussian_packet(grid, (0.0, 2.0), 1.2, (0.0, -1.0))
    cfg = PropagatorConfig(dt=0.01, t_end=2.0, mask=mask)
    out = evolve_lattice(f, string_gauge(grid, 1.0), cfg)
    assert np.all(out.amp[mask] == 0.0)
    masked0 = f.amp.copy()
    masked0[mask] = 0.0
    norm0 = float(np.sum(np.abs(masked0) ** 2)) * grid.cell_area
    assert abs(out.norm_squared() - norm0) < 1e-10


def test_lattice_boundary_guard_trips():
    grid = make_grid(128, 128, 0.25, 0.25, -16.0, -15.875)
    X, Y = grid.meshgrid()
    amp = np.exp(-((X) ** 2 + (Y - 8.0) ** 2) / 4.0) * np.exp(-1.2j * Y)
    f = WaveField(grid, amp).normalized()      # built directly: no constructor guard
    with pytest.raises(NumericalFailure):
        evolve_lattice(f, zero_gauge(grid), PropagatorConfig(dt=0.01, t_end=8.0))


def test_lattice_snapshot_contract():
    grid = make_grid(128, 128, 0.25, 0.25, -16.0, -15.875)
    f = gaussian_packet(grid, (0.0, 0.0), 1.5)
    got = []
    cfg = PropagatorConfig(dt=0.01, t_end=0.2, snapshot_times=(0.0, 0.1, 0.2))
    evolve_lattice(f, zero_gauge(grid), cfg, on_snapshot=lambda t, fld: got.append((t, fld)))
    assert [t for t, _ in got] == [0.0, pytest.approx(0.1), pytest.approx(0.2)]
    assert np.array_equal(got[0][1].amp, f.amp)
    assert all(isinstance(fld, WaveField) for _, fld in got)


def _staged_packets():
    grid = make_grid(448, 896, 0.125, 0.0625, -28.0, -34.0)
    left = gaussian_packet(grid, (-8.0, 10.0), 1.2, (0.0, -4.0))
    right = gaussian_packet(grid, (+8.0, 10.0), 1.2, (0.0, -4.0))
    return grid, left, right


def test_staged_zero_alpha_bit_exact():
    grid, left, right = _staged_packets()
    cfg = PropagatorConfig(dt=0.004, t_end=3.0, record_dt=0.02)
    combined = superpose(left, right, 1.0, 1.0, 0.0)
    free = free_evolution(combined, cfg)
    staged, event = evolve_staged(left, right, 0.0, cfg)
    assert np.array_equal(free.amp, staged.amp)
    assert event["value"] == 0.0


def test_staged_modular_jump_values():
    # before/after the kick: magnitude preserved, argument jumps by alpha
    grid, left, right = _staged_packets()
    alpha, length = np.pi / 2, 16.0
    cfg = PropagatorConfig(dt=0.004, t_end=6.0, record_dt=0.02)
    series = []
    staged, event = evolve_staged(
        left, right, alpha, cfg,
        on_record=lambda t, f: series.append((t, modular_momentum_expectation(f, length))))
    t_kick = event["time"]
    assert abs(event["zero_crossing_estimate"] - 10.0 / 4.0) < 0.05
    before = [m for t, m in series if t < t_kick - 0.5]
    after = [m for t, m in series if t > t_kick + 0.5]
    m_before, m_after = before[-1], after[-1]
    assert abs(abs(m_after) - abs(m_before)) < 1e-6
    darg = (np.angle(m_after) - np.angle(m_before)) % (2 * np.pi)
    assert abs(darg - alpha) < 1e-6
    # conservation within each free stage (exact commutation)
    assert max(abs(m - before[0]) for m in before) < 1e-9
    assert max(abs(m - after[0]) for m in after) < 1e-9


def test_staged_cross_term_value():
    grid, left, right = _staged_packets()
    beta = 0.7
    f = superpose(left, right, 1.0, 1.0, beta)
    got = modular_momentum_expectation(f, 16.0)
    assert abs(got - 0.5 * np.exp(1j * beta)) < np.exp(-16.0 ** 2 / (8 * 1.2 ** 2)) + 1e-8


def test_staged_rejects_overlapping_packets():
    grid = make_grid(256, 256, 0.125, 0.125, -16.0, -10.03125)
    left = gaussian_packet(grid, (-2.0, 6.0), 1.4, (0.0, -2.0))
    right = gaussian_packet(grid, (+2.0, 6.0), 1.4, (0.0, -2.0))
    with pytest.raises(ScenarioError):
        evolve_staged(left, right, 1.0, PropagatorConfig(dt=0.004, t_end=1.0))


def test_staged_requires_crossing():
    grid = make_grid(320, 256, 0.125, 0.125, -20.0, -10.03125)
    left = gaussian_packet(grid, (-8.0, 6.0), 1.2, (0.0, 0.0))
    right = gaussian_packet(grid, (+8.0, 6.0), 1.2, (0.0, 0.0))
    with pytest.raises(ScenarioError):
        evolve_staged(left, right, 1.0, PropagatorConfig(dt=0.01, t_end=0.5, record_dt=0.05))


# ---------------------------------------------------------------------------
# line system


def _line(mu, branches=(7,), sigma=2.0, k=2.0):
    return make_line_system(1024, 0.0625, -32.0, -8.0, sigma, k, branches, mu, offset=2.0)


def test_line_single_branch_density_matches_free():
    # any 1D vector potential is a total derivative: densities are free
    cfg = PropagatorConfig(dt=0.005, t_end=4.0, record_dt=0.5)
    charged = []
    neutral = []
    evolve_line_system(_line(0.3), cfg, on_record=lambda t, s: charged.append(np.abs(s.coeffs[0]) ** 2))
    evolve_line_system(_line(0.0), cfg, on_record=lambda t, s: neutral.append(np.abs(s.coeffs[0]) ** 2))
    diff = max(float(np.max(np.abs(a - b))) for a, b in zip(charged, neutral))
    assert diff < 1e-8


def test_line_velocity_constant():
    cfg = PropagatorConfig(dt=0.005, t_end=4.0, record_dt=0.05)
    _, series = evolve_line_system(_line(0.3, branches=(5, 9)), cfg)
    v = series["velocity"]
    assert float(np.max(v.max(axis=0) - v.min(axis=0))) < 1e-8


def test_line_decoupled_branches_stay_identical():
    cfg = PropagatorConfig(dt=0.005, t_end=2.0, record_dt=0.1)
    _, series = evolve_line_system(_line(0.0, branches=(10, 11)), cfg)
    ov = series["overlaps"][:, 0]
    assert float(np.max(np.abs(np.abs(ov) - 1.0))) < 1e-12
    assert abs(series["norms"][-1].sum() - 1.0) < 1e-10


def test_line_norm_and_boundary_guards():
    cfg = PropagatorConfig(dt=0.005, t_end=14.0, record_dt=0.5)
    with pytest.raises(NumericalFailure):
        evolve_line_system(_line(0.05), cfg)       # packet reaches the wall


def test_line_cylinder_kinetic_phase():
    # finite source moment adds exp(-i n^2 t / 2 I_c) per branch
    base = _line(0.0, branches=(3, 5))
    st = LineSystemState(ny=base.ny, dy=base.dy, y0=base.y0, offset=base.offset,
                         mu=base.mu, branch_ns=base.branch_ns, coeffs=base.coeffs,
                         cylinder_moment=50.0)
    cfg = PropagatorConfig(dt=0.005, t_end=1.0, record_dt=0.5)
    _, series = evolve_line_system(st, cfg)
    ov = series["overlaps"][:, 0]
    expected = (3 ** 2 - 5 ** 2) * 1.0 / (2 * 50.0)
    assert abs(np.angle(ov[-1] * np.conj(ov[0])) - expected) < 1e-10
