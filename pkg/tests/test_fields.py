import numpy as np
import pytest

from abqsim import (ConfigurationError, bump_packet, bump_profile, gaussian_packet,
                    make_grid, superpose)
from abqsim.observables import density, expectation_position


def test_grid_extents():
    g = make_grid(512, 512, 0.125, 0.125, -32.0, -32.0)
    assert g.x[0] == -32.0
    assert g.x[-1] == -32.0 + 511 * 0.125 == 31.875
    assert g.y[-1] == 31.875


def test_grid_unit():
    g = make_grid(16, 16, 1.0, 1.0, 0.0, 0.0)
    assert g.x[-1] == 15.0 and g.cell_area == 1.0


@pytest.mark.parametrize("bad", [
    dict(nx=0), dict(ny=8), dict(dx=0.0), dict(dy=-1.0),
])
def test_grid_rejects_bad_dimensions(bad):
    kw = dict(nx=16, ny=16, dx=1.0, dy=1.0, x0=0.0, y0=0.0)
    kw.update(bad)
    with pytest.raises(ConfigurationError):
        make_grid(**kw)


def test_grid_coordinates_exact():
    g = make_grid(1000, 16, 0.1, 1.0, -50.0, 0.0)
    i = np.arange(1000)
    assert np.array_equal(g.x, -50.0 + i * 0.1)


@pytest.fixture
def grid():
    return make_grid(320, 320, 0.125, 0.125, -20.0, -20.0)


def test_gaussian_moments(grid):
    # oracle: <x> = x_c, Var(x) = sigma^2 for |psi|^2 ~ exp(-(x-x_c)^2/(2 sigma^2))
    f = gaussian_packet(grid, (0.0, 0.0), 1.5)
    x, y = expectation_position(f)
    assert abs(x) < 1e-6 and abs(y) < 1e-6
    rho = density(f).values
    X, Y = grid.meshgrid()
    var_x = float(np.sum(rho * X ** 2) * grid.cell_area)
    var_y = float(np.sum(rho * Y ** 2) * grid.cell_area)
    assert abs(var_x - 2.25) < 1e-6
    assert abs(var_y - 2.25) < 1e-6


def test_gaussian_norm(grid):
    f = gaussian_packet(grid, (3.0, -2.0), 1.5, (1.0, 0.5))
    assert abs(f.norm_squared() - 1.0) < 1e-12


def test_gaussian_under_resolved(grid):
    with pytest.raises(ConfigurationError):
        gaussian_packet(grid, (0.0, 0.0), 0.2)


def test_gaussian_boundary_tail_guard(grid):
    with pytest.raises(ConfigurationError):
        gaussian_packet(grid, (14.0, 0.0), 1.5)


def test_bump_profile_center_value():
    # direct substitution: exp(-1/(a^2 - 0)) at the center
    assert bump_profile(np.float64(0.0), 2.0) == np.exp(-0.25)
    assert bump_profile(np.float64(4.0), 2.0) == 0.0


def test_bump_support_exact_zero(grid):
    a = 2.0
    f = bump_packet(grid, (0.0, 0.0), a)
    X, Y = grid.meshgrid()
    outside = X ** 2 + Y ** 2 >= a ** 2
    assert np.all(f.amp[outside] == 0.0)
    # one grid spacing beyond the radius along the axis
    i = np.argmin(np.abs(grid.x - (a + grid.dx)))
    j = np.argmin(np.abs(grid.y))
    assert f.amp[j, i] == 0.0


def test_bump_center_ratio(grid):
    # normalization cancels in ratios; compare against the raw profile
    a = 2.0
    f = bump_packet(grid, (0.0, 0.0), a)
    j = np.argmin(np.abs(grid.y))
    i0 = np.argmin(np.abs(grid.x))
    i1 = np.argmin(np.abs(grid.x - 1.0))
    expected = np.exp(-1.0 / a ** 2) / np.exp(-1.0 / (a ** 2 - 1.0 ** 2))
    assert abs(f.amp[j, i0] / f.amp[j, i1] - expected) < 1e-12


def test_bump_under_resolved(grid):
    with pytest.raises(ConfigurationError):
        bump_packet(grid, (0.0, 0.0), 0.4)


def test_disjoint_bumps_product_zero(grid):
    a = 2.0
    f1 = bump_packet(grid, (-4.0, 0.0), a)
    f2 = bump_packet(grid, (+4.0, 0.0), a)
    assert np.all(f1.amp * f2.amp == 0.0)


def test_superpose_destructive_raises(grid):
    f = gaussian_packet(grid, (0.0, 0.0), 1.5)
    with pytest.raises(ConfigurationError):
        superpose(f, f, 1.0, 1.0, np.pi)


def test_superpose_identity(grid):
    f1 = gaussian_packet(grid, (-3.0, 0.0), 1.5)
    f2 = gaussian_packet(grid, (+3.0, 0.0), 1.5)
    out = superpose(f1, f2, 1.0, 0.0, 2.3)
    assert np.max(np.abs(out.amp - f1.amp)) < 1e-14


def test_superpose_disjoint_density_phase_blind(grid):
    # supports never overlap, so the cross term is absent; only the
    # rounding of the pure-phase factor remains
    f1 = bump_packet(grid, (-4.0, 0.0), 2.0)
    f2 = bump_packet(grid, (+4.0, 0.0), 2.0)
    rho0 = density(superpose(f1, f2, 1.0, 1.0, 0.0)).values
    for beta in (np.pi / 4, np.pi, 3 * np.pi / 2):
        rho = density(superpose(f1, f2, 1.0, 1.0, beta)).values
        assert np.max(np.abs(rho - rho0)) < 1e-14


def test_superpose_grid_mismatch(grid):
    other = make_grid(128, 128, 0.25, 0.25, -16.0, -16.0)
    with pytest.raises(ConfigurationError):
        superpose(gaussian_packet(grid, (0, 0), 1.5), gaussian_packet(other, (0, 0), 1.5))


def test_field_immutable(grid):
    f = gaussian_packet(grid, (0.0, 0.0), 1.5)
    with pytest.raises(ValueError):
        f.amp[0, 0] = 1.0
