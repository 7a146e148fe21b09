import numpy as np
import pytest

from abqsim.solvers import TridiagonalFactor, solve_tridiagonal, tridiagonal_matvec


def dense_from_bands(lower, diag, upper):
    m = len(diag)
    a = np.diag(diag)
    a += np.diag(lower[1:], -1)
    a += np.diag(upper[:-1], 1)
    return a


def random_system(rng, m, dominant=True):
    lower = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    upper = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    diag = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    if dominant:
        diag += (np.abs(lower) + np.abs(upper) + 1.0) * np.exp(1j * np.angle(diag))
    lower[0] = 0.0
    upper[-1] = 0.0
    return lower, diag, upper


def test_single_system_matches_dense_solve():
    rng = np.random.default_rng(0)
    for m in (2, 5, 33, 200):
        lower, diag, upper = random_system(rng, m)
        rhs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        x = solve_tridiagonal(lower, diag, upper, rhs)
        ref = np.linalg.solve(dense_from_bands(lower, diag, upper), rhs)
        assert np.max(np.abs(x - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_batched_systems_match_dense_solve():
    rng = np.random.default_rng(1)
    m, n = 48, 17
    lowers = np.empty((m, n), dtype=complex)
    diags = np.empty((m, n), dtype=complex)
    uppers = np.empty((m, n), dtype=complex)
    rhs = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    for s in range(n):
        lowers[:, s], diags[:, s], uppers[:, s] = random_system(rng, m)
    x = TridiagonalFactor(lowers, diags, uppers).solve(rhs)
    for s in range(n):
        ref = np.linalg.solve(dense_from_bands(lowers[:, s], diags[:, s], uppers[:, s]), rhs[:, s])
        assert np.max(np.abs(x[:, s] - ref)) < 1e-11 * max(1.0, np.max(np.abs(ref)))


def test_crank_nicolson_shape_systems():
    # the exact matrix family the propagators build: 1 + i tau H
    rng = np.random.default_rng(2)
    m = 128
    tau, dx = 0.002, 0.0625
    c = tau / (2 * dx ** 2)
    hop = np.exp(1j * rng.uniform(-np.pi, np.pi, m - 1))
    lower = np.zeros(m, dtype=complex)
    upper = np.zeros(m, dtype=complex)
    upper[:-1] = -1j * c * hop
    lower[1:] = -1j * c * np.conj(hop)
    diag = np.full(m, 1.0 + 2j * c)
    rhs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x = solve_tridiagonal(lower, diag, upper, rhs)
    residual = tridiagonal_matvec(lower, diag, upper, x) - rhs
    assert np.max(np.abs(residual)) < 1e-12 * np.max(np.abs(rhs))


def test_factor_reuse_is_consistent():
    rng = np.random.default_rng(3)
    m, n = 32, 8
    lower = np.zeros((m, n), dtype=complex)
    upper = np.zeros((m, n), dtype=complex)
    diag = np.full((m, n), 1.0 + 0.4j)
    upper[:-1] = -0.1j
    lower[1:] = -0.1j
    fac = TridiagonalFactor(lower, diag, upper)
    r1 = rng.standard_normal((m, n)) + 0j
    r2 = rng.standard_normal((m, n)) + 0j
    x1 = fac.solve(r1).copy()
    x2 = fac.solve(r2)
    assert np.max(np.abs(tridiagonal_matvec(lower, diag, upper, x1) - r1)) < 1e-13
    assert np.max(np.abs(tridiagonal_matvec(lower, diag, upper, x2) - r2)) < 1e-13


def test_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        TridiagonalFactor(np.zeros(4), np.ones(5), np.zeros(5))
    with pytest.raises(ValueError):
        TridiagonalFactor(np.zeros(1), np.ones(1), np.zeros(1))
