import time

import mpmath
import pytest

from maxent_triangle.precision import (PowerTable, PrecisionContext, PrecisionError, mean_residual,
                                       power_table, solve_rho)


def test_context_defaults():
    ctx = PrecisionContext(128)
    assert ctx.tol == mpmath.ldexp(1, -64)
    with pytest.raises(ValueError):
        PrecisionContext(32)
    with pytest.raises(ValueError):
        PrecisionContext(128, 2)


def test_context_env_override(monkeypatch):
    monkeypatch.setenv("MAXENT_PREC_BITS", "200")
    assert PrecisionContext().bits == 200


def test_rho_n1_closed_form(ctx):
    # n = 1: rho = (1 + rho)/3
    sol = solve_rho(1, ctx)
    assert abs(sol.rho - mpmath.mpf(1) / 2) <= ctx.tol
    assert sol.residual <= ctx.tol


def test_rho_n2_closed_form(ctx):
    # n = 2: 4 rho^2 + rho - 2 = 0
    sol = solve_rho(2, ctx)
    assert abs(sol.rho - (mpmath.sqrt(33) - 1) / 8) <= mpmath.mpf(10) ** -30
    assert abs(4 * sol.rho**2 + sol.rho - 2) <= ctx.tol


@pytest.mark.parametrize("n", range(1, 101))
def test_rho_bracket_and_residual(n, ctx):
    sol = solve_rho(n, ctx)
    assert mpmath.mpf(n) / (n + 3) <= sol.rho < 1
    assert sol.residual <= ctx.tol
    table = power_table(sol)
    assert abs(mean_residual(n, sol.rho, table)) <= ctx.tol


@pytest.mark.parametrize("n", [1, 2, 7, 64, 333])
def test_precision_doubling_is_stable(n):
    lo = solve_rho(n, PrecisionContext(128))
    hi = solve_rho(n, PrecisionContext(256))
    assert abs(lo.rho - hi.rho) < lo.tol


def test_solver_rejects_bad_n():
    with pytest.raises(ValueError):
        solve_rho(0)
    with pytest.raises(ValueError):
        solve_rho(2.5)


def test_residual_cap_raises():
    # tolerance below what the working precision can deliver
    with pytest.raises(PrecisionError):
        solve_rho(500, PrecisionContext(64, mpmath.mpf(2) ** -200))


def test_power_table_examples(ctx):
    t = power_table(solve_rho(1, ctx))
    assert t.powers == [1, mpmath.mpf(0.5)]
    t = power_table(solve_rho(2, ctx))
    assert abs(t.powers[2] - (17 - mpmath.sqrt(33)) / 32) <= ctx.tol


@pytest.mark.parametrize("n", [1, 5, 40, 700])
def test_power_table_invariants(n, ctx):
    t = power_table(solve_rho(n, ctx))
    p = t.powers
    assert p[0] == 1
    assert all(a > b for a, b in zip(p, p[1:]))
    ulp = mpmath.ldexp(1, -t.frac_bits)
    assert all(abs(p[i + 1] - p[i] * t.rho) <= (i + 2) * ulp for i in range(n))
    assert p[n] >= (mpmath.mpf(n) / (n + 3)) ** n


def test_mean_residual_examples():
    t = PowerTable.from_rho(3, 1)
    assert mean_residual(3, 1, t) == 2
    t = PowerTable.from_rho(2, 0)
    assert abs(mean_residual(2, 0, t) + mpmath.mpf(2) / 3) <= mpmath.ldexp(1, -120)
    t = PowerTable.from_rho(1, mpmath.mpf(0.5))
    assert mean_residual(1, 0.5, t) == 0


@pytest.mark.parametrize("n", [1, 2, 9, 50])
def test_mean_increasing_and_single_sign_change(n):
    # the residual equals (mean - n/3) * sum rho^i; only the mean is monotone
    grid = [mpmath.mpf(k) / 64 for k in range(1, 64)]
    tables = [PowerTable.from_rho(n, r) for r in grid]
    means = [sum(i * p for i, p in enumerate(t.fixed)) / mpmath.mpf(t.total) for t in tables]
    assert all(a < b for a, b in zip(means, means[1:]))
    signs = [mean_residual(n, r, t) > 0 for r, t in zip(grid, tables)]
    assert signs == sorted(signs)
    root = solve_rho(n).rho
    assert all(s == (r > root) for r, s in zip(grid, signs))


def test_solve_is_fast_for_small_n(ctx):
    for n in (1, 2):
        solve_rho(n, ctx)
        best = min(_timed(n, ctx) for _ in range(5))
        assert best < 1e-3


def _timed(n, ctx):
    t = time.perf_counter()
    solve_rho(n, ctx)
    return time.perf_counter() - t
