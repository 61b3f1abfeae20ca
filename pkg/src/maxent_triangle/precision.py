"""Working precision, the mean-n/3 root solver and power tables.

The root ``rho`` of ``sum_i (3i - n) rho**i = 0`` is located by bisection on
fixed-point integers followed by a bracketed Newton polish.  All intermediate
arithmetic is on Python ints, which is both exact and fast enough for n in the
thousands.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np

from . import fixedpoint as fx

DEFAULT_BITS = 128
GUARD_BITS = 32
MAX_NEWTON = 12


class PrecisionError(ArithmeticError):
    """Raised when a computation cannot reach the requested tolerance."""


def default_bits() -> int:
    return int(os.environ.get("MAXENT_PREC_BITS", DEFAULT_BITS))


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = field(default_factory=default_bits)
    tol: object = None  # mpf; defaults to 2**(-bits/2)

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"precision must be at least 64 bits, got {self.bits}")
        tol = mpmath.ldexp(1, -(self.bits // 2)) if self.tol is None else mpmath.mpf(self.tol)
        if not 0 < tol < 1:
            raise ValueError(f"tolerance must lie in (0, 1), got {tol}")
        object.__setattr__(self, "tol", tol)

    @property
    def work_bits(self) -> int:
        return self.bits + GUARD_BITS


@dataclass(frozen=True)
class RhoSolution:
    """Root of the mean equation at ``bits`` precision.

    ``rho_fixed`` is the root scaled by ``2**work_bits``; ``rho`` is the exact
    mpf with the same value.
    """

    n: int
    rho_fixed: int
    work_bits: int
    residual: object
    bits: int
    tol: object
    iterations: int = 0

    @property
    def rho(self):
        return fx.to_mpf(self.rho_fixed, self.work_bits)

    @property
    def lower_bound(self):
        with mpmath.workprec(self.work_bits):
            return mpmath.mpf(self.n) / (self.n + 3)


def _horner(n: int, r: int, w: int) -> tuple[int, int]:
    """g(r) and g'(r) for g(r) = sum (3i - n) r**i, all scaled by 2**w."""
    one = 1 << w
    g = (2 * n) << w  # leading coefficient 3n - n
    dg = 0
    for i in range(n - 1, -1, -1):
        dg = ((dg * r) >> w) + g
        g = ((g * r) >> w) + (3 * i - n) * one
    return g, dg


def solve_rho(n: int, ctx: PrecisionContext | None = None) -> RhoSolution:
    """Unique positive root of the mean equation for the triangle of size n."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    ctx = ctx or PrecisionContext()
    w = ctx.work_bits
    one = 1 << w
    lo = fx.round_div(n << w, n + 3)
    hi = one - fx.round_div(one, 4 * n * n)
    if _horner(n, hi, w)[0] <= 0:
        hi = one
    if _horner(n, lo, w)[0] > 0:
        raise PrecisionError(f"lower bracket n/(n+3) violated for n={n}")

    # bisection to half precision
    target = 1 << (w - ctx.bits // 2)
    it = 0
    root = None
    while hi - lo > target:
        mid = (lo + hi) >> 1
        g, _ = _horner(n, mid, w)
        it += 1
        if g == 0:
            root = mid
            break
        if g < 0:
            lo = mid
        else:
            hi = mid

    if root is None:
        r = (lo + hi) >> 1
        for _ in range(MAX_NEWTON):
            g, dg = _horner(n, r, w)
            it += 1
            if g == 0 or dg <= 0:
                break
            step = fx.round_div(g << w, dg)
            nr = r - step
            if not lo <= nr <= hi:
                nr = (lo + hi) >> 1
            if g < 0:
                lo = max(lo, r)
            else:
                hi = min(hi, r)
            if abs(nr - r) <= 1:
                r = nr
                break
            r = nr
        root = r

    g, _ = _horner(n, root, w)
    residual = abs(fx.to_mpf(g, w)) / 3
    if residual > ctx.tol:
        raise PrecisionError(
            f"residual {mpmath.nstr(residual, 5)} exceeds tol {mpmath.nstr(ctx.tol, 5)} for n={n}"
        )
    return RhoSolution(n, root, w, residual, ctx.bits, ctx.tol, it)


@dataclass(frozen=True, eq=False)
class PowerTable:
    """rho**0 .. rho**n as fixed-point ints with ``frac_bits`` fraction bits."""

    n: int
    frac_bits: int
    fixed: tuple
    rho_fixed: int
    work_bits: int

    @classmethod
    def from_rho(cls, n: int, rho, frac_bits: int = DEFAULT_BITS) -> "PowerTable":
        """Table for an arbitrary rho in [0, 1] (not necessarily the root)."""
        w = frac_bits + GUARD_BITS
        return cls._build(n, fx.to_fixed(rho, w), frac_bits, w)

    @classmethod
    def _build(cls, n: int, r: int, frac_bits: int, w: int) -> "PowerTable":
        if not 0 <= r <= 1 << w:
            raise ValueError("rho must lie in [0, 1]")
        half = 1 << (w - 1)
        p = 1 << w
        shift = w - frac_bits
        out = [1 << frac_bits]
        for _ in range(n):
            p = (p * r + half) >> w
            out.append(fx.round_div(p, 1 << shift))
        return cls(n, frac_bits, tuple(out), r, w)

    @property
    def rho(self):
        return fx.to_mpf(self.rho_fixed, self.work_bits)

    @property
    def powers(self) -> list:
        return [fx.to_mpf(p, self.frac_bits) for p in self.fixed]

    @cached_property
    def limbs(self) -> np.ndarray:
        return fx.encode(self.fixed, self.frac_bits)

    @cached_property
    def total(self) -> int:
        """sum_i rho**i, fixed-point."""
        return sum(self.fixed)


def power_table(sol: RhoSolution) -> PowerTable:
    return PowerTable._build(sol.n, sol.rho_fixed, sol.bits, sol.work_bits)


def mean_residual(n: int, rho, table: PowerTable):
    """sum_i i rho**i - (n/3) sum_i rho**i evaluated from the table."""
    if table.n != n:
        raise ValueError("power table built for a different n")
    if rho is not None and abs(mpmath.mpf(rho) - table.rho) > mpmath.ldexp(1, -table.frac_bits):
        raise ValueError("power table built for a different rho")
    acc = sum((3 * i - n) * p for i, p in enumerate(table.fixed))
    with mpmath.workprec(table.work_bits):
        return fx.to_mpf(acc, table.frac_bits) / 3
