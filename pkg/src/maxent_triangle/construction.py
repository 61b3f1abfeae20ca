"""The explicit vector beta and its flattening into a non-negative pi.

beta is written down in closed form from the power table; pi adds to it a
non-negative combination of six-term kernel moves m(b -> a) that equalizes the
boundary row (0, a, n - a).  Everything is exact fixed-point arithmetic on top
of the (rounded) power table, so the marginal of pi equals that of beta
bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import mpmath
import numpy as np

from . import fixedpoint as fx
from . import kernels
from .precision import PowerTable, PrecisionContext, PrecisionError, RhoSolution, power_table, solve_rho
from .triangle import (Orbit, SymmetricTriangleVector, canonicalize, min_entry, num_orbits,
                       orbit_index, orbit_offsets)


class NegativeEntryError(PrecisionError):
    """pi has an entry below -tol; the working precision is insufficient."""

    def __init__(self, orbit: Orbit, value):
        super().__init__(f"pi{orbit.canonical} = {mpmath.nstr(value, 8)} is negative")
        self.orbit = orbit
        self.value = value


@dataclass(frozen=True, eq=False)
class BetaVector:
    vector: SymmetricTriangleVector
    z: tuple  # raw boundary values beta_{0,i,n-i}, i = 0..n

    @property
    def n(self) -> int:
        return self.vector.n

    @property
    def frac_bits(self) -> int:
        return self.vector.frac_bits

    @property
    def z_values(self) -> list:
        return [fx.to_mpf(x, self.frac_bits) for x in self.z]


def boundary_values(table: PowerTable) -> list[int]:
    """beta on the boundary row (0, a, n - a), a = 0..n, evaluated for every a."""
    n, P = table.n, table.fixed
    corner = n * P[n]
    z = [corner]
    s = 0  # sum_{i=1}^{a-1} (rho^{n-i} - rho^i)
    for a in range(1, n):
        twice = 2 * s + (a - 1) * P[a] + (n - a + 1) * P[n - a]
        z.append((twice + 1) >> 1)
        s += P[n - a] - P[a]
    if n >= 1:
        z.append(corner)
    return z


def build_beta(table: PowerTable) -> BetaVector:
    n = table.n
    offsets = orbit_offsets(n)
    limbs = np.zeros((num_orbits(n), fx.n_limbs(table.frac_bits)), dtype=np.int64)
    kernels.beta_interior(n, table.limbs, offsets, limbs)
    z = boundary_values(table)
    # boundary orbits (0, a, n - a) occupy rows 0 .. n//2
    limbs[: n // 2 + 1] = fx.encode(z[: n // 2 + 1], table.frac_bits)
    return BetaVector(SymmetricTriangleVector(n, table.frac_bits, limbs), tuple(z))


@dataclass(frozen=True)
class MoveSpec:
    x: int
    y: int
    base: tuple

    def terms(self) -> list[tuple[int, tuple]]:
        """The six (sign, triple) pairs of the move."""
        a, b, c = self.base
        x, y = self.x, self.y
        return [
            (-1, (a, b, c)),
            (+1, (a + x, b - x, c)),
            (-1, (a + x + y, b - x, c - y)),
            (+1, (a + x + y, b, c - x - y)),
            (-1, (a + x, b + y, c - x - y)),
            (+1, (a, b + y, c - y)),
        ]

    def validate(self) -> None:
        if self.x < 1 or self.y < 1:
            raise ValueError(f"move offsets must be positive, got x={self.x}, y={self.y}")
        if len(self.base) != 3 or min(self.base) < 0:
            raise ValueError(f"bad base triple {self.base!r}")
        a, b, c = self.base
        if b < self.x or c < self.x + self.y:
            raise ValueError(f"move needs b >= x and c >= x + y, got {self.base}, x={self.x}, y={self.y}")


def move_vector(spec: MoveSpec, frac_bits: int = 128) -> SymmetricTriangleVector:
    spec.validate()
    n = sum(spec.base)
    raw = [0] * num_orbits(n)
    for sign, t in spec.terms():
        o = canonicalize(t, n)
        raw[orbit_index(t, n)] += sign * (6 // o.orbit_size)
    return SymmetricTriangleVector.from_raw(n, [x << frac_bits for x in raw], frac_bits)


def specialized_spec(b: int, a: int, n: int) -> MoveSpec:
    if not (2 <= b < a and 2 * a <= n):
        raise ValueError(f"m(b -> a) needs 2 <= b < a <= n/2, got b={b}, a={a}, n={n}")
    return MoveSpec(-(-b // 2), a - b, (0, b, n - b))


def specialized_move(b: int, a: int, n: int, frac_bits: int = 128) -> SymmetricTriangleVector:
    return move_vector(specialized_spec(b, a, n), frac_bits)


def schedule(n: int) -> Iterator[tuple[int, int]]:
    """(b, a) pairs of the flattening, lexicographic."""
    for b in range(2, (n - 2) // 2 + 1):
        for a in range(b + 1, n // 2 + 1):
            yield b, a


@dataclass(frozen=True, eq=False)
class FlatteningCoefficients:
    n: int
    frac_bits: int
    c: dict = field(default_factory=dict)       # b -> raw c_b
    c_half: dict = field(default_factory=dict)  # b -> raw c_b / 2 (even n only)

    def coefficient(self, b: int, a: int) -> int:
        """Raw coefficient of m(b -> a) in the flattening."""
        if 2 * a == self.n:
            return self.c_half[b]
        return self.c[b]

    def values(self) -> dict:
        return {b: fx.to_mpf(x, self.frac_bits) for b, x in self.c.items()}

    @cached_property
    def limb_tables(self) -> tuple[np.ndarray, np.ndarray]:
        rows = self.n // 2 + 1
        full = [self.c.get(b, 0) for b in range(rows)]
        half = [self.c_half.get(b, 0) for b in range(rows)]
        return fx.encode(full, self.frac_bits), fx.encode(half, self.frac_bits)


def flattening_coefficients(beta: BetaVector) -> FlatteningCoefficients:
    n, z = beta.n, beta.z
    prefix = [0]
    for x in z:
        prefix.append(prefix[-1] + x)
    c, c_half = {}, {}
    for b in range(2, (n - 2) // 2 + 1):
        outer, inner = n + 1 - 2 * b, n - 1 - 2 * b
        tail = prefix[n - b] - prefix[b + 1]  # z_{b+1} + ... + z_{n-b-1}
        num = z[b] * inner - tail
        c[b] = fx.round_div(2 * num, outer * inner)
        if n % 2 == 0:
            c_half[b] = fx.round_div(num, outer * inner)
    return FlatteningCoefficients(n, beta.frac_bits, c, c_half)


@dataclass(frozen=True, eq=False)
class PiVector:
    vector: SymmetricTriangleVector
    min_orbit: Orbit
    min_value: object

    @property
    def n(self) -> int:
        return self.vector.n


def _apply(beta: BetaVector, coeffs: FlatteningCoefficients, limbs: np.ndarray,
           b_lo: int, b_hi: int) -> None:
    if b_hi < b_lo:
        return
    full, half = coeffs.limb_tables
    kernels.apply_moves(beta.n, b_lo, b_hi, full, half, orbit_offsets(beta.n), limbs)


def _check_inputs(beta: BetaVector, coeffs: FlatteningCoefficients) -> None:
    if (beta.n, beta.frac_bits) != (coeffs.n, coeffs.frac_bits):
        raise ValueError("beta and coefficients come from different constructions")


def build_pi(beta: BetaVector, coeffs: FlatteningCoefficients, tol=None, check: bool = True) -> PiVector:
    """beta plus the scheduled moves.

    Raises NegativeEntryError if an entry falls below -tol, unless ``check`` is
    off, in which case the minimum is only recorded on the result.
    """
    _check_inputs(beta, coeffs)
    if tol is None:
        tol = mpmath.ldexp(1, -(beta.frac_bits // 2))
    limbs = np.array(beta.vector.limbs)
    _apply(beta, coeffs, limbs, 2, (beta.n - 2) // 2)
    vec = SymmetricTriangleVector(beta.n, beta.frac_bits, limbs)
    orbit, value = min_entry(vec)
    if check and value < -mpmath.mpf(tol):
        raise NegativeEntryError(orbit, value)
    return PiVector(vec, orbit, value)


def iter_flattening(beta: BetaVector, coeffs: FlatteningCoefficients):
    """Yield (b, limbs) for the partial sums pi^b, b = n//2 down to 2.

    The limb array is a live working buffer, unnormalized; copy it to keep it.
    """
    _check_inputs(beta, coeffs)
    n = beta.n
    limbs = np.array(beta.vector.limbs)
    for b in range(n // 2, 1, -1):
        _apply(beta, coeffs, limbs, b, min(b, (n - 2) // 2))
        yield b, limbs


def flattening_trace(beta: BetaVector, coeffs: FlatteningCoefficients) -> list[tuple[int, SymmetricTriangleVector]]:
    return [(b, SymmetricTriangleVector(beta.n, beta.frac_bits, limbs))
            for b, limbs in iter_flattening(beta, coeffs)]


@dataclass(frozen=True, eq=False)
class Construction:
    """Every stage of the pipeline for one n."""

    solution: RhoSolution
    table: PowerTable
    beta: BetaVector
    coeffs: FlatteningCoefficients
    pi: PiVector


def construct(n: int, ctx: PrecisionContext | None = None, check: bool = True) -> Construction:
    ctx = ctx or PrecisionContext()
    sol = solve_rho(n, ctx)
    table = power_table(sol)
    beta = build_beta(table)
    coeffs = flattening_coefficients(beta)
    pi = build_pi(beta, coeffs, ctx.tol, check)
    return Construction(sol, table, beta, coeffs, pi)
