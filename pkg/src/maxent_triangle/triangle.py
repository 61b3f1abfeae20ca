"""The triangle T = {(a, b, c) >= 0 : a + b + c = n} and symmetric vectors on it.

A symmetric vector is stored once per S3-orbit, keyed by the sorted triple
a <= b <= c.  Orbits are laid out in lexicographic order of (a, b), so the row
of orbit (a, b, c) is ``offsets[a] + b - a``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath
import numpy as np

from . import fixedpoint as fx
from . import kernels
from .precision import DEFAULT_BITS, PowerTable

TriplePoint = tuple  # (a, b, c) with a + b + c == n


@dataclass(frozen=True, order=True)
class Orbit:
    canonical: tuple
    orbit_size: int

    def points(self) -> list[tuple]:
        return sorted(set(itertools.permutations(self.canonical)))


def _orbit_size(a: int, b: int, c: int) -> int:
    if a == b == c:
        return 1
    if a == b or b == c or a == c:
        return 3
    return 6


def canonicalize(p: TriplePoint, n: int) -> Orbit:
    if len(p) != 3 or any(int(x) != x or x < 0 for x in p):
        raise ValueError(f"{p!r} is not a triple of non-negative integers")
    if sum(p) != n:
        raise ValueError(f"{p!r} does not sum to n={n}")
    t = tuple(sorted(int(x) for x in p))
    return Orbit(t, _orbit_size(*t))


@lru_cache(maxsize=64)
def orbit_offsets(n: int) -> np.ndarray:
    counts = [(n - a) // 2 - a + 1 for a in range(n // 3 + 1)]
    out = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=out[1:])
    out.flags.writeable = False
    return out


def num_orbits(n: int) -> int:
    return int(orbit_offsets(n)[-1])


def orbit_index(p: TriplePoint, n: int) -> int:
    a, b, _ = canonicalize(p, n).canonical
    return int(orbit_offsets(n)[a]) + b - a


def iter_orbits(n: int) -> Iterable[Orbit]:
    for a in range(n // 3 + 1):
        for b in range(a, (n - a) // 2 + 1):
            c = n - a - b
            yield Orbit((a, b, c), _orbit_size(a, b, c))


def triangle_points(n: int) -> Iterable[tuple]:
    for a in range(n + 1):
        for b in range(n - a + 1):
            yield (a, b, n - a - b)


class SymmetricTriangleVector:
    """S3-invariant fixed-point vector on T, one limb row per orbit.

    Values are exact multiples of ``2**-frac_bits``; the limb array is kept
    carry-normalized and read-only, so equality is exact.
    """

    __slots__ = ("n", "frac_bits", "limbs")

    def __init__(self, n: int, frac_bits: int, limbs: np.ndarray):
        if limbs.shape != (num_orbits(n), fx.n_limbs(frac_bits)):
            raise ValueError("limb array shape does not match n / frac_bits")
        limbs = np.array(limbs, dtype=np.int64, copy=True)
        kernels.normalize(limbs)
        limbs.flags.writeable = False
        self.n = n
        self.frac_bits = frac_bits
        self.limbs = limbs

    # construction
    @classmethod
    def zeros(cls, n: int, frac_bits: int = DEFAULT_BITS) -> "SymmetricTriangleVector":
        return cls(n, frac_bits, np.zeros((num_orbits(n), fx.n_limbs(frac_bits)), np.int64))

    @classmethod
    def from_raw(cls, n: int, raw: Iterable[int], frac_bits: int = DEFAULT_BITS):
        raw = list(raw)
        if len(raw) != num_orbits(n):
            raise ValueError("need one value per orbit")
        return cls(n, frac_bits, fx.encode(raw, frac_bits))

    @classmethod
    def from_values(cls, n: int, values, frac_bits: int = DEFAULT_BITS):
        """From a per-orbit sequence, or a mapping triple -> value (missing = 0).

        Mapping keys may be any permutation of an orbit, but a mapping must
        give one value per orbit.
        """
        raw = [0] * num_orbits(n)
        if isinstance(values, Mapping):
            for p, x in values.items():
                raw[orbit_index(p, n)] = fx.to_fixed(x, frac_bits)
        else:
            values = list(values)
            if len(values) != len(raw):
                raise ValueError("need one value per orbit")
            raw = [fx.to_fixed(x, frac_bits) for x in values]
        return cls.from_raw(n, raw, frac_bits)

    # access
    def raw(self) -> list[int]:
        return fx.decode(self.limbs)

    def raw_at(self, p: TriplePoint) -> int:
        return fx.decode(self.limbs[orbit_index(p, self.n)])[0]

    def __getitem__(self, p: TriplePoint):
        return fx.to_mpf(self.raw_at(p), self.frac_bits)

    def orbits(self) -> list[Orbit]:
        return list(iter_orbits(self.n))

    def items(self):
        """(Orbit, mpf value) pairs in lexicographic orbit order."""
        return [(o, fx.to_mpf(x, self.frac_bits)) for o, x in zip(iter_orbits(self.n), self.raw())]

    def to_float(self) -> np.ndarray:
        return fx.approx_float(self.limbs, self.frac_bits)

    def to_dense(self) -> dict:
        """Raw value at every point of T (6x redundant, for cross-checks)."""
        out = {}
        for o, x in zip(iter_orbits(self.n), self.raw()):
            for p in o.points():
                out[p] = x
        return out

    def total_mass(self):
        sizes = np.array([o.orbit_size for o in iter_orbits(self.n)], dtype=object)
        raw = sum(int(s) * x for s, x in zip(sizes, self.raw()))
        return fx.to_mpf(raw, self.frac_bits)

    # arithmetic (exact)
    def _check(self, other):
        if not isinstance(other, SymmetricTriangleVector):
            return NotImplemented
        if (other.n, other.frac_bits) != (self.n, self.frac_bits):
            raise ValueError("vectors live on different triangles or precisions")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SymmetricTriangleVector(self.n, self.frac_bits, self.limbs + other.limbs)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SymmetricTriangleVector(self.n, self.frac_bits, self.limbs - other.limbs)

    def __neg__(self):
        return SymmetricTriangleVector(self.n, self.frac_bits, -self.limbs)

    def __mul__(self, k):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        return SymmetricTriangleVector(self.n, self.frac_bits, self.limbs * int(k))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymmetricTriangleVector):
            return NotImplemented
        return (self.n, self.frac_bits) == (other.n, other.frac_bits) and bool(
            np.array_equal(self.limbs, other.limbs))

    def __repr__(self):
        return f"SymmetricTriangleVector(n={self.n}, orbits={len(self.limbs)}, frac_bits={self.frac_bits})"


@dataclass(frozen=True)
class MarginalVector:
    n: int
    frac_bits: int
    raw: tuple

    @property
    def entries(self) -> list:
        return [fx.to_mpf(x, self.frac_bits) for x in self.raw]

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.entries])

    def total(self):
        return fx.to_mpf(sum(self.raw), self.frac_bits)


def basis_s(p: TriplePoint, n: int, frac_bits: int = DEFAULT_BITS) -> SymmetricTriangleVector:
    """Sum of e over all six permutations of p (stacked on degenerate orbits)."""
    o = canonicalize(p, n)
    raw = [0] * num_orbits(n)
    raw[orbit_index(o.canonical, n)] = (6 // o.orbit_size) << frac_bits
    return SymmetricTriangleVector.from_raw(n, raw, frac_bits)


def marginal_raw(n: int, limbs: np.ndarray) -> list[int]:
    out = np.zeros((n + 1, limbs.shape[1]), dtype=np.int64)
    kernels.row_sums(n, orbit_offsets(n), limbs, out)
    return fx.decode(out)


def marginal(v: SymmetricTriangleVector) -> MarginalVector:
    return MarginalVector(v.n, v.frac_bits, tuple(marginal_raw(v.n, v.limbs)))


def dense_marginal(dense: Mapping, n: int, axis: int = 0) -> list:
    """Row sums of a full-T mapping along one coordinate (reference path)."""
    out = [0] * (n + 1)
    for p, x in dense.items():
        out[p[axis]] += x
    return out


def marginal_residual(v: SymmetricTriangleVector, table: PowerTable):
    """max_a |mu_a(v) - n rho**a| as an mpf."""
    if table.n != v.n or table.frac_bits != v.frac_bits:
        raise ValueError("power table does not match vector")
    mu = marginal_raw(v.n, v.limbs)
    worst = max(abs(m - v.n * p) for m, p in zip(mu, table.fixed))
    return fx.to_mpf(worst, v.frac_bits)


def is_rho_marginal(v: SymmetricTriangleVector, table: PowerTable, tol) -> tuple[bool, object]:
    res = marginal_residual(v, table)
    return bool(res <= mpmath.mpf(tol)), res


def min_entry(v: SymmetricTriangleVector) -> tuple[Orbit, object]:
    k = int(kernels.argmin(np.array(v.limbs)))
    o = next(itertools.islice(iter_orbits(v.n), k, None))
    return o, fx.to_mpf(fx.decode(v.limbs[k])[0], v.frac_bits)
