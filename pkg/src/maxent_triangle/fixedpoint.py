"""Fixed-point reals stored as Python ints scaled by ``2**frac_bits``.

Bulk arrays split each scaled integer into int64 limbs of ``LIMB_BITS`` bits
so that the kernels only ever add and multiply by small integers.  Carries are
propagated lazily, which keeps every accumulation exact.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath.libmp import from_man_exp
import numpy as np

LIMB_BITS = 30
LIMB_MASK = (1 << LIMB_BITS) - 1


def n_limbs(frac_bits: int) -> int:
    # low limbs cover the fraction, the top (signed) limb carries the integer part
    return -(-frac_bits // LIMB_BITS) + 1


def round_div(num: int, den: int) -> int:
    """Nearest integer to ``num / den`` (ties toward +inf), ``den > 0``."""
    return (2 * num + den) // (2 * den)


def to_fixed(x, frac_bits: int) -> int:
    """Round an int, Fraction, float or mpf to the nearest multiple of 2**-frac_bits."""
    if isinstance(x, int):
        return x << frac_bits
    if isinstance(x, Fraction):
        return round_div(x.numerator << frac_bits, x.denominator)
    if isinstance(x, float):
        return to_fixed(Fraction(x), frac_bits)
    x = mpmath.mpf(x)
    if not x:
        return 0
    man, exp = x.man_exp
    shift = exp + frac_bits
    if shift >= 0:
        return man << shift
    return round_div(man, 1 << -shift)


def to_mpf(x: int, frac_bits: int):
    """Exact mpf for a fixed-point integer (no rounding to the global precision)."""
    return mpmath.mp.make_mpf(from_man_exp(x, -frac_bits))


def to_fraction(x: int, frac_bits: int) -> Fraction:
    return Fraction(x, 1 << frac_bits)


def decimal_digits(frac_bits: int) -> int:
    """Fraction digits sufficient for a decimal string to round-trip exactly."""
    return math.ceil(frac_bits * math.log10(2)) + 1


def to_decimal(x: int, frac_bits: int, digits: int | None = None) -> str:
    """Shortest-looking decimal string that parses back to the same ``x``."""
    if digits is None:
        digits = decimal_digits(frac_bits)
    q = round_div(abs(x) * 10**digits, 1 << frac_bits)
    ip, fp = divmod(q, 10**digits)
    sign = "-" if x < 0 and q else ""
    frac = str(fp).rjust(digits, "0").rstrip("0")
    return f"{sign}{ip}.{frac}" if frac else f"{sign}{ip}"


def from_decimal(s: str, frac_bits: int) -> int:
    return to_fixed(Fraction(s.strip()), frac_bits)


def encode(values, frac_bits: int) -> np.ndarray:
    """Split scaled integers into an ``(len(values), n_limbs)`` int64 array."""
    k = n_limbs(frac_bits)
    out = np.zeros((len(values), k), dtype=np.int64)
    top = LIMB_BITS * (k - 1)
    for row, x in enumerate(values):
        for j in range(k - 1):
            out[row, j] = (x >> (LIMB_BITS * j)) & LIMB_MASK
        hi = x >> top
        if not -(1 << 62) < hi < (1 << 62):
            raise OverflowError("value too large for fixed-point limbs")
        out[row, k - 1] = hi
    return out


def decode(limbs: np.ndarray) -> list[int]:
    """Inverse of :func:`encode`; accepts unnormalized (lazy-carry) limbs."""
    rows = np.atleast_2d(limbs).tolist()
    out = []
    for row in rows:
        x = 0
        for j in range(len(row) - 1, -1, -1):
            x = (x << LIMB_BITS) + row[j]
        out.append(x)
    return out


def approx_float(limbs: np.ndarray, frac_bits: int) -> np.ndarray:
    """float64 view of a limb array (for reporting, never for checks).

    Rows are carry-normalized and converted by magnitude so that small values
    stored with large cancelling limbs keep full relative accuracy.
    """
    from . import kernels

    work = np.array(np.atleast_2d(limbs), dtype=np.int64)
    kernels.normalize(work)
    sign = np.where(work[:, -1] < 0, -1, 1)
    work *= sign[:, None]
    kernels.normalize(work)
    weights = np.ldexp(1.0, LIMB_BITS * np.arange(work.shape[1]) - frac_bits)
    return sign * (work[:, ::-1].astype(np.float64) @ weights[::-1])


def signs(limbs: np.ndarray) -> np.ndarray:
    """Exact sign (-1, 0, 1) of each row of a limb array."""
    from . import kernels

    work = np.array(np.atleast_2d(limbs), dtype=np.int64)
    kernels.normalize(work)
    top = work[:, -1]
    low = work[:, :-1].any(axis=1)
    return np.where(top != 0, np.sign(top), low.astype(np.int64))
