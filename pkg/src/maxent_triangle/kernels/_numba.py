"""numba kernels over limb arrays; semantics mirror ``_numpy`` exactly."""
import numpy as np
from numba import njit

from ..fixedpoint import LIMB_BITS


@njit(cache=True, inline="always")
def _sort3(x, y, z):
    if x > y:
        x, y = y, x
    if y > z:
        y, z = z, y
    if x > y:
        x, y = y, x
    return x, y, z


@njit(cache=True)
def _add_s(out, offsets, x, y, z, sign, row):
    x, y, z = _sort3(x, y, z)
    if x == z:
        w = 6
    elif x == y or y == z:
        w = 2
    else:
        w = 1
    k = offsets[x] + y - x
    f = sign * w
    for j in range(out.shape[1]):
        out[k, j] += f * row[j]


@njit(cache=True)
def beta_interior(n, powers, offsets, out):
    K = powers.shape[1]
    for a in range(1, n // 3 + 1):
        for b in range(a, (n - a) // 2 + 1):
            c = n - a - b
            k = offsets[a] + b - a
            for j in range(K):
                out[k, j] = (powers[a, j] - powers[n - a, j] + powers[b, j]
                             - powers[n - b, j] + powers[c, j] - powers[n - c, j])


@njit(cache=True)
def apply_moves(n, b_lo, b_hi, coef, coef_half, offsets, out):
    for b in range(b_lo, b_hi + 1):
        x = (b + 1) // 2
        for a in range(b + 1, n // 2 + 1):
            row = coef_half[b] if 2 * a == n else coef[b]
            y = a - b
            _add_s(out, offsets, 0, b, n - b, -1, row)
            _add_s(out, offsets, x, b - x, n - b, 1, row)
            _add_s(out, offsets, x + y, b - x, n - b - y, -1, row)
            _add_s(out, offsets, x + y, b, n - b - x - y, 1, row)
            _add_s(out, offsets, x, b + y, n - b - x - y, -1, row)
            _add_s(out, offsets, 0, b + y, n - b - y, 1, row)


@njit(cache=True)
def row_sums(n, offsets, values, out):
    K = values.shape[1]
    out[:, :] = 0
    for a in range(n // 3 + 1):
        for b in range(a, (n - a) // 2 + 1):
            c = n - a - b
            k = offsets[a] + b - a
            if a == c:
                for j in range(K):
                    out[a, j] += values[k, j]
            elif a == b:
                for j in range(K):
                    out[a, j] += 2 * values[k, j]
                    out[c, j] += values[k, j]
            elif b == c:
                for j in range(K):
                    out[a, j] += values[k, j]
                    out[c, j] += 2 * values[k, j]
            else:
                for j in range(K):
                    out[a, j] += 2 * values[k, j]
                    out[b, j] += 2 * values[k, j]
                    out[c, j] += 2 * values[k, j]


@njit(cache=True)
def normalize(values):
    mask = (1 << LIMB_BITS) - 1
    K = values.shape[1]
    for i in range(values.shape[0]):
        for j in range(K - 1):
            carry = values[i, j] >> LIMB_BITS
            values[i, j] &= mask
            values[i, j + 1] += carry


@njit(cache=True)
def argmin(values):
    """Index of the smallest row of a normalized limb array (first on ties)."""
    K = values.shape[1]
    best = 0
    for i in range(1, values.shape[0]):
        for j in range(K - 1, -1, -1):
            if values[i, j] != values[best, j]:
                if values[i, j] < values[best, j]:
                    best = i
                break
    return best
