"""Pure-numpy kernels; bit-identical to the numba path (integer adds only)."""
import numpy as np

from ..fixedpoint import LIMB_BITS


def _orbit_index(offsets, x, y, z):
    t = np.sort(np.stack([x, y, z], axis=-1), axis=-1)
    a, b, c = t[..., 0], t[..., 1], t[..., 2]
    w = np.where(a == c, 6, np.where((a == b) | (b == c), 2, 1))
    return offsets[a] + b - a, w


def beta_interior(n, powers, offsets, out):
    for a in range(1, n // 3 + 1):
        b = np.arange(a, (n - a) // 2 + 1)
        c = n - a - b
        k = offsets[a] + b - a
        out[k] = (powers[a] - powers[n - a] + powers[b] - powers[n - b]
                  + powers[c] - powers[n - c])


def apply_moves(n, b_lo, b_hi, coef, coef_half, offsets, out):
    for b in range(b_lo, b_hi + 1):
        a = np.arange(b + 1, n // 2 + 1)
        if not a.size:
            continue
        x = (b + 1) // 2
        y = a - b
        rows = np.where((2 * a == n)[:, None], coef_half[b], coef[b])
        terms = (
            (-1, 0, b, n - b),
            (1, x, b - x, n - b),
            (-1, x + y, b - x, n - b - y),
            (1, x + y, b, n - b - x - y),
            (-1, x, b + y, n - b - x - y),
            (1, 0, b + y, n - b - y),
        )
        for sign, t0, t1, t2 in terms:
            t0, t1, t2 = np.broadcast_arrays(t0, t1, t2, a)[:3]
            k, w = _orbit_index(offsets, t0, t1, t2)
            np.add.at(out, k, (sign * w)[:, None] * rows)


def row_sums(n, offsets, values, out):
    out[:] = 0
    for a in range(n // 3 + 1):
        b = np.arange(a, (n - a) // 2 + 1)
        c = n - a - b
        v = values[offsets[a] + b - a]
        # orbit sizes 6/3/1 put weights 2/1 on each coordinate slot; the
        # all-equal orbit hits its single row once
        size6 = (a != b) & (b != c)
        allsame = (b == c) & (b == a)
        w = np.where(size6, 2, 1)
        for col, t in enumerate((np.full_like(b, a), b, c)):
            wc = w if col == 0 else np.where(allsame, 0, w)
            np.add.at(out, t, wc[:, None] * v)


def normalize(values):
    mask = (1 << LIMB_BITS) - 1
    for j in range(values.shape[1] - 1):
        carry = values[:, j] >> LIMB_BITS
        values[:, j] &= mask
        values[:, j + 1] += carry


def argmin(values):
    keys = tuple(values[:, j] for j in range(values.shape[1]))
    return int(np.lexsort(keys)[0])
