"""Entropy, the geometric max-entropy marginal, and the inequality checks."""
from __future__ import annotations

from dataclasses import dataclass
import mpmath
import numpy as np

from . import fixedpoint as fx
from .construction import BetaVector, FlatteningCoefficients, NegativeEntryError, PiVector
from .precision import PowerTable, PrecisionContext, power_table, solve_rho
from .triangle import SymmetricTriangleVector, marginal_raw, min_entry


@dataclass(frozen=True)
class ProbabilityMarginal:
    n: int
    probs: tuple  # mpf
    bits: int = 160  # precision for derived quantities

    @property
    def total(self):
        with mpmath.workprec(self.bits):
            return mpmath.fsum(self.probs)

    @property
    def mean(self):
        with mpmath.workprec(self.bits):
            return mpmath.fsum(i * p for i, p in enumerate(self.probs))

    def as_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])


@dataclass(frozen=True)
class EntropyResult:
    n: int
    gamma: object  # nats
    rho: object
    gamma_closed_form: object = None

    @property
    def exp_gamma(self):
        return mpmath.exp(self.gamma)

    @property
    def gamma_bits(self):
        return self.gamma / mpmath.log(2)


def _prec(table: PowerTable) -> int:
    return table.frac_bits + 32


def max_entropy_marginal(table: PowerTable) -> ProbabilityMarginal:
    with mpmath.workprec(_prec(table)):
        total = fx.to_mpf(table.total, table.frac_bits)
        probs = tuple(fx.to_mpf(p, table.frac_bits) / total for p in table.fixed)
    return ProbabilityMarginal(table.n, probs, _prec(table))


def normalize_pi(pi, table: PowerTable, tol=None) -> tuple[SymmetricTriangleVector, ProbabilityMarginal]:
    """Rescale a rho-marginal vector to a probability distribution on T."""
    vec = pi.vector if isinstance(pi, PiVector) else pi
    if tol is None:
        tol = mpmath.ldexp(1, -(vec.frac_bits // 2))
    orbit, value = min_entry(vec)
    if value < -mpmath.mpf(tol):
        raise NegativeEntryError(orbit, value)
    n, f = vec.n, vec.frac_bits
    scale = n * table.total  # n * sum rho^i, in units of 2**-f
    raw = [fx.round_div(x << f, scale) for x in vec.raw()]
    out = SymmetricTriangleVector.from_raw(n, raw, f)
    with mpmath.workprec(_prec(table)):
        probs = tuple(fx.to_mpf(m, f) for m in marginal_raw(n, out.limbs))
    return out, ProbabilityMarginal(n, probs, _prec(table))


def entropy(dist) -> object:
    """Shannon entropy in nats, with 0 log 0 = 0.

    A ProbabilityMarginal is evaluated at its own precision; a plain sequence
    at the current mpmath precision.
    """
    if isinstance(dist, ProbabilityMarginal):
        probs, bits = dist.probs, dist.bits
    else:
        probs, bits = dist, mpmath.mp.prec
    with mpmath.workprec(bits):
        acc = mpmath.mpf(0)
        for p in probs:
            p = mpmath.mpf(p)
            if p < 0:
                raise ValueError("negative probability")
            if p == 0:
                continue
            acc -= p * mpmath.log(p)
    return acc


def gamma_closed_form(table: PowerTable):
    """log(sum rho^i) - (n/3) log rho."""
    with mpmath.workprec(_prec(table)):
        total = fx.to_mpf(table.total, table.frac_bits)
        return mpmath.log(total) - mpmath.mpf(table.n) / 3 * mpmath.log(table.rho)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def entropy_for_n(n: int, ctx: PrecisionContext | None = None) -> EntropyResult:
    table = power_table(solve_rho(n, ctx))
    with mpmath.workprec(_prec(table)):
        gamma = entropy(max_entropy_marginal(table))
    return EntropyResult(n, gamma, table.rho, gamma_closed_form(table))


def gamma_for_prime(p: int, ctx: PrecisionContext | None = None) -> EntropyResult:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return entropy_for_n(p - 1, ctx)


# boundary row after flattening

def _ratio(num: int, den: int, table: PowerTable):
    with mpmath.workprec(_prec(table)):
        return mpmath.mpf(num) / den


def flat_value(table: PowerTable):
    """Common boundary value of pi forced by the first row sum being n.

    The row (0, i, n - i) carries n rho^n at both corners and (n/2) rho^(n-1)
    next to them, leaving n - 3 equal entries.
    """
    n, P, f = table.n, table.fixed, table.frac_bits
    if n < 4:
        raise ValueError("flattened boundary needs n >= 4")
    one = 1 << f
    return _ratio(n * (one - 2 * P[n] - P[n - 1]), (n - 3) * one, table)


def flat_value_short_form(table: PowerTable):
    """n/(n-2) (1 - rho^n - rho^(n-1)/2).

    Counts each corner and next-to-corner entry once instead of twice, so it
    does not equal :func:`flat_value`; kept to report the gap.
    """
    n, P, f = table.n, table.fixed, table.frac_bits
    if n < 3:
        raise ValueError("needs n >= 3")
    one = 1 << f
    return _ratio(n * (2 * one - 2 * P[n] - P[n - 1]), 2 * (n - 2) * one, table)


# consecutive boundary differences

@dataclass(frozen=True)
class DeltaTable:
    n: int
    frac_bits: int
    deltas: tuple  # raw z_b - z_{b+1}, b = 0..n-1
    closed: tuple  # raw 2 * closed form of the same difference

    def delta(self, b: int):
        return fx.to_mpf(self.deltas[b], self.frac_bits)

    def closed_form_residual(self):
        """max over 1 <= b <= n-2 of |difference - closed form| (endpoints excluded)."""
        worst = max((abs(2 * self.deltas[b] - self.closed[b]) for b in range(1, self.n - 1)), default=0)
        return fx.to_mpf(worst, self.frac_bits) / 2

    def monotone_violations(self, slack: int = 0) -> list[int]:
        return [b for b in range(self.n - 1) if self.deltas[b] + slack < self.deltas[b + 1]]

    def antisymmetry_residual(self):
        worst = max((abs(self.deltas[b] + self.deltas[self.n - 1 - b]) for b in range(self.n)), default=0)
        return fx.to_mpf(worst, self.frac_bits)

    def upper_bound_violations(self, table: PowerTable, b_min: int = 1, slack: int = 0) -> list[int]:
        """b in [b_min, n/3] with 2 * delta_b > rho^b - rho^(n-b) (+ 2 * slack).

        The bound holds for every such b only up to n = 158; beyond that it
        breaks for b just below n/3.
        """
        P = table.fixed
        return [b for b in range(b_min, self.n // 3 + 1)
                if 2 * self.deltas[b] > P[b] - P[self.n - b] + 2 * slack]


def delta_table(beta: BetaVector, table: PowerTable) -> DeltaTable:
    n, z, P = beta.n, beta.z, table.fixed
    diffs = tuple(z[b] - z[b + 1] for b in range(n))
    closed = tuple((b + 1) * P[b] - b * P[b + 1] + (n - b - 1) * P[n - b] - (n - b) * P[n - b - 1]
                   for b in range(n))
    return DeltaTable(n, beta.frac_bits, diffs, closed)


def coefficient_bound_violations(coeffs: FlatteningCoefficients, deltas: DeltaTable,
                                 effective: bool = True, slack: int = 0) -> list[int]:
    """b with coefficient > delta_b / 2.

    With ``effective`` the largest coefficient actually attached to a move
    m(b -> a) is used (c_b / 2 when b = n/2 - 1 and n is even); otherwise c_b.
    For odd n the bound is an equality at b = (n-3)/2, hence ``slack``.
    """
    n = coeffs.n
    bad = []
    for b, cb in coeffs.c.items():
        if effective and n % 2 == 0 and b == n // 2 - 1:
            cb = coeffs.c_half[b]
        if 2 * cb > deltas.deltas[b] + 2 * slack:
            bad.append(b)
    return bad


def coefficient_sign_violations(coeffs: FlatteningCoefficients, slack: int = 0) -> list[int]:
    return [b for b, cb in coeffs.c.items() if cb < -slack]


# dominance of the geometric marginal

def _entropy_rows(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def sample_mean_constrained(n: int, size: int, rng: np.random.Generator,
                            center: np.ndarray | None = None) -> np.ndarray:
    """Random distributions on [0, n] with mean exactly n/3 (up to float rounding).

    Half are Dirichlet draws pulled to the target mean by mixing in a point
    mass at 0 or n; the rest are feasible perturbations of ``center`` along
    directions that keep total mass and mean fixed.
    """
    i = np.arange(n + 1, dtype=np.float64)
    target = n / 3
    out = np.empty((size, n + 1))
    k = size // 2 if center is not None else size
    alpha = rng.uniform(0.05, 3.0, size=(k, 1))
    p = rng.gamma(np.broadcast_to(alpha, (k, n + 1)))
    p /= p.sum(axis=1, keepdims=True)
    m = p @ i
    high = m > target
    t = np.where(high, target / np.where(high, m, 1), (n - target) / (n - m))
    p *= t[:, None]
    p[high, 0] += 1 - t[high]
    p[~high, n] += 1 - t[~high]
    out[:k] = p
    if center is not None:
        basis = np.stack([np.ones(n + 1), i])
        q, _ = np.linalg.qr(basis.T)
        d = rng.standard_normal((size - k, n + 1))
        d -= (d @ q) @ q.T
        # largest step keeping every entry non-negative, then a random fraction of it
        with np.errstate(divide="ignore"):
            limit = np.where(d < 0, center / -d, np.inf).min(axis=1)
        step = limit * rng.uniform(0, 1, size=size - k) ** 3
        out[k:] = np.clip(center + step[:, None] * d, 0, None)
    return out


def maxent_dominance_test(table: PowerTable, trials: int, seed: int,
                          slack: float = 1e-12) -> bool:
    """True iff every sampled mean-n/3 distribution has entropy <= gamma + slack."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    star = max_entropy_marginal(table)
    gamma = float(entropy(star))
    center = star.as_float()
    samples = sample_mean_constrained(table.n, trials, rng, center)
    means = samples @ np.arange(table.n + 1)
    if not np.allclose(samples.sum(axis=1), 1) or not np.allclose(means, table.n / 3):
        raise RuntimeError("sampler produced an infeasible distribution")
    return bool(np.all(_entropy_rows(samples) <= gamma + slack))
