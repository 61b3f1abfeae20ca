"""Run every identity and inequality of the construction for one n."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from . import analysis as an
from . import fixedpoint as fx
from . import kernels
from .construction import Construction, construct, iter_flattening
from .precision import PrecisionContext
from .triangle import is_rho_marginal, min_entry, orbit_offsets

PASS, FAIL, WITHIN_TOL, EXPECTED_FAIL, SKIPPED = "pass", "fail", "pass-within-tol", "expected-fail", "skipped"

# beta is entrywise non-negative exactly up to this n
BETA_NONNEG_MAX_N = 27

CHECK_NAMES = (
    "rho_bracket",
    "rho_residual",
    "beta_marginal",
    "beta_boundary_symmetry",
    "beta_interior_lower_bound",
    "beta_nonnegative",
    "beta_middle_negative",
    "moves_in_kernel",
    "coefficients_nonnegative",
    "coefficient_bound",
    "coefficient_bound_plain",
    "delta_closed_form",
    "delta_monotone",
    "delta_antisymmetry",
    "delta_upper_bound",
    "flattening_recursion",
    "pi_marginal",
    "pi_nonnegative",
    "pi_equals_beta",
    "pi_boundary_flat",
    "pi_boundary_value",
    "pi_boundary_short_form",
    "marginal_matches_maxent",
    "entropy_identity",
)


@dataclass
class Check:
    name: str
    status: str
    residual: str
    reference: str
    hard: bool = True

    @property
    def failed(self) -> bool:
        return self.hard and self.status == FAIL


@dataclass
class VerificationReport:
    n: int
    rho: str
    bits: int
    tol: str
    checks: list = field(default_factory=list)
    min_entry: dict = field(default_factory=dict)
    gamma: str = ""
    elapsed_ms: float = 0.0
    backend: str = kernels.BACKEND

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = c.status if c.hard or c.status in (PASS, SKIPPED) else f"{c.status} (informational)"
            out.append(f"{c.name}: {tag}  residual={c.residual}")
        return out


def _s(x) -> str:
    if x is None:
        return "-"
    return mpmath.nstr(mpmath.mpf(x), 6) if not isinstance(x, str) else x


def _viol(bad: list) -> str:
    if len(bad) <= 5:
        return str(bad)
    return f"{len(bad)} violations, b = {bad[0]}..{bad[-1]}"


def _tol_status(residual, tol) -> str:
    return PASS if residual <= tol else FAIL


def _nonneg_status(value, tol) -> str:
    if value >= 0:
        return PASS
    return WITHIN_TOL if value >= -tol else FAIL


def _moves_in_kernel(n: int) -> tuple[bool, int]:
    """Coordinate multisets of the +/- triples of every scheduled move agree."""
    bs, as_ = [], []
    for b in range(2, (n - 2) // 2 + 1):
        a = np.arange(b + 1, n // 2 + 1)
        bs.append(np.full_like(a, b))
        as_.append(a)
    if not bs:
        return True, 0
    b = np.concatenate(bs)
    a = np.concatenate(as_)
    x = (b + 1) // 2
    y = a - b
    plus = np.stack([x, b - x, n - b + 0 * a, x + y, b, n - b - x - y, 0 * a, b + y, n - b - y], axis=1)
    minus = np.stack([0 * a, b, n - b, x + y, b - x, n - b - y, x, b + y, n - b - x - y], axis=1)
    valid = (b >= x) & (n - b >= x + y) & (x >= 1) & (y >= 1)
    same = (np.sort(plus, axis=1) == np.sort(minus, axis=1)).all(axis=1)
    bad = int((~(same & valid)).sum())
    return bad == 0, len(a)


def _flattening_residual(c: Construction):
    """max_b max_{b<=a<=n-b} |pi^b_{0,a,n-a} - mean(z_b..z_{n-b})|, as float."""
    n, f = c.beta.n, c.beta.frac_bits
    z = c.beta.z
    worst = 0.0
    final = None
    for b, limbs in iter_flattening(c.beta, c.coeffs):
        width = n + 1 - 2 * b
        target = fx.encode([sum(z[b:n - b + 1])], f)[0]
        rows = limbs[b: n // 2 + 1] * width - target
        err = np.abs(fx.approx_float(rows, f)) / width
        worst = max(worst, float(err.max()))
        final = limbs
    if final is not None and not np.array_equal(fx.signs(final - c.pi.vector.limbs), np.zeros(len(final))):
        return float("inf")
    return worst


def verify(n: int, ctx: PrecisionContext | None = None) -> VerificationReport:
    ctx = ctx or PrecisionContext()
    with mpmath.workprec(ctx.work_bits + 32):
        return _verify(n, ctx)


def _verify(n: int, ctx: PrecisionContext) -> VerificationReport:
    tol = ctx.tol
    t0 = time.perf_counter()
    c = construct(n, ctx, check=False)
    sol, table, beta, coeffs, pi = c.solution, c.table, c.beta, c.coeffs, c.pi
    f = table.frac_bits
    slack = fx.to_fixed(tol, f)
    rho = sol.rho
    report = VerificationReport(n, fx.to_decimal(sol.rho_fixed, sol.work_bits), ctx.bits, _s(tol))
    add = report.checks.append

    ok = sol.lower_bound <= rho < 1
    add(Check("rho_bracket", PASS if ok else FAIL, _s(rho - sol.lower_bound), "n/(n+3) <= rho < 1"))
    add(Check("rho_residual", _tol_status(sol.residual, tol), _s(sol.residual), "mean of the geometric weights is n/3"))

    ok, res = is_rho_marginal(beta.vector, table, tol)
    add(Check("beta_marginal", PASS if ok else FAIL, _s(res), "beta has marginal n rho^a"))
    res = max(abs(beta.z[a] - beta.z[n - a]) for a in range(n + 1))
    add(Check("beta_boundary_symmetry", PASS if res == 0 else FAIL, _s(fx.to_mpf(res, f)),
              "boundary formula is symmetric under a -> n - a"))

    # interior orbits are rows with a >= 1
    offsets = orbit_offsets(n)
    start = int(offsets[1]) if n >= 3 else len(beta.vector.limbs)
    if start < len(beta.vector.limbs):
        xs = np.repeat(np.arange(1, n // 3 + 1), np.diff(offsets[1:]))
        bound = table.limbs[xs] - table.limbs[n - xs]
        gap = np.array(beta.vector.limbs[start:]) - bound
        sg = fx.signs(gap)
        add(Check("beta_interior_lower_bound", PASS if (sg > 0).all() else FAIL,
                  _s(float(fx.approx_float(gap, f).min())), "beta_xyz > rho^x - rho^(n-x) on the interior"))
    else:
        add(Check("beta_interior_lower_bound", SKIPPED, "-", "no interior orbits"))

    b_orbit, b_min = min_entry(beta.vector)
    status = _nonneg_status(b_min, tol)
    hard = True
    if n > BETA_NONNEG_MAX_N and status == FAIL:
        status, hard = EXPECTED_FAIL, False
    add(Check("beta_nonnegative", status, _s(b_min), f"beta >= 0 exactly for n <= {BETA_NONNEG_MAX_N}", hard))
    if n > BETA_NONNEG_MAX_N:
        mid = beta.vector[(0, n // 2, n - n // 2)]
        add(Check("beta_middle_negative", PASS if mid < 0 else FAIL, _s(mid),
                  f"beta_(0, n//2, n - n//2) < 0 for n > {BETA_NONNEG_MAX_N}"))
    else:
        add(Check("beta_middle_negative", SKIPPED, "-", f"only asserted for n > {BETA_NONNEG_MAX_N}"))

    ok, count = _moves_in_kernel(n)
    add(Check("moves_in_kernel", PASS if ok else FAIL, f"{count} moves", "each move has zero marginal"))

    deltas = an.delta_table(beta, table)
    if coeffs.c:
        bad = an.coefficient_sign_violations(coeffs, slack)
        add(Check("coefficients_nonnegative", PASS if not bad else FAIL, _viol(bad),
                  "flattening coefficients are non-negative", hard=False))
        bad = an.coefficient_bound_violations(coeffs, deltas, True, slack)
        add(Check("coefficient_bound", PASS if not bad else FAIL, _viol(bad),
                  "coefficient of every move m(b->a) <= delta_b / 2"))
        bad = an.coefficient_bound_violations(coeffs, deltas, False, slack)
        if not bad:
            status = PASS
        elif n % 2 == 0 and bad == [n // 2 - 1]:
            status = EXPECTED_FAIL
        else:
            status = FAIL
        add(Check("coefficient_bound_plain", status, _viol(bad),
                  "c_b <= delta_b / 2 (fails at b = n/2 - 1 for even n)", hard=False))
    else:
        for name in ("coefficients_nonnegative", "coefficient_bound", "coefficient_bound_plain"):
            add(Check(name, SKIPPED, "-", "empty flattening schedule (n <= 5)", hard=name == "coefficient_bound"))

    if n >= 3:
        res = deltas.closed_form_residual()
        add(Check("delta_closed_form", _tol_status(res, tol), _s(res), "closed form of z_b - z_(b+1), 1 <= b <= n-2"))
    else:
        add(Check("delta_closed_form", SKIPPED, "-", "needs n >= 3"))
    bad = deltas.monotone_violations(slack)
    add(Check("delta_monotone", PASS if not bad else FAIL, _viol(bad), "z_b - z_(b+1) non-increasing"))
    res = deltas.antisymmetry_residual()
    add(Check("delta_antisymmetry", PASS if res == 0 else FAIL, _s(res), "delta_(n-1-b) = -delta_b"))
    if n >= 3:
        bad = deltas.upper_bound_violations(table, slack=slack)
        add(Check("delta_upper_bound", PASS if not bad else FAIL, _viol(bad),
                  "2 delta_b <= rho^b - rho^(n-b) for 1 <= b <= n/3; breaks near b = n/3 once n >= 159",
                  hard=False))
    else:
        add(Check("delta_upper_bound", SKIPPED, "-", "needs n >= 3"))

    if n >= 4:
        res = _flattening_residual(c)
        add(Check("flattening_recursion", _tol_status(res, float(tol)), _s(res),
                  "partial sums average the boundary row"))
    else:
        add(Check("flattening_recursion", SKIPPED, "-", "needs n >= 4"))

    ok, res = is_rho_marginal(pi.vector, table, tol)
    add(Check("pi_marginal", PASS if ok else FAIL, _s(res), "pi has marginal n rho^a"))
    add(Check("pi_nonnegative", _nonneg_status(pi.min_value, tol), _s(pi.min_value), "pi >= 0 entrywise"))
    if n <= 5:
        add(Check("pi_equals_beta", PASS if pi.vector == beta.vector else FAIL, "0", "empty schedule for n <= 5"))
    else:
        add(Check("pi_equals_beta", SKIPPED, "-", "only for n <= 5"))

    if n >= 4:
        row = [pi.vector.raw_at((0, a, n - a)) for a in range(2, n // 2 + 1)]
        spread = fx.to_mpf(max(row) - min(row), f)
        add(Check("pi_boundary_flat", _tol_status(spread, tol), _s(spread), "pi_(0,a,n-a) constant for 2 <= a <= n-2"))
        value = fx.to_mpf(row[0], f)
        res = abs(value - an.flat_value(table))
        add(Check("pi_boundary_value", _tol_status(res, tol), _s(res),
                  "flat boundary value n (1 - 2 rho^n - rho^(n-1)) / (n-3)"))
        res = abs(value - an.flat_value_short_form(table))
        add(Check("pi_boundary_short_form", PASS if res <= tol else EXPECTED_FAIL, _s(res),
                  "n (1 - rho^n - rho^(n-1)/2) / (n-2); undercounts corner rows", hard=False))
    else:
        for name in ("pi_boundary_flat", "pi_boundary_value", "pi_boundary_short_form"):
            add(Check(name, SKIPPED, "-", "needs n >= 4", hard=name != "pi_boundary_short_form"))

    star = an.max_entropy_marginal(table)
    if pi.min_value >= -tol:
        _, got = an.normalize_pi(pi, table, tol)
        res = max(abs(a - b) for a, b in zip(got.probs, star.probs))
        add(Check("marginal_matches_maxent", _tol_status(res, tol), _s(res),
                  "normalized pi has the geometric max-entropy marginal"))
    else:
        add(Check("marginal_matches_maxent", FAIL, "pi negative", "normalized pi has the geometric max-entropy marginal"))
    with mpmath.workprec(f + 32):
        gamma = an.gamma_closed_form(table)
        res = abs(an.entropy(star) - gamma)
    report.gamma = mpmath.nstr(gamma, 30)
    add(Check("entropy_identity", _tol_status(res, tol), _s(res), "entropy = log(sum rho^i) - (n/3) log rho"))

    report.min_entry = {"orbit": list(pi.min_orbit.canonical), "value": fx.to_decimal(
        pi.vector.raw_at(pi.min_orbit.canonical), f)}
    report.elapsed_ms = round(1000 * (time.perf_counter() - t0), 3)
    assert tuple(ch.name for ch in report.checks) == CHECK_NAMES
    return report
