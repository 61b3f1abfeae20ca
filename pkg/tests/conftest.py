from functools import lru_cache

import mpmath
import pytest

from maxent_triangle.construction import construct
from maxent_triangle.precision import PrecisionContext


@lru_cache(maxsize=None)
def built(n: int, bits: int = 128):
    return construct(n, PrecisionContext(bits))


@pytest.fixture
def ctx():
    return PrecisionContext(128)


@pytest.fixture
def tol(ctx):
    return ctx.tol


@pytest.fixture(autouse=True)
def _mp_precision():
    # comparisons in tests run well above the working precision
    with mpmath.workprec(256):
        yield


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        parts = results[k]
        ok = all(p[1] for p in parts)
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}")
        for label, part_ok, detail in parts:
            terminalreporter.write_line(f"    {'PASS' if part_ok else 'FAIL'}  {label}: {detail}")
