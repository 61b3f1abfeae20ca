import itertools

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from maxent_triangle.triangle import (Orbit, SymmetricTriangleVector, basis_s, canonicalize, dense_marginal,
                                      is_rho_marginal, iter_orbits, marginal, min_entry, num_orbits,
                                      orbit_index, triangle_points)

from conftest import built


@pytest.mark.parametrize("p, canon, size", [
    ((3, 1, 2), (1, 2, 3), 6),
    ((0, 0, 6), (0, 0, 6), 3),
    ((6, 0, 0), (0, 0, 6), 3),
    ((2, 2, 2), (2, 2, 2), 1),
])
def test_canonicalize(p, canon, size):
    assert canonicalize(p, 6) == Orbit(canon, size)


@pytest.mark.parametrize("p", [(1, 2, 2), (-1, 3, 4), (1, 2)])
def test_canonicalize_rejects(p):
    with pytest.raises(ValueError):
        canonicalize(p, 6)


@pytest.mark.parametrize("n", range(1, 40))
def test_orbit_partition(n):
    orbits = list(iter_orbits(n))
    assert len(orbits) == num_orbits(n)
    assert sum(o.orbit_size for o in orbits) == (n + 1) * (n + 2) // 2
    covered = sorted(p for o in orbits for p in o.points())
    assert covered == sorted(triangle_points(n))
    assert [orbit_index(o.canonical, n) for o in orbits] == list(range(len(orbits)))


def test_basis_s_examples():
    one = 1 << 128
    d = basis_s((1, 2, 3), 6).to_dense()
    assert {p for p, x in d.items() if x} == set(itertools.permutations((1, 2, 3)))
    assert all(d[p] == one for p in itertools.permutations((1, 2, 3)))
    d = basis_s((0, 0, 6), 6).to_dense()
    assert [d[p] for p in [(0, 0, 6), (0, 6, 0), (6, 0, 0)]] == [2 * one] * 3
    d = basis_s((2, 2, 2), 6).to_dense()
    assert d[(2, 2, 2)] == 6 * one
    assert sum(d.values()) == 6 * one


def _dense_s(p, n):
    """s(p) by summing e over all six permutations (reference)."""
    out = dict.fromkeys(triangle_points(n), 0)
    for q in itertools.permutations(p):
        out[q] += 1
    return out


@pytest.mark.parametrize("n", range(1, 13))
def test_marginal_of_s_is_twice_the_coordinate_counts(n):
    for o in iter_orbits(n):
        mu = [x >> 128 for x in marginal(basis_s(o.canonical, n)).raw]
        expected = [2 * o.canonical.count(i) for i in range(n + 1)]
        assert mu == expected
        assert basis_s(o.canonical, n).to_dense() == {k: v << 128 for k, v in _dense_s(o.canonical, n).items()}


def test_marginal_of_zero():
    assert set(marginal(SymmetricTriangleVector.zeros(7)).raw) == {0}


def _random_vector(n, seed):
    import random
    rng = random.Random(seed)
    return SymmetricTriangleVector.from_raw(n, [rng.randrange(-(1 << 140), 1 << 140) for _ in range(num_orbits(n))])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(0, 10**6), st.integers(0, 10**6), st.integers(-5, 5))
def test_marginal_is_linear(n, s1, s2, k):
    u, v = _random_vector(n, s1), _random_vector(n, s2)
    lhs = marginal(k * u + v).raw
    rhs = tuple(k * x + y for x, y in zip(marginal(u).raw, marginal(v).raw))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10**6))
def test_row_sums_agree_for_every_coordinate(n, seed):
    v = _random_vector(n, seed)
    dense = v.to_dense()
    rows = [dense_marginal(dense, n, axis) for axis in range(3)]
    assert rows[0] == rows[1] == rows[2] == list(marginal(v).raw)
    assert sum(rows[0]) * mpmath.ldexp(1, -128) == v.total_mass()


def test_is_rho_marginal_beta_pi_and_perturbed(tol):
    c = built(12)
    ok, res = is_rho_marginal(c.beta.vector, c.table, tol)
    assert ok and res <= tol
    ok, _ = is_rho_marginal(c.pi.vector, c.table, tol)
    assert ok
    bump = SymmetricTriangleVector.from_values(12, {(1, 3, 8): 1})
    ok, res = is_rho_marginal(c.beta.vector + bump, c.table, tol)
    assert not ok and res >= 1


def test_min_entry_examples(tol):
    c = built(30)
    orbit, value = min_entry(c.beta.vector)
    assert orbit.canonical == (0, 15, 15) and value < 0
    ones = SymmetricTriangleVector.from_values(9, [1] * num_orbits(9))
    orbit, value = min_entry(ones)
    assert orbit.canonical == (0, 0, 9) and value == 1
    _, value = min_entry(c.pi.vector)
    assert value >= -tol


def test_min_entry_ties_pick_lexicographically_least():
    v = SymmetricTriangleVector.from_values(6, {(1, 1, 4): -2, (0, 3, 3): -2, (2, 2, 2): -1})
    assert min_entry(v)[0].canonical == (0, 3, 3)


def test_vector_is_read_only_and_exact():
    v = SymmetricTriangleVector.from_values(5, {(0, 1, 4): mpmath.mpf(1) / 3})
    with pytest.raises(ValueError):
        v.limbs[0, 0] = 1
    assert (v + v) - v == v
    assert v * 3 == v + v + v
