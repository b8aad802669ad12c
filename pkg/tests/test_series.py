import random

import pytest
from hypothesis import given, settings, strategies as st

from iwasawa.padic import make_coeff_ring
from iwasawa.series import (
    AllZeroAtPrecision, InsufficientPrecision, NotDistinguished, PowerSeries, SeriesError, TruncationTooSmall, evaluate_at,
    series_from_roots, twist_substitute, weierstrass_divide, weierstrass_prep,
)

R = make_coeff_ring(5, 1, 20)
p = 5


def S(vals, M=8, poly=True):
    return PowerSeries.from_ints(R, vals, M, polynomial=poly)


def coeffs(f):
    return [int(c) for c in f.coeffs]


def test_prep_examples():
    w = weierstrass_prep(S([-p, 1]))
    assert (w.mu, w.lam) == (0, 1)
    assert coeffs(w.distinguished)[:2] == [R.modulus - p, 1]
    w = weierstrass_prep(S([p, p]))
    assert (w.mu, w.lam) == (1, 0)
    assert coeffs(w.unit)[:2] == [1, 1]
    f = S([p ** 3, -(p + p ** 2), 1])
    w = weierstrass_prep(f)
    assert (w.mu, w.lam) == (0, 2)
    assert w.distinguished.truncate(3).agrees_with(f.truncate(3))
    assert w.unit.agrees_with(PowerSeries.one(R, 8))


def test_prep_errors():
    with pytest.raises(AllZeroAtPrecision):
        weierstrass_prep(PowerSeries.zero(R, 8))
    # a coefficient known only to p^1 hides whether mu is 1 or 2
    f = PowerSeries(R, [R.zero, R.scalar(p ** 2)], [1, 20], False)
    with pytest.raises(InsufficientPrecision):
        weierstrass_prep(f)
    with pytest.raises(TruncationTooSmall):
        weierstrass_divide(S([1, 2, 3], M=3), S([p, p, 0, 1]))


def test_prep_recombines_on_random_series():
    rng = random.Random(11)
    for _ in range(40):
        M = rng.randint(6, 12)
        lam = rng.randint(0, M - 2)
        vals = [p * rng.randrange(p ** 6) for _ in range(lam)] + [rng.randrange(1, p)]
        vals += [rng.randrange(p ** 8) for _ in range(M - lam - 1)]
        f = PowerSeries.from_ints(R, vals, M, polynomial=False)
        w = weierstrass_prep(f)
        assert w.lam == lam
        assert w.recombine().agrees_with(f)


def test_division_examples():
    P = S([-p, 1])
    q, r = weierstrass_divide(P, P)
    assert coeffs(q)[0] == 1 and all(c.is_zero() for c in r.coeffs)
    q, r = weierstrass_divide(S([0, 0, 1]), P)
    assert coeffs(q)[:2] == [p, 1] and int(r.coeffs[0]) == p ** 2
    q, r = weierstrass_divide(S([1]), P)
    assert all(c.is_zero() for c in q.coeffs) and int(r.coeffs[0]) == 1
    with pytest.raises(NotDistinguished):
        weierstrass_divide(S([1, 1]), S([1, 1]))


def test_twist_examples():
    f = twist_substitute(S([0, 1]), 1 + p)
    assert coeffs(f)[:2] == [p, 1 + p]
    g = S([3, 1, 4, 1, 5])
    assert twist_substitute(g, 1) .agrees_with(g)
    with pytest.raises(SeriesError):
        twist_substitute(g, 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 5 ** 10), min_size=1, max_size=8),
       st.integers(1, 5 ** 6), st.integers(1, 5 ** 6))
def test_twist_composition(vals, a, b):
    c1, c2 = R.scalar(1 + p * a), R.scalar(1 + p * b)
    f = PowerSeries.from_ints(R, vals, 8)
    lhs = twist_substitute(twist_substitute(f, c1), c2)
    rhs = twist_substitute(f, c1 * c2)
    assert lhs.agrees_with(rhs)


def test_evaluate_examples():
    t = R.scalar(6) ** 4 - 1
    v = evaluate_at(S([0, 1]), t)
    assert int(v) == 1295 and v.valuation() == 1
    assert int(evaluate_at(S([7]), t)) == 7
    ones = PowerSeries.from_ints(R, [1, 1, 1, 1], 4, polynomial=False)
    v = evaluate_at(ones, R.scalar(p))
    assert v.prec == 4 and int(v) % p ** 4 == 1 + p + p ** 2 + p ** 3
    with pytest.raises(SeriesError):
        evaluate_at(ones, R.scalar(2))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=4), st.integers(1, 100))
def test_evaluate_polynomial_oracle(roots, t):
    # oracle: plain integer evaluation of prod (t - r)
    f = series_from_roots(R, roots, 8)
    tt = p * t
    exact = 1
    for r in roots:
        exact *= (tt - r)
    assert int(evaluate_at(f, R.scalar(tt))) == exact % R.modulus


def test_serialization_roundtrip():
    R2 = make_coeff_ring(7, 4, 9)
    f = PowerSeries(R2, [R2.scalar((3, 5)), R2.scalar((0, 7)), R2.zero], [9, 5, 3], False)
    g = PowerSeries.from_dict(f.to_dict())
    assert g.ring == f.ring and g.ledger == f.ledger and g.agrees_with(f)
    assert g.to_dict() == f.to_dict()
