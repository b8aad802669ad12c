from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from iwasawa.padic import (
    AtLeast, NonUnitError, PadicError, cyclotomic_u, log_u, make_coeff_ring, teichmuller, vp,
)


def test_ring_degrees():
    assert make_coeff_ring(5, 1, 10).d == 1
    R = make_coeff_ring(5, 4, 10)
    assert R.d == 1
    assert R.zeta ** 4 == 1 and R.zeta ** 2 != 1
    R = make_coeff_ring(7, 4, 10)
    assert R.d == 2
    assert R.zeta ** 4 == 1 and R.zeta ** 2 == R.scalar(-1)


def test_ring_errors():
    for p, m in [(4, 1), (2, 1), (9, 1), (5, 10)]:
        with pytest.raises(PadicError):
            make_coeff_ring(p, m, 10)


def test_valuation_examples():
    R = make_coeff_ring(5, 1, 10)
    assert R.scalar(5).valuation() == 1
    assert R.scalar(6).valuation() == 0
    v = R.zero.valuation()
    assert isinstance(v, AtLeast) and v == 10


def test_teichmuller_examples():
    R = make_coeff_ring(5, 1, 10)
    assert teichmuller(R.scalar(1)) == 1
    assert teichmuller(R.scalar(4)) == R.scalar(-1)
    assert int(teichmuller(make_coeff_ring(5, 1, 2).scalar(2))) == 7
    with pytest.raises(NonUnitError):
        teichmuller(R.scalar(5))


def test_cyclotomic_u():
    assert int(cyclotomic_u(make_coeff_ring(5))) == 6
    assert int(cyclotomic_u(make_coeff_ring(7))) == 8
    assert (cyclotomic_u(make_coeff_ring(5)) - 1).valuation() == 1


def test_teichmuller_is_root_of_unity_unramified():
    R = make_coeff_ring(7, 8, 12)  # d = 2, q = 49
    x = R.scalar((3, 2))
    t = teichmuller(x)
    assert t ** (R.q - 1) == 1
    assert (t - x).valuation() >= 1


def test_log_u_oracle():
    # oracle: <x> = u^ell mod p^(k+1), checked by direct exponentiation
    p, k = 5, 8
    mod = p ** (k + 1)
    for x in [2, 3, 7, 11, 24, 1234]:
        ell = log_u(x, p, k)
        w = pow(x, p ** k, mod)
        assert pow(1 + p, ell, mod) == x * pow(w, -1, mod) % mod


units = st.integers(min_value=1, max_value=10 ** 12).filter(lambda x: x % 7)


@settings(max_examples=60, deadline=None)
@given(st.tuples(st.integers(0, 7 ** 10), st.integers(0, 7 ** 10)),
       st.tuples(st.integers(0, 7 ** 10), st.integers(0, 7 ** 10)),
       st.tuples(st.integers(0, 7 ** 10), st.integers(0, 7 ** 10)))
def test_ring_axioms_unramified(a, b, c):
    R = make_coeff_ring(7, 4, 10)
    x, y, z = R.scalar(a), R.scalar(b), R.scalar(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    if x.is_unit():
        assert x * x.inverse() == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10 ** 15), st.integers(1, 10 ** 15))
def test_valuation_multiplicative(a, b):
    R = make_coeff_ring(5, 1, 40)
    va, vb = vp(a, 5) if a % 5 == 0 else 0, vp(b, 5) if b % 5 == 0 else 0
    assert (R.scalar(a) * R.scalar(b)).valuation() == va + vb


def test_fraction_embedding():
    R = make_coeff_ring(5, 1, 10)
    x = R.scalar(Fraction(2, 3))
    assert x * 3 == 2
