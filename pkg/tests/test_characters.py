import cmath
from fractions import Fraction

import pytest
import sympy
from sympy.ntheory import discrete_log, primitive_root

from iwasawa.characters import (
    CharacterError, DirichletCharacter, bernoulli_number, characters_mod, generalized_bernoulli,
    is_type_S, teichmuller_power, truncated_L_value,
)

chi = DirichletCharacter.parse


def to_complex(x):
    z = cmath.exp(2j * cmath.pi / x.m)
    return sum(complex(float(c)) * z ** j for j, c in enumerate(x.coeffs))


def oracle_bernoulli(n, f, e):
    """B_{n,psi} for the character of prime modulus f sending the least primitive root g to
    exp(2 pi i e/(f-1)); computed with sympy Bernoulli polynomials."""
    g = primitive_root(f)
    x = sympy.Symbol("x")
    Bn = sympy.bernoulli(n, x)
    total = 0
    for a in range(1, f):
        k = discrete_log(f, a, g)
        val = cmath.exp(2j * cmath.pi * e * k / (f - 1))
        total += val * float(Bn.subs(x, sympy.Rational(a, f)))
    return f ** (n - 1) * total


def test_spec_values():
    assert generalized_bernoulli(2, DirichletCharacter.trivial(1)) == Fraction(1, 6)
    assert generalized_bernoulli(1, chi("3:1")) == Fraction(-1, 3)
    assert generalized_bernoulli(2, chi("5:2")) == Fraction(4, 5)
    assert truncated_L_value(chi("5:2"), 2, [7]) == Fraction(-16, 5)
    # p | f: empty Euler product
    assert truncated_L_value(chi("5:2"), 2, [5]) == Fraction(-2, 5)


def test_bernoulli_numbers():
    for n in range(0, 30):
        expected = sympy.bernoulli(n) if n != 1 else sympy.Rational(-1, 2)
        assert bernoulli_number(n) == Fraction(int(expected.p), int(expected.q))


@pytest.mark.parametrize("f", [5, 7, 11, 13])
def test_generalized_bernoulli_oracle(f):
    for e in range(1, f - 1):
        psi = DirichletCharacter(f, (e,))
        for n in range(1, 7):
            ours = to_complex(generalized_bernoulli(n, psi))
            assert abs(ours - oracle_bernoulli(n, f, e)) < 1e-6 * (1 + abs(ours))


def test_type_S():
    assert not is_type_S(DirichletCharacter.trivial(1), 5)
    assert not is_type_S(chi("3:1"), 7)
    assert is_type_S(chi("5:2"), 7)
    assert not is_type_S(chi("7:2"), 3)  # order 3 divisible by p


def test_parse_and_notation():
    psi = chi("8:0,1")
    assert psi.notation() == "8:0,1"
    assert psi.is_even() and psi.conductor == 8
    with pytest.raises(CharacterError):
        chi("8:1")
    assert teichmuller_power(5, 2).notation() == "5:2"


def test_parity_vanishing():
    for f in (5, 7, 8, 12):
        for psi in characters_mod(f):
            if psi.is_trivial():
                continue
            for n in range(2, 6):
                if psi.parity != (-1) ** n:
                    assert generalized_bernoulli(n, psi).is_zero()


def test_irregular_pair_37():
    # 37 divides the numerator of B_32
    assert (bernoulli_number(32) / 32).numerator % 37 == 0
