import random
from fractions import Fraction

import pytest

from iwasawa import checks
from iwasawa.modules import (
    ElementaryModule, FiniteGammaModule, Infinite, ModuleError, NotFinite, brute_force_orders,
    characteristic_element, characters_of, eigenspace_decompose, euler_characteristic,
    finite_cohomology_orders, gamma_cohomology_orders, pontryagin_dual, random_finite_gamma_module,
    regular_representation, twist_module,
)
from iwasawa.padic import make_coeff_ring

p = 5
R = make_coeff_ring(p, 1, 20)


def test_characteristic_element_examples():
    ch = characteristic_element(ElementaryModule(R), 4)
    assert [int(c) for c in ch.coeffs] == [1, 0, 0, 0]
    M = ElementaryModule.build(R, [1], [([-p, 1], 1)])
    ch = characteristic_element(M, 4)
    assert [int(c) for c in ch.coeffs] == [R.modulus - p * p, p, 0, 0]


def test_gamma_orders_examples():
    assert gamma_cohomology_orders(ElementaryModule.build(R, [], [([0, 1], 1)]), 0) == (Infinite, Infinite)
    M = ElementaryModule.build(R, [], [([-p, 1], 1)])
    assert gamma_cohomology_orders(M, 0) == (1, p)
    assert gamma_cohomology_orders(M, 4) == (1, p)
    assert euler_characteristic(M, 0) == Fraction(p)
    with pytest.raises(NotFinite):
        euler_characteristic(ElementaryModule.build(R, [], [([0, 1], 1)]), 0)


def test_twist_zero_is_identity():
    M = ElementaryModule.build(R, [2], [([p, 0, 1], 2)])
    assert twist_module(M, 0) == M


def test_json_roundtrip():
    M = ElementaryModule.build(R, [1, 3], [([-p, 1], 2), ([p * p, p, 1], 1)])
    assert ElementaryModule.from_json(R, M.to_json()) == M


def test_not_distinguished_rejected():
    with pytest.raises(ModuleError):
        ElementaryModule.build(R, [], [([1, 1], 1)])


def test_finite_trivial_action_ec_one():
    A = FiniteGammaModule.make(p, (1, 2, 3), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert euler_characteristic(A, 0) == 1
    assert finite_cohomology_orders(A, 0) == (A.order, A.order)
    D = pontryagin_dual(A)
    assert D.divisors == A.divisors and D.action == A.action


def test_dual_is_involution():
    rng = random.Random(7)
    for _ in range(40):
        A = random_finite_gamma_module(rng, rng.choice([3, 5, 7]))
        DD = pontryagin_dual(pontryagin_dual(A))
        for n in range(-2, 3):
            assert finite_cohomology_orders(DD, n) == finite_cohomology_orders(A, n)


def test_snf_orders_against_enumeration():
    out = checks.finite_oracle_suite(random.Random(2), 40)
    assert out["failures"] == 0, out["examples"]


def test_eigenspaces_order_two():
    R2 = make_coeff_ring(p, 2, 10)
    A = regular_representation(R2, 2, 3)
    comps = [eigenspace_decompose(A, chi) for chi in characters_of(R2, (2,))]
    assert [c.divisors for c in comps] == [(3,), (3,)]
    triv = eigenspace_decompose(A, (R2.one,))
    assert triv.order * comps[1].order == A.order


def test_eigenspace_rejects_bad_character():
    R3 = make_coeff_ring(7, 3, 10)
    A = regular_representation(R3, 3, 1)
    with pytest.raises(ModuleError):
        eigenspace_decompose(A, (R3.scalar(2),))


def test_suites_small():
    rng = random.Random(5)
    for out in [checks.ec_identity_suite(rng, 30), checks.twist_lemma_suite(rng, 15),
                checks.duality_suite(rng, 30),
                checks.eigenspace_suite(rng, (2, 3), primes=(7,), random_count=1)]:
        assert out["failures"] == 0, out
