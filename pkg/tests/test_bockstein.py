import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from iwasawa import checks
from iwasawa.bockstein import (
    InconsistentComplex, PerfectComplex, bockstein_cohomology, bockstein_euler_char, evaluation_target,
    resolution, three_way, two_term,
)
from iwasawa.modules import ElementaryModule, euler_characteristic
from iwasawa.padic import cyclotomic_u, make_coeff_ring
from iwasawa.series import PowerSeries

p = 5
R = make_coeff_ring(p, 1, 30)
T = PowerSeries.T(R, 8)
DATA = Path(__file__).resolve().parents[1] / "demos" / "data"


def test_T_is_semisimple_with_finite_orders():
    res = bockstein_cohomology(two_term(T))
    assert res.semisimple is True
    assert all(v != "inf" for v in res.h_beta.values())
    # beta is a unit map: both Bockstein groups are trivial
    assert all(v == 0 for v in res.h_beta.values())


def test_T_squared_not_semisimple():
    assert bockstein_cohomology(two_term(T * T)).semisimple is False


def test_empty_complex():
    X = PerfectComplex(R, 0, [], [], 8)
    res = bockstein_cohomology(X)
    assert res.semisimple is True
    assert all(v == 0 for v in res.h_beta.values())
    assert bockstein_euler_char(X) == 1


def test_T_minus_p_three_way():
    M = ElementaryModule.build(R, [], [([-p, 1], 1)])
    X = resolution(M)
    ec = bockstein_euler_char(X)
    assert ec == Fraction(1, p) == evaluation_target(X)
    assert ec == 1 / euler_characteristic(M, 0)
    out = three_way(M, 0)
    assert out["ok"] and out["bockstein"] == out["group"] == out["evaluation"] == Fraction(1, p)


def test_unit_evaluation_gives_one():
    M = ElementaryModule.build(R, [], [([-p, 1], 1)])
    # at n = 1 the evaluation point u - 1 = p is the root of T - p
    assert not three_way(M, 1)["ok"]
    assert three_way(M, 2)["ok"]
    X = two_term(PowerSeries.from_ints(R, [1, 3], 8))
    assert bockstein_euler_char(X) == 1


def test_d_squared_checked():
    with pytest.raises(InconsistentComplex):
        PerfectComplex(R, -2, [1, 1, 1], [[[T]], [[T]]], 8)


def test_json_roundtrip_and_demo_files():
    for name in ("complex_T_minus_p.json", "complex_T_squared.json"):
        obj = json.loads((DATA / name).read_text())
        X = PerfectComplex.from_json(obj)
        Y = PerfectComplex.from_json(X.to_json())
        assert bockstein_cohomology(X).to_json() == bockstein_cohomology(Y).to_json()


def test_three_way_suite_small():
    out = checks.bockstein_suite(random.Random(9), 25)
    assert out["failures"] == 0, out["examples"]


def test_acyclic_invariance_small():
    out = checks.acyclic_summand_suite(random.Random(4), 15)
    assert out["failures"] == 0, out["examples"]
