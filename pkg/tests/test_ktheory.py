import random
from dataclasses import replace
from fractions import Fraction

import pytest

from iwasawa import checks
from iwasawa.characters import DirichletCharacter
from iwasawa.klseries import build_kl_series, lp_norm_at
from iwasawa.ktheory import (
    INF, KTheoryError, cohomology_csv, cohomology_table, fib_orders, fiber_ratio, global_h0_oracle,
    global_h0_order, h1_order_from_L, homotopy_csv, local_orders, local_orders_oracle,
    poitou_tate_consistency,
)
from iwasawa.padic import make_coeff_ring
from iwasawa.series import PowerSeries


def test_global_h0_examples_and_oracle():
    assert global_h0_order(5, 4) == 1
    assert global_h0_order(5, 20) == 2
    assert global_h0_order(5, 2) == 0
    with pytest.raises(KTheoryError):
        global_h0_order(5, 0)
    for p in (3, 5, 7, 11):
        for n in list(range(-30, 0)) + list(range(1, 31)):
            assert global_h0_order(p, n) == global_h0_oracle(p, n)


def test_local_orders_examples():
    assert local_orders(2, 4, 5) == (1, 1, 0)
    assert local_orders(7, 3, 5) == (0, 0, 0)
    assert local_orders(2, 1, 5)[2] == INF
    with pytest.raises(KTheoryError):
        local_orders(5, 3, 5)
    with pytest.raises(KTheoryError):
        local_orders(2, 0, 5)


def test_local_orders_oracle():
    out = checks.local_suite(random.Random(3), 200)
    assert out["failures"] == 0, out["examples"]
    assert local_orders(11, 10, 5) == local_orders_oracle(11, 10, 5)


def test_h1_from_norm():
    R = make_coeff_ring(5, 1, 20)
    one = PowerSeries.one(R, 4)
    assert h1_order_from_L(5, one, 4) == global_h0_order(5, 4)
    five = PowerSeries.from_ints(R, [25], 4)
    assert h1_order_from_L(5, five, 4) == 1 + 2


def test_fib_orders_table_p5_n4():
    R = make_coeff_ring(5, 1, 20)
    G = PowerSeries.from_ints(R, [5], 4)
    tab = cohomology_table(5, G, 4)
    hot = fib_orders(tab)
    assert hot.order(-9, "fib_kappa") == 1
    assert hot.order(-8, "fib_kappa") == 2
    assert fiber_ratio(hot) == Fraction(1, 5)
    rep = poitou_tate_consistency(tab, hot, Fraction(1, 5))
    assert rep["status"] == "PARTIAL"
    assert all(c["status"] != "FAIL" for c in rep["checks"])


def test_all_trivial_pass_and_fault_injection():
    R = make_coeff_ring(5, 1, 20)
    tab = cohomology_table(5, PowerSeries.one(R, 4), -3, sigma=[2, 7])
    tab.locals.pop(5)
    hot = fib_orders(tab)
    rep = poitou_tate_consistency(tab, hot, Fraction(1))
    assert rep["status"] == "PASS"
    bad = replace(tab, locals=dict(tab.locals))
    h0, h1, h2 = bad.locals[2]
    bad.locals[2] = (h0, h1 + 1, h2)  # planted factor p
    rep = poitou_tate_consistency(bad, hot, Fraction(1))
    assert rep["status"] == "FAIL" and rep["failures"] == ["local:l2"]
    rep = poitou_tate_consistency(tab, hot, Fraction(1, 5))
    assert rep["failures"] == ["global:fib_ratio"]


def test_ratio_matches_lp_norm():
    B = build_kl_series(DirichletCharacter.parse("5:2"), 7, N=20, M=8)
    n = 6
    hot = fib_orders(cohomology_table(7, B, n))
    assert fiber_ratio(hot) == lp_norm_at(B, n)
    assert [r[1] for r in fib_orders(cohomology_table(7, B, -6)).rows].count("fib_tr_p") == 2


def test_csv_header():
    R = make_coeff_ring(5, 1, 20)
    tab = cohomology_table(5, PowerSeries.one(R, 4), 4, sigma=[2])
    assert cohomology_csv(tab).splitlines()[0] == "degree,group-label,order-exponent"
    assert "fib_kappa" in homotopy_csv(fib_orders(tab))
