from dataclasses import replace
from fractions import Fraction

import pytest

from iwasawa.characters import DirichletCharacter, truncated_L_value
from iwasawa.klseries import (
    InsufficientTailPrecision, KLError, LevelTooSmall, NotTypeS, build_kl_series, compare_series,
    evaluate_branch, imc_closure, interpolation_ledger, lp_norm_at, lp_valuation_at,
    mu_lambda_invariants, verify_interpolation,
)
from iwasawa.series import PowerSeries

chi = DirichletCharacter.parse


@pytest.fixture(scope="module")
def b5():
    return build_kl_series(chi("8:0,1"), 5, N=20, M=8, strategy="interpolation")


def test_interpolation_matches_exact_values(b5):
    recs = verify_interpolation(b5, 3)
    assert all(r["ok"] and r["matched"] >= 20 for r in recs)
    # off-node points are independent checks of the interpolant
    recs = verify_interpolation(b5, 3, start=9)
    assert all(r["ok"] and not r["node"] and r["certified"] >= 5 for r in recs)


def test_stickelberger_matches_exact_values():
    B = build_kl_series(chi("7:2"), 5, N=20, M=8, strategy="stickelberger")
    recs = verify_interpolation(B, 3)
    assert all(r["ok"] and r["certified"] >= 2 for r in recs)


@pytest.mark.parametrize("p,text,sigma", [(5, "8:0,1", ()), (7, "5:2", ()), (5, "7:2", (3,))])
def test_strategies_agree(p, text, sigma):
    A = build_kl_series(chi(text), p, N=20, M=8, strategy="interpolation", sigma=sigma)
    B = build_kl_series(chi(text), p, N=20, M=8, strategy="stickelberger", sigma=sigma)
    ok, joint = compare_series(A, B)
    assert ok and min(joint) >= 1


def test_tampered_series_fails(b5):
    s = b5.series
    R = s.ring
    coeffs = list(s.coeffs)
    coeffs[0] = coeffs[0] + R.scalar(5 ** 19)
    bad = replace(b5, series=PowerSeries(R, coeffs, s.ledger, s.is_polynomial))
    recs = verify_interpolation(bad, 3)
    assert all(not r["ok"] and r["matched"] <= 19 for r in recs)


def test_insufficient_tail_precision(b5):
    with pytest.raises(InsufficientTailPrecision):
        verify_interpolation(b5, 2, start=40, min_digits=20)


def test_errors():
    with pytest.raises(NotTypeS):
        build_kl_series(chi("3:1"), 5)
    with pytest.raises(NotTypeS):
        build_kl_series(DirichletCharacter.trivial(1), 5)
    with pytest.raises(LevelTooSmall):
        build_kl_series(chi("8:0,1"), 5, N=20, M=8, strategy="stickelberger", level=1)
    with pytest.raises(KLError):
        build_kl_series(chi("8:0,1"), 5, strategy="nonsense")


def test_interpolation_ledger_shape():
    e = interpolation_ledger(5, 8, 20)
    assert len(e) == 8 and all(a >= b for a, b in zip(e, e[1:]))


def test_invariants_and_norm():
    B = build_kl_series(chi("5:2"), 7, N=20, M=8, strategy="interpolation")
    assert mu_lambda_invariants(B) == (0, 0)
    # exact oracle: |L(psi, 1-6)|_7 with the Euler factor at 7
    exact = truncated_L_value(chi("5:2"), 6, [7]).to_fraction()
    v = 0
    num, den = exact.numerator, exact.denominator
    while num % 7 == 0:
        num //= 7
        v += 1
    while den % 7 == 0:
        den //= 7
        v -= 1
    assert lp_norm_at(B, 6) == Fraction(1, 7 ** v)
    with pytest.raises(KLError):
        lp_norm_at(B, 5)


def test_imc_closure(b5):
    out = imc_closure(b5, [4, 8, 12])
    assert [r["n"] for r in out] == [4, 8, 12] and all(r["ok"] for r in out)


def test_evaluate_branch_node_certificate(b5):
    val, cert = evaluate_branch(b5, 4)
    assert cert == 20
    assert lp_valuation_at(b5, 4) == int(val.valuation())
