"""Kubota-Leopoldt branch series for an even character.

Build the series G with G(u^n - 1) = L^Sigma(psi, 1 - n) for n = 0 mod p - 1
in two independent ways (interpolation of exact Bernoulli values and a
Stickelberger-type Riemann sum), compare them, and read off mu, lambda.
"""

from iwasawa.characters import DirichletCharacter, truncated_L_value
from iwasawa.klseries import (
    build_kl_series, compare_series, lp_norm_at, mu_lambda_invariants, verify_interpolation,
)

p = 5
psi = DirichletCharacter.parse("8:0,1")   # the even quadratic character of conductor 8
print("psi =", psi, " conductor", psi.conductor, " even:", psi.is_even())

A = build_kl_series(psi, p, N=30, M=12, strategy="interpolation")
print("\ninterpolation series, first coefficients and their precision (digits):")
for j in range(5):
    print("  c_%d = %s  (+O(%d^%d))" % (j, int(A.series.coeffs[j]), p, A.series.ledger[j]))

print("\nexact values against the series:")
for rec in verify_interpolation(A, 3) + verify_interpolation(A, 2, start=13):
    kind = "node" if rec["node"] else "off-node"
    print("  n = %3d  %-8s matched %2d digits (certified %2d)" % (rec["n"], kind, rec["matched"], rec["certified"]))

B = build_kl_series(psi, p, N=30, M=12, strategy="stickelberger")
ok, joint = compare_series(A, B)
print("\nstickelberger construction agrees within the joint ledger:", ok)
print("  joint ledger:", joint)

mu, lam = mu_lambda_invariants(A)
print("\nmu = %d, lambda = %d" % (mu, lam))
for n in (4, 8, 12):
    print("  |L_p(psi, u^%d - 1)|_%d = %s   exact L-value %s" % (
        n, p, lp_norm_at(A, n), truncated_L_value(psi, n, [p]).to_fraction()))
