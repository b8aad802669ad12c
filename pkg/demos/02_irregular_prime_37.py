"""Lambda-invariants of the Teichmuller branches at the irregular prime 37.

37 divides the numerator of B_32, so exactly one even branch omega^i should
carry a zero of its p-adic L-function: lambda = 1 at i = 32, lambda = 0 elsewhere.
"""

import time

from iwasawa.characters import bernoulli_number, teichmuller_power
from iwasawa.klseries import build_kl_series, imc_closure, mu_lambda_invariants

p, N, M = 37, 25, 10
print("B_32/32 =", bernoulli_number(32) / 32)
print("37 | numerator:", (bernoulli_number(32) / 32).numerator % p == 0)

t0 = time.time()
for i in range(2, p - 1, 2):
    B = build_kl_series(teichmuller_power(p, i), p, N, M)
    mu, lam = mu_lambda_invariants(B)
    flag = "  <-- zero" if lam else ""
    print("omega^%-2d  mu=%d lambda=%d%s" % (i, mu, lam, flag))
    if lam:
        hit = B
print("scan took %.1fs" % (time.time() - t0))

# the module Lambda/(P) built from the distinguished factor has the matching
# Euler characteristics at the interpolation points
for row in imc_closure(hit, [36, 72, 108]):
    print(row)
