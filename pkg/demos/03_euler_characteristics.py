"""Gamma-Euler characteristics, twists and Bockstein cohomology of Lambda-modules.

For an elementary module M the valuation of ch(M) at u^n - 1 measures
#H^1 / #H^0 of the twist; the Bockstein complex computes the same number from
a free resolution, provided beta is semisimple.
"""

import json
import random
from pathlib import Path

from iwasawa.bockstein import PerfectComplex, bockstein_cohomology, bockstein_euler_char, three_way
from iwasawa.checks import ec_identity_case
from iwasawa.modules import ElementaryModule, characteristic_element, gamma_cohomology_orders
from iwasawa.padic import make_coeff_ring

p = 5
R = make_coeff_ring(p, 1, 30)
M = ElementaryModule.build(R, mus=[1], polys=[([-p, 1], 1), ([p, 0, 1], 1)])
print("M = Lambda/p + Lambda/(T-p) + Lambda/(T^2+p),  mu=%d lambda=%d" % (M.mu, M.lam))
print("ch(M) =", [int(c) if int(c) < R.modulus // 2 else int(c) - R.modulus
                  for c in characteristic_element(M, 6).coeffs])

for n in (-2, 2, 3, 4, 8):
    ok, (lhs, rhs) = ec_identity_case(M, n)
    h0, h1 = gamma_cohomology_orders(M, n)
    print("n=%2d  #H0=%-4s #H1=%-6s  v(ch(u^n-1))=%s  v(#H1)-v(#H0)=%s  %s"
          % (n, h0, h1, lhs, rhs, "OK" if ok else "MISMATCH"))

print("\nthree-way identity (Bockstein / group cohomology / evaluation):")
for n in (2, 3, 4):
    out = three_way(M, n)
    print("  n=%d  %s  %s  %s  ok=%s" % (n, out["bockstein"], out["group"], out["evaluation"], out["ok"]))

data = Path(__file__).resolve().parent / "data"
for name in ("complex_T_minus_p.json", "complex_T_squared.json"):
    X = PerfectComplex.from_json(json.loads((data / name).read_text()))
    res = bockstein_cohomology(X)
    print("\n%s: semisimple=%s  H_beta exponents=%s" % (name, res.semisimple, res.h_beta))
    if res.semisimple:
        print("  Bockstein Euler characteristic:", bockstein_euler_char(X))
