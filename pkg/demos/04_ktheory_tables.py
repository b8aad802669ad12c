"""Order tables for the fibres of kappa and the trace.

The global rows are read off from H^0 and |L_p|_p; the local rows at l != p
come from closed forms (checked against a finite-level computation).  The
consistency report checks every finite alternating product.
"""

from iwasawa.characters import DirichletCharacter
from iwasawa.klseries import build_kl_series, lp_norm_at
from iwasawa.ktheory import (
    cohomology_csv, cohomology_table, fib_orders, fiber_ratio, homotopy_csv, poitou_tate_consistency,
)

p = 7
psi = DirichletCharacter.parse("5:2")
B = build_kl_series(psi, p, N=30, M=12)
for n in (6, -6):
    tab = cohomology_table(p, B, n, sigma=[2, 3])
    hot = fib_orders(tab)
    norm = lp_norm_at(B, n)
    print("n = %d:  |L_p|_p = %s   fibre ratio = %s" % (n, norm, fiber_ratio(hot)))
    print(cohomology_csv(tab))
    print(homotopy_csv(hot))
    rep = poitou_tate_consistency(tab, hot, norm)
    print("consistency:", rep["status"])
    for c in rep["checks"]:
        print("  ", c["position"], c["status"])
    print()
