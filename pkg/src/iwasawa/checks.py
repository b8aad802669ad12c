"""Seeded property suites shared by the ``selftest`` command and the tests.

Every suite takes an explicit ``random.Random`` and returns a plain dict
``{"suite", "count", "failures", "examples"}``.  The dict has no timings,
so its JSON is reproducible byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .bockstein import PerfectComplex, bockstein_cohomology, resolution, three_way, two_term
from .characters import DirichletCharacter, is_type_S, truncated_L_value
from .ktheory import local_orders, local_orders_oracle
from .modules import (
    Infinite, characteristic_element, characters_of, component_order_bruteforce, eigenspace_decompose,
    finite_cohomology_orders, gamma_cohomology_orders, brute_force_orders, idempotent_matrix, p_exponent,
    pontryagin_dual, random_delta_module, random_elementary_module, random_finite_gamma_module,
    regular_representation, twist_module,
)
from .linalg import matmul
from .padic import AtLeast, cyclotomic_u, make_coeff_ring
from .series import PowerSeries, evaluate_at, twist_substitute, weierstrass_prep


def _report(name, count, failures):
    return {"suite": name, "count": count, "failures": len(failures), "examples": failures[:3]}


def _random_ring(rng, primes=(5, 7), N=30):
    p = rng.choice(primes)
    # d = 1 or an unramified quadratic extension
    m = 1 if rng.random() < 0.6 else (p + 1)
    return make_coeff_ring(p, m, N)


def ec_identity_case(M, n):
    """``d * v(ch(M)(u^n - 1)) == v_p(#H^1) - v_p(#H^0)``; both sides may be infinite."""
    R = M.ring
    ch = characteristic_element(M, 16)
    t = cyclotomic_u(R) ** n - 1
    v = evaluate_at(ch, t).valuation()
    h0, h1 = gamma_cohomology_orders(M, n)
    if h0 is Infinite or h1 is Infinite:
        return isinstance(v, AtLeast), (None, v)
    if isinstance(v, AtLeast):
        return False, (p_exponent(h1, R.p) - p_exponent(h0, R.p), v)
    lhs = R.d * int(v)
    rhs = p_exponent(h1, R.p) - p_exponent(h0, R.p)
    return lhs == rhs, (lhs, rhs)


def ec_identity_suite(rng: random.Random, count: int = 200, nmax: int = 8, primes=(5, 7)):
    fails = []
    for k in range(count):
        R = _random_ring(rng, primes)
        M = random_elementary_module(rng, R, max_lambda=8)
        n = rng.randint(-nmax, nmax)
        ok, data = ec_identity_case(M, n)
        if not ok:
            fails.append({"case": k, "module": str(M.pieces), "n": n, "data": str(data)})
    return _report("ec_identity", count, fails)


def twist_lemma_case(M, n, points):
    """``Tw(ch(M(n)))`` against ``ch(M)``: Weierstrass invariants and valuations at ``points``."""
    R = M.ring
    f = characteristic_element(M, 16)
    g = characteristic_element(twist_module(M, n), 16)
    tw = twist_substitute(g, cyclotomic_u(R) ** n)
    wf, wt = weierstrass_prep(f), weierstrass_prep(tw)
    if (wf.mu, wf.lam) != (wt.mu, wt.lam):
        return False
    for t in points:
        a, b = evaluate_at(f, t).valuation(), evaluate_at(tw, t).valuation()
        if int(a) != int(b):
            return False
    return True


def twist_lemma_suite(rng: random.Random, count: int = 100, primes=(5, 7)):
    fails = []
    for k in range(count):
        R = _random_ring(rng, primes)
        M = random_elementary_module(rng, R, max_lambda=6)
        n = rng.choice([x for x in range(-6, 7) if x])
        pts = [R.scalar(R.p ** rng.randint(1, 3) * rng.randint(1, R.p - 1)) for _ in range(3)]
        pts += [cyclotomic_u(R) ** rng.randint(1, 12) - 1 for _ in range(2)]
        if not twist_lemma_case(M, n, pts):
            fails.append({"case": k, "module": str(M.pieces), "n": n})
    return _report("twist_lemma", count, fails)


def duality_suite(rng: random.Random, count: int = 100, primes=(3, 5, 7)):
    """``#H^i(Gamma, A^vee) = #H_i(Gamma, A)``; the dual of ``A(-n)`` is ``A^vee(n)``."""
    fails = []
    for k in range(count):
        p = rng.choice(primes)
        A = random_finite_gamma_module(rng, p)
        n = rng.randint(-4, 4)
        ker_a, coker_a = finite_cohomology_orders(A, n)           # H^0 = H_1, H_0 of A(-n)
        ker_d, coker_d = finite_cohomology_orders(pontryagin_dual(A), -n)
        if (ker_d, coker_d) != (coker_a, ker_a):
            fails.append({"case": k, "p": p, "divisors": A.divisors, "n": n})
    return _report("dual_homology", count, fails)


def finite_oracle_suite(rng: random.Random, count: int = 30):
    """SNF kernel/cokernel orders against brute-force enumeration."""
    fails = []
    for k in range(count):
        p = rng.choice([3, 5])
        A = random_finite_gamma_module(rng, p, max_rank=2, max_exp=2)
        n = rng.randint(-3, 3)
        if finite_cohomology_orders(A, n) != brute_force_orders(A, n):
            fails.append({"case": k, "p": p, "divisors": A.divisors, "n": n})
    return _report("finite_oracle", count, fails)


def eigenspace_suite(rng: random.Random, orders=(2, 3, 4, 6), primes=(5, 7), random_count: int = 3):
    """Orthogonal idempotents and ``prod #A^psi = #A``, regular and random modules."""
    fails = []
    count = 0
    for p in primes:
        for m in orders:
            R = make_coeff_ring(p, m, 12)
            chars = characters_of(R, (m,))
            mods = [regular_representation(R, m, rng.randint(1, 3))]
            mods += [random_delta_module(rng, R, m) for _ in range(random_count)]
            for A in mods:
                count += 1
                k = len(A.divisors)
                Es = [idempotent_matrix(R, A.group_orders, A.actions, chi, k) for chi in chars]
                ok = True
                for i, Ei in enumerate(Es):
                    for j, Ej in enumerate(Es):
                        prod = matmul(Ei, Ej, R)
                        target = Ei if i == j else None
                        for a in range(k):
                            for b in range(k):
                                x = prod[a][b]
                                y = target[a][b] if target is not None else R.zero
                                # compare modulo the exponent of A
                                if not (x - y).with_prec(max(A.divisors)).is_zero():
                                    ok = False
                total = 1
                for chi in chars:
                    total *= eigenspace_decompose(A, chi).order
                if total != A.order:
                    ok = False
                if R.d == 1 and A.order <= 5 ** 6:
                    for chi in chars:
                        if component_order_bruteforce(A, chi) != eigenspace_decompose(A, chi).order:
                            ok = False
                if not ok:
                    fails.append({"p": p, "m": m, "divisors": A.divisors})
    return _report("eigenspaces", count, fails)


def local_suite(rng: random.Random, count: int = 200, primes=(3, 5, 7, 11)):
    """Local alternating product is one, and closed forms match the finite-level oracle."""
    fails = []
    small = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]
    for k in range(count):
        p = rng.choice(primes)
        l = rng.choice([x for x in small if x != p])
        kk = rng.choice([x for x in range(-24, 25) if x not in (0, 1)])
        h0, h1, h2 = local_orders(l, kk, p)
        if h0 + h2 - h1 != 0 or (h0, h1, h2) != local_orders_oracle(l, kk, p):
            fails.append({"p": p, "l": l, "k": kk})
    return _report("local_orders", count, fails)


def bockstein_suite(rng: random.Random, count: int = 100, primes=(5, 7)):
    fails = []
    for k in range(count):
        R = _random_ring(rng, primes)
        M = random_elementary_module(rng, R, max_lambda=6)
        n = rng.randint(-6, 6)
        out = three_way(M, n)
        if not out["ok"]:
            fails.append({"case": k, "module": str(M.pieces), "n": n})
    R = make_coeff_ring(5, 1, 30)
    T = PowerSeries.T(R, 8)
    if bockstein_cohomology(two_term(T * T)).semisimple is not False:
        fails.append({"case": "T^2", "expected": "not semisimple"})
    if bockstein_cohomology(two_term(T)).semisimple is not True:
        fails.append({"case": "T", "expected": "semisimple"})
    return _report("bockstein_three_way", count + 2, fails)


def acyclic_summand_suite(rng: random.Random, count: int = 50, primes=(5, 7)):
    """Adding ``[Lambda =-> Lambda]`` leaves every Bockstein order unchanged."""
    fails = []
    for k in range(count):
        R = _random_ring(rng, primes)
        M = random_elementary_module(rng, R, max_lambda=4, max_poly_pieces=2)
        X = resolution(M, 16)
        if not X.ranks:
            X = two_term(PowerSeries.T(R, 16))
        acyc = PerfectComplex(R, X.start, [1, 1], [[[PowerSeries.one(R, X.M)]]], X.M)
        c = cyclotomic_u(R) ** rng.randint(-4, 4)
        a = bockstein_cohomology(X, c)
        b = bockstein_cohomology(X.direct_sum(acyc), c)
        if (a.h_beta, a.homology, a.semisimple) != (b.h_beta, b.homology, b.semisimple):
            fails.append({"case": k})
    return _report("acyclic_summand", count, fails)


def bernoulli_suite(rng: random.Random, count: int = 40):
    """Vanishing by parity: ``B_{n,psi} = 0`` when ``psi(-1) != (-1)^n`` (n > 1)."""
    from .characters import characters_mod, generalized_bernoulli

    fails = []
    done = 0
    for f in (3, 4, 5, 7, 8):
        for chi in characters_mod(f):
            if chi.is_trivial():
                continue
            for n in range(2, 6):
                done += 1
                if chi.parity != (-1) ** n and not generalized_bernoulli(n, chi).is_zero():
                    fails.append({"chi": chi.notation(), "n": n})
    return _report("bernoulli_parity", done, fails)


def interpolation_suite(p: int, chars, N: int = 20, M: int = 8, K: int = 3):
    """Branch series against exact values, plus agreement of both constructions."""
    from .klseries import build_kl_series, compare_series, verify_interpolation

    fails = []
    count = 0
    for text in chars:
        psi = DirichletCharacter.parse(text)
        if not is_type_S(psi, p):
            continue
        A = build_kl_series(psi, p, N, M, strategy="interpolation")
        B = build_kl_series(psi, p, N, M, strategy="stickelberger")
        for rec in verify_interpolation(A, K) + verify_interpolation(A, 2, start=M + 1) + verify_interpolation(B, K):
            count += 1
            if not rec["ok"]:
                fails.append({"chi": text, "n": rec["n"]})
        count += 1
        if not compare_series(A, B)[0]:
            fails.append({"chi": text, "compare": False})
    return _report("kl_interpolation", count, fails)


def run_selftest(seed: int = 1, p: int = 5, scale: float = 1.0):
    """All suites at a reduced default size; returns the report dict."""
    rng = random.Random(seed)
    s = lambda n: max(1, int(n * scale))
    primes = (p,) if p in (5, 7) else (5, 7)
    suites = [
        ec_identity_suite(rng, s(40), primes=primes),
        twist_lemma_suite(rng, s(20), primes=primes),
        duality_suite(rng, s(40)),
        finite_oracle_suite(rng, s(15)),
        eigenspace_suite(rng, (2, 3, 4), primes=(p,) if p in (5, 7) else (5,), random_count=1),
        local_suite(rng, s(100)),
        bockstein_suite(rng, s(20), primes=primes),
        acyclic_summand_suite(rng, s(10), primes=primes),
        bernoulli_suite(rng),
        interpolation_suite(5, ["8:0,1", "7:2"], N=16, M=6),
    ]
    status = "PASS" if all(x["failures"] == 0 for x in suites) else "FAIL"
    return {"seed": seed, "p": p, "status": status, "suites": suites}
