"""Kubota-Leopoldt power series for even characters over Q.

For an even character ``psi`` (order prime to p) we build ``G(T)`` in
``O_psi[[T]]`` with

    G(u^n - 1) = L^Sigma(psi, 1 - n)   for n = 0 mod (p - 1), n >= 1,

where ``L^Sigma`` has the Euler factors at the primes of ``Sigma`` removed
(default ``Sigma = {p}``).  Two independent constructions are provided.

``interpolation``
    Newton divided differences on the nodes ``x_k = u'^k - 1`` (``u' = u^{p-1}``,
    ``k = 1..M``).  The stored polynomial is the interpolant itself, so it
    reproduces the node values exactly; its coefficients agree with ``G``
    up to ``prod (T - x_k) * (integral series)``, which is what the ledger records.

``stickelberger``
    Regularized Bernoulli distribution ``E_{1,c}`` at level ``F_0 p^m``
    (``F_0 = lcm(f, p)``), twisted by ``psi omega^{-1}``, pushed forward along
    ``a -> log_u <a>`` and divided by ``1 - psi(c)(1+T)^{log_u <c>}``.  The
    result is exact modulo ``(1+T)^{p^m} - 1`` (suitably twisted).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

import numpy as np

from .characters import (
    DirichletCharacter, EmbeddingDenominator, is_type_S, truncated_L_value,
)
from .modules import ElementaryModule, MuPiece, PolyPiece, gamma_cohomology_orders, Infinite, p_exponent
from .padic import AtLeast, PadicError, PadicScalar, log_u, make_coeff_ring, primitive_root, vp
from .series import PowerSeries, evaluate_at, weierstrass_prep

LEVEL_BOUND = 2_000_000
STRATEGIES = ("interpolation", "stickelberger")


class KLError(PadicError):
    pass


class NotTypeS(KLError):
    pass


class PrecisionBudgetExceeded(KLError):
    pass


class LevelTooSmall(KLError):
    pass


class InsufficientTailPrecision(KLError):
    pass


class ZeroAtPrecision(KLError):
    pass


class VerificationFailed(KLError):
    pass


@dataclass(frozen=True)
class BranchSeries:
    psi: DirichletCharacter
    p: int
    series: PowerSeries
    strategy: str
    sigma: tuple = ()
    verification: tuple = ()
    node_ns: tuple = ()          # n at which the stored series is exact by construction
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def ring(self):
        return self.series.ring

    def with_verification(self, record) -> "BranchSeries":
        return replace(self, verification=tuple(record))


def branch_ring(psi: DirichletCharacter, p: int, N: int):
    return make_coeff_ring(p, psi.order, N)


def _vp_factorial(n, p):
    s, q = 0, p
    while q <= n:
        s += n // q
        q *= p
    return s


def interpolation_ledger(p: int, M: int, N: int):
    """``e_j = min(N, sum of the M - j smallest v(x_k))``, ``v(x_k) = 1 + v_p(k)``."""
    vs = sorted(1 + (vp(k, p) if k % p == 0 else 0) for k in range(1, M + 1))
    return [min(N, sum(vs[: M - j])) for j in range(M)]


def _exact_value(psi, p, n, sigma, ring):
    return truncated_L_value(psi, n, sigma).to_padic(ring)


def _build_interpolation(psi, p, N, M, sigma):
    loss = (M - 1) + _vp_factorial(M - 1, p)
    if loss >= N:
        raise PrecisionBudgetExceeded("Newton interpolation loses %d digits >= N = %d" % (loss, N))
    Nw = N + loss
    Rw = branch_ring(psi, p, Nw)
    R = branch_ring(psi, p, N)
    u1 = Rw.scalar(1 + p) ** (p - 1)
    X = [u1 ** k - 1 for k in range(1, M + 1)]
    c = [_exact_value(psi, p, k * (p - 1), sigma, Rw) for k in range(1, M + 1)]
    for j in range(1, M):
        for i in range(M - 1, j - 1, -1):
            diff = c[i] - c[i - 1]
            den = X[i] - X[i - j]
            v = int(den.valuation())
            try:
                c[i] = diff.divide_by_p(v) * den.divide_by_p(v).with_prec(Nw).inverse()
            except PadicError as exc:
                raise KLError("divided difference not integral: inconsistent data") from exc
    # Newton form -> monomial basis, sum_j c_j prod_{i<j} (T - X_i)
    coeffs = [Rw.zero] * M
    basis = [Rw.one] + [Rw.zero] * (M - 1)
    for j in range(M):
        for t in range(M):
            if not basis[t].is_zero():
                coeffs[t] = coeffs[t] + c[j] * basis[t]
        if j + 1 < M:
            nb = [Rw.zero] * M
            for t in range(M):
                if basis[t].is_zero():
                    continue
                if t + 1 < M:
                    nb[t + 1] = nb[t + 1] + basis[t]
                nb[t] = nb[t] - X[j] * basis[t]
            basis = nb
    prec_ok = min(x.prec for x in c)
    if prec_ok < N:
        raise PrecisionBudgetExceeded("working precision exhausted (%d < %d)" % (prec_ok, N))
    series = PowerSeries(R, [R.scalar(x.coords) for x in coeffs], interpolation_ledger(p, M, N), False)
    nodes = tuple(k * (p - 1) for k in range(1, M + 1))
    meta = {"working_precision": Nw, "nodes": "u^(k(p-1))-1, k=1..%d" % M}
    return series, nodes, meta


# ---------------------------------------------------------------------------
# Stickelberger construction


def default_level(F0: int, p: int, M: int, bound: int = LEVEL_BOUND) -> int:
    m = 0
    while F0 * p ** (m + 1) <= bound:
        m += 1
    if p ** m < M:
        raise LevelTooSmall("level bound %d gives p^m = %d < M = %d" % (bound, p ** m, M))
    return m


def _log_table(p: int, m: int):
    """``ell(r) in [0, p^m)`` with ``r = omega(r) u^ell`` for units ``r`` mod ``p^(m+1)``."""
    P = p ** (m + 1)
    L = p ** m
    u = 1 + p
    xs = np.empty(L, dtype=np.int64)
    x = 1
    for k in range(L):
        xs[k] = x
        x = x * u % P
    g = primitive_root(p)
    t = pow(g, p ** m, P)  # Teichmuller representative of g mod p^(m+1)
    zetas = np.array([pow(t, j, P) for j in range(p - 1)], dtype=np.int64)
    table = np.full(P, -1, dtype=np.int64)
    idx = (zetas[:, None] * xs[None, :]) % P
    table[idx] = np.broadcast_to(np.arange(L, dtype=np.int64), idx.shape)
    return table


def _choose_c(psi: DirichletCharacter, F0: int):
    prim = psi.primitive()
    for c in range(2, 10 * F0 + 10):
        if np.gcd(c, F0) == 1 and prim.value_exponent(c) not in (None, 0):
            return c
    raise KLError("no regularizing c found")


def _binomial_series(R, ell: int, M: int):
    """``(1+T)^ell`` mod ``T^M`` for a p-adic integer given by a representative."""
    out = []
    num = 1
    for j in range(M):
        out.append(R.scalar(Fraction(num, factorial(j))) if j else R.one)
        num *= (ell - j)
    return out


def _build_stickelberger(psi, p, N, M, sigma, level=None, level_bound=LEVEL_BOUND):
    R = branch_ring(psi, p, N)
    prim = psi.primitive()
    f = prim.modulus
    F0 = f * p // np.gcd(f, p)
    F0 = int(F0)
    m = default_level(F0, p, M, level_bound) if level is None else level
    if p ** m < M:
        raise LevelTooSmall("p^m = %d < M = %d" % (p ** m, M))
    Fm = F0 * p ** m
    L = p ** m
    c = _choose_c(psi, F0)
    cinv = pow(c, -1, Fm)

    a = np.arange(Fm, dtype=np.int64)
    unit = (np.gcd(a, Fm) == 1)
    a = a[unit]
    # 2 E_{1,c}(a) = 2 (a - c * (c^{-1} a mod F_m)) / F_m + (c - 1), an integer
    b = (cinv * a) % Fm
    twoE = 2 * ((a - c * b) // Fm) + (c - 1)
    # psi omega^{-1}(a): psi exponent (mod ord) and index of a mod p
    order = prim.order
    table = prim.value_table()
    kpsi = np.full(f, -1, dtype=np.int64)
    for r, k in table.items():
        kpsi[r] = k
    kk = kpsi[a % f]
    g = primitive_root(p)
    ind = np.zeros(p, dtype=np.int64)
    x = 1
    for j in range(p - 1):
        ind[x] = j
        x = x * g % p
    ii = ind[a % p]
    ell = _log_table(p, m)[a % p ** (m + 1)]
    if (ell < 0).any():
        raise KLError("log table incomplete")
    cls = kk * (p - 1) + ii
    ncls = order * (p - 1)
    S = np.bincount(cls * L + ell, weights=twoE.astype(np.float64), minlength=ncls * L)
    S = np.rint(S).astype(np.int64).reshape(ncls, L)
    # class value psi(a) omega(a)^{-1} = zeta_order^k * teich(g)^{-i}
    tg = R.scalar(g)
    from .padic import teichmuller
    tg = teichmuller(tg)
    tginv = tg.inverse()
    zeta = R.zeta ** (R.m // order) if order > 1 else R.one
    grouped = {}
    for k in range(order):
        zk = zeta ** k
        for i in range(p - 1):
            row = S[k * (p - 1) + i]
            if not row.any():
                continue
            val = zk * tginv ** i
            key = val.coords
            if key in grouped:
                grouped[key] = grouped[key] + row
            else:
                grouped[key] = row.copy()
    mod = R.modulus
    inv2 = pow(2, -1, mod)
    W = [np.zeros(L, dtype=object) for _ in range(R.d)]
    for key, row in grouped.items():
        obj = row.astype(object)
        for t in range(R.d):
            if key[t]:
                W[t] = W[t] + obj * (key[t] * inv2 % mod)
    W = [[int(x) % mod for x in w] for w in W]
    # H(T) = sum_ell W_ell (u^{-1}(1+T))^ell  mod T^M, by Horner in ell
    uinv = pow(1 + p, -1, mod)
    H = [[0] * M for _ in range(R.d)]
    for t in range(R.d):
        acc = [0] * M
        w = W[t]
        for l in range(L - 1, -1, -1):
            # acc <- acc * uinv * (1 + T) + w_l
            new = [0] * M
            for j in range(M):
                s = acc[j] + (acc[j - 1] if j else 0)
                new[j] = s * uinv % mod
            new[0] = (new[0] + w[l]) % mod
            acc = new
        H[t] = acc
    Hs = [R.scalar(tuple(H[t][j] for t in range(R.d))) for j in range(M)]
    # divide by the regularizer 1 - psi(c) (1+T)^{ell(c)}, and change sign
    K = N + _vp_factorial(M, p) + 2
    lc = log_u(c, p, K)
    Rk = make_coeff_ring(p, 1, K)
    binom = _binomial_series(Rk, lc, M)
    psic = prim.value_padic(c, R)
    reg = PowerSeries(R, [(R.one if j == 0 else R.zero) - psic * R.scalar(int(binom[j].coords[0]))
                          for j in range(M)], None, False)
    Hser = PowerSeries(R, Hs, None, False)
    G = -(Hser * reg.inverse())
    ledger = [min(N, m + 1)] + [min(N, m - _floor_log(j, p)) for j in range(1, M)]
    G = PowerSeries(R, G.coeffs, ledger, False)
    # extra Euler factors for primes of Sigma other than p
    for l in sorted(set(sigma) - {p}):
        if f % l == 0:
            continue
        G = G * _euler_series(prim, l, p, R, M)
    meta = {"level": m, "F_m": Fm, "regularizer_c": c}
    return G, (), meta


def _floor_log(j, p):
    k = 0
    while p ** (k + 1) <= j:
        k += 1
    return k


def _euler_series(prim, l, p, R, M):
    """``1 - psi(l) l^{-1} (1+T)^{log_u <l>}``: the factor ``1 - psi(l) l^{n-1}`` at ``T = u^n - 1``."""
    K = R.N + _vp_factorial(M, p) + 2
    ll = log_u(l, p, K)
    Rk = make_coeff_ring(p, 1, K)
    binom = _binomial_series(Rk, ll, M)
    c = prim.value_padic(l, R) * R.scalar(l).inverse()
    return PowerSeries(R, [(R.one if j == 0 else R.zero) - c * R.scalar(int(binom[j].coords[0]))
                           for j in range(M)], None, False)


def default_strategy(psi: DirichletCharacter, p: int) -> str:
    return "interpolation" if p <= 13 and psi.conductor <= 60 else "stickelberger"


def build_kl_series(psi: DirichletCharacter, p: int, N: int = 30, M: int = 16,
                    strategy: Optional[str] = None, sigma: Optional[Sequence[int]] = None,
                    level: Optional[int] = None, level_bound: int = LEVEL_BOUND) -> BranchSeries:
    if not is_type_S(psi, p):
        raise NotTypeS("%s is not of type S for p = %d" % (psi, p))
    strategy = strategy or default_strategy(psi, p)
    sigma = tuple(sorted(set(sigma or ()) | {p}))
    if strategy == "interpolation":
        series, nodes, meta = _build_interpolation(psi, p, N, M, sigma)
    elif strategy == "stickelberger":
        series, nodes, meta = _build_stickelberger(psi, p, N, M, sigma, level, level_bound)
    else:
        raise KLError("unknown strategy %r" % strategy)
    meta = dict(meta)
    meta["sigma"] = list(sigma)
    meta["normalization"] = "G(u^n-1) = L^Sigma(psi,1-n), n = 0 mod p-1, u = 1+p, B_1 = -1/2"
    return BranchSeries(psi, p, series, strategy, sigma, (), nodes, meta)


def evaluate_branch(B: BranchSeries, n: int):
    """``(value, certified_digits)`` of ``G(u^n - 1)``."""
    R = B.ring
    t = R.scalar(1 + B.p) ** n - 1
    val = evaluate_at(B.series, t)
    if n in B.node_ns:
        # the stored polynomial is the interpolant: exact at its nodes
        acc = R.zero
        for cf in reversed(B.series.coeffs):
            acc = acc * t + cf
        return acc.with_prec(R.N), R.N
    return val, val.prec


def _matched_digits(a: PadicScalar, b: PadicScalar) -> int:
    d = (a - b).with_prec(a.ring.N).valuation()
    return int(d)


def verify_interpolation(B: BranchSeries, K: int, min_digits: int = 1, start: int = 1):
    """Compare ``G(u^n - 1)`` with the exact value at ``n = k(p-1)``, ``k = start..start+K-1``.

    Each record is ``{"n", "matched", "certified", "node", "ok"}``; ``ok`` means
    the digits agree at least up to the certified precision.
    """
    if K < 1:
        raise KLError("K must be >= 1")
    R = B.ring
    out = []
    for k in range(start, start + K):
        n = k * (B.p - 1)
        val, cert = evaluate_branch(B, n)
        if cert < min_digits:
            raise InsufficientTailPrecision(
                "n = %d: only %d certified digits (need %d)" % (n, cert, min_digits))
        exact = truncated_L_value(B.psi, n, B.sigma).to_padic(R)
        matched = _matched_digits(val, exact)
        out.append({"n": n, "matched": min(matched, R.N), "certified": cert,
                    "node": n in B.node_ns, "ok": matched >= cert})
    return out


def verified(B: BranchSeries, K: int, **kw) -> BranchSeries:
    rec = verify_interpolation(B, K, **kw)
    return B.with_verification(rec)


def mu_lambda_invariants(B: BranchSeries):
    w = weierstrass_prep(B.series)
    return w.mu, w.lam


def lp_valuation_at(B: BranchSeries, n: int) -> int:
    val, cert = evaluate_branch(B, n)
    v = val.with_prec(cert).valuation()
    if isinstance(v, AtLeast):
        raise ZeroAtPrecision("L_p value at n = %d vanishes to the certified precision %d" % (n, cert))
    return int(v)


def lp_norm_at(B: BranchSeries, n: int) -> Fraction:
    """``|G(u^n - 1)|_p = p^{-v}``; n must be divisible by p - 1."""
    if n % (B.p - 1):
        raise KLError("n must be divisible by p - 1")
    return Fraction(1, B.p ** lp_valuation_at(B, n))


def compare_series(A: BranchSeries, B: BranchSeries):
    """Coefficientwise agreement within the joint ledger, plus the joint ledger."""
    M = min(A.series.M, B.series.M)
    joint = [min(a, b) for a, b in zip(A.series.ledger[:M], B.series.ledger[:M])]
    return A.series.agrees_with(B.series, M), joint


def imc_module(B: BranchSeries) -> ElementaryModule:
    """``Lambda/(p^mu) (+) Lambda/(P)`` with ``P`` the distinguished part of the series."""
    w = weierstrass_prep(B.series)
    pieces = []
    if w.mu:
        pieces.append(MuPiece(w.mu))
    if w.lam:
        P = w.distinguished
        pieces.append(PolyPiece(tuple(P.coeffs[: w.lam + 1]), 1))
    return ElementaryModule(B.ring, tuple(pieces))


def imc_closure(B: BranchSeries, ns: Sequence[int]):
    """Check ``d * v(G(u^n-1)) = v_p(#H^1) - v_p(#H^0)`` for the IMC-closure module."""
    M = imc_module(B)
    d = B.ring.d
    rows = []
    for n in ns:
        v = lp_valuation_at(B, n)
        h0, h1 = gamma_cohomology_orders(M, n)
        if h0 is Infinite:
            rows.append({"n": n, "v": v, "h0": "inf", "h1": "inf", "ok": False})
            continue
        e0, e1 = p_exponent(h0, B.p), p_exponent(h1, B.p)
        rows.append({"n": n, "v": v, "h0_exp": e0, "h1_exp": e1, "ok": d * v == e1 - e0})
    return rows
