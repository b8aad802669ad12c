"""Bockstein homomorphisms for perfect complexes over Lambda = O[[T]].

A complex is given in cohomological degrees ``a, a+1, ..., b`` by free
modules ``Lambda^{r_i}`` and differential matrices with power-series
entries.  After twisting by a one-dimensional character ``rho``
(``gamma -> c``, i.e. ``T -> c(1+T) - 1``) we reduce modulo ``T^2``:

    d = D0 + T D1  (mod T^2).

``d o d = 0`` gives ``D0 D0 = 0`` and ``D0 D1 + D1 D0 = 0``, so ``D1`` induces
the Bockstein ``beta: H^i(X/T) -> H^{i+1}(X/T)``; this is the connecting map
of ``0 -> X/T -> X/T^2 -> X/T -> 0``.  All groups are finitely generated
O-modules.  Their orders come from Smith normal forms over ``O/p^N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .linalg import (
    DEFAULT_MARGIN, hstack, identity, kernel_basis, matmul, snf, subquotient_order_exponent, zeros,
)
from .modules import (
    ElementaryModule, Infinite, MuPiece, PolyPiece, characteristic_element, gamma_cohomology_orders,
    p_exponent, piece_polynomial,
)
from .padic import AtLeast, PadicError, PadicScalar, cyclotomic_u
from .series import PowerSeries, evaluate_at, twist_substitute

INF = "inf"


class BocksteinError(PadicError):
    pass


class NotSemisimple(BocksteinError):
    pass


class InconsistentComplex(BocksteinError):
    pass


@dataclass
class PerfectComplex:
    ring: object
    start: int                 # cohomological degree of the first term
    ranks: List[int]
    diffs: List[list]          # diffs[i]: ranks[i+1] x ranks[i] matrix of PowerSeries
    M: int = 8

    def __post_init__(self):
        if len(self.diffs) != max(0, len(self.ranks) - 1):
            raise InconsistentComplex("need one differential between consecutive terms")
        for i, d in enumerate(self.diffs):
            if len(d) != self.ranks[i + 1] or any(len(row) != self.ranks[i] for row in d):
                raise InconsistentComplex("differential %d has the wrong shape" % i)
        check_d_squared(self)

    @property
    def degrees(self):
        return list(range(self.start, self.start + len(self.ranks)))

    def direct_sum(self, other: "PerfectComplex") -> "PerfectComplex":
        """Termwise direct sum; both complexes must start in the same degree."""
        if self.start != other.start or len(self.ranks) != len(other.ranks):
            raise InconsistentComplex("complexes must have the same degree range")
        R, M = self.ring, min(self.M, other.M)
        zero = PowerSeries.zero(R, M)
        diffs = []
        for i, (a, b) in enumerate(zip(self.diffs, other.diffs)):
            rows = [list(r) + [zero] * other.ranks[i] for r in a]
            rows += [[zero] * self.ranks[i] + list(r) for r in b]
            diffs.append(rows)
        return PerfectComplex(R, self.start, [x + y for x, y in zip(self.ranks, other.ranks)], diffs, M)

    def to_json(self):
        return {"start": self.start, "ranks": list(self.ranks), "M": self.M,
                "diffs": [[[f.to_dict() for f in row] for row in d] for d in self.diffs]}

    @classmethod
    def from_json(cls, obj, ring=None):
        diffs = [[[PowerSeries.from_dict(f) for f in row] for row in d] for d in obj["diffs"]]
        if ring is None:
            first = next((f for d in diffs for row in d for f in row), None)
            if first is None:
                raise InconsistentComplex("cannot infer the coefficient ring of an empty complex")
            ring = first.ring
        return cls(ring, int(obj.get("start", 0)), [int(r) for r in obj["ranks"]], diffs,
                   int(obj.get("M", 8)))


def _series_matmul(A, B, R, M):
    out = []
    for i in range(len(A)):
        row = []
        for j in range(len(B[0]) if B else 0):
            acc = PowerSeries.zero(R, M)
            for t in range(len(B)):
                acc = acc + A[i][t].truncate(M) * B[t][j].truncate(M)
            row.append(acc)
        out.append(row)
    return out


def _series_is_zero(f: PowerSeries) -> bool:
    for c, e in zip(f.coeffs, f.ledger):
        if e > 0 and not c.with_prec(min(e, c.prec)).is_zero():
            return False
    return True


def check_d_squared(X: PerfectComplex):
    for i in range(len(X.diffs) - 1):
        if not X.ranks[i] or not X.ranks[i + 2]:
            continue
        P = _series_matmul(X.diffs[i + 1], X.diffs[i], X.ring, X.M)
        if not all(_series_is_zero(f) for row in P for f in row):
            raise InconsistentComplex("d o d != 0 at precision (degrees %d -> %d)"
                                      % (X.start + i, X.start + i + 2))


def twist_complex(X: PerfectComplex, c) -> PerfectComplex:
    """``X(rho)`` with ``rho(gamma) = c``: every entry ``f(T) -> f(c(1+T) - 1)``."""
    R = X.ring
    c = R.scalar(c) if not isinstance(c, PadicScalar) else c
    if c == R.one:
        return X
    diffs = [[[twist_substitute(f, c) for f in row] for row in d] for d in X.diffs]
    return PerfectComplex(R, X.start, list(X.ranks), diffs, X.M)


@dataclass
class BocksteinResult:
    degrees: list
    homology: dict = field(default_factory=dict)     # degree -> p-exponent of #H^i(X/T) or INF
    beta: dict = field(default_factory=dict)         # degree -> matrix, in kernel coordinates
    h_beta: dict = field(default_factory=dict)       # degree -> p-exponent of #H^i_beta or INF
    semisimple: Optional[bool] = None
    twist_mode: str = "rho"
    c: object = None

    def to_json(self):
        def mat_json(Mx):
            return [[[str(x) for x in s.coords] for s in row] for row in Mx]

        return {"degrees": self.degrees,
                "homology": {str(k): v for k, v in self.homology.items()},
                "beta": {str(k): mat_json(v) for k, v in self.beta.items()},
                "h_beta": {str(k): v for k, v in self.h_beta.items()},
                "semisimple": self.semisimple, "twist_mode": self.twist_mode,
                "c": [str(x) for x in self.c.coords] if self.c is not None else None}


def _reduction(X: PerfectComplex):
    """``(D0, D1)`` lists and the working ring (precision = smallest ledger used)."""
    R = X.ring
    N = R.N
    for d in X.diffs:
        for row in d:
            for f in row:
                N = min(N, f.ledger[0], f.ledger[1] if f.M > 1 else R.N)
    Rw = R.at_precision(N) if N < R.N else R
    D0, D1 = [], []
    for d in X.diffs:
        D0.append([[Rw.scalar(f.coefficient(0).coords) for f in row] for row in d])
        D1.append([[Rw.scalar(f.coefficient(1).coords) if f.M > 1 else Rw.zero for f in row] for row in d])
    return Rw, D0, D1


def _preimage_lattice(C, vals, Rw, margin):
    """Basis (columns) of ``{y : (C y)_j in p^{v_j} O for j < r, (C y)_j = 0 for j >= r}``."""
    k = len(C[0]) if C else 0
    if k == 0:
        return []
    m = len(C)
    r = len(vals)
    aug = []
    for j in range(m):
        extra = [Rw.scalar(Rw.p ** vals[t]) if (t == j) else Rw.zero for t in range(r)]
        aug.append(list(C[j]) + extra)
    if m == 0:
        return identity(Rw, k)
    basis, _ = kernel_basis(aug, Rw, margin=margin)
    return [row for row in basis[:k]]


def _ncols(A):
    return len(A[0]) if A else 0


def bockstein_maps(X: PerfectComplex, c=None, twist_mode: str = "rho", margin: int = DEFAULT_MARGIN):
    return bockstein_cohomology(X, c, twist_mode, margin, _orders=False)


def bockstein_cohomology(X: PerfectComplex, c=None, twist_mode: str = "rho",
                         margin: int = DEFAULT_MARGIN, _orders: bool = True) -> BocksteinResult:
    """Bockstein complex ``(H^*(X(rho)/T), beta)`` and its cohomology orders.

    ``twist_mode="rho"`` twists by ``rho`` itself; ``"adjoint"`` twists by
    ``Ad(rho)``, which is trivial for a one-dimensional ``rho``.
    """
    R = X.ring
    if twist_mode not in ("rho", "adjoint"):
        raise BocksteinError("twist_mode must be 'rho' or 'adjoint'")
    c = R.one if c is None else (R.scalar(c) if not isinstance(c, PadicScalar) else c)
    ceff = c if twist_mode == "rho" else R.one
    Xt = twist_complex(X, ceff)
    Rw, D0, D1 = _reduction(Xt)
    q_exp = Rw.d
    n = len(X.ranks)
    degs = X.degrees
    res = BocksteinResult(degs, twist_mode=twist_mode, c=c)
    if n == 0:
        res.semisimple = True
        return res

    # kernels Z^i = ker D0^i and SNF data of the outgoing differentials
    K, snfs = [], []
    for i in range(n):
        if i < n - 1 and X.ranks[i] and X.ranks[i + 1]:
            basis, sres = kernel_basis(D0[i], Rw, margin=margin)
            K.append(basis)
            snfs.append(sres)
        else:
            K.append(identity(Rw, X.ranks[i]))
            snfs.append(None)
    finite_vals = []
    for i in range(n):
        s = snfs[i]
        finite_vals.append([v for v in s.valuations if not isinstance(v, AtLeast)] if s else [])

    # beta^i in kernel coordinates: Vinv_{i+1}[r:] . D1^i . K_i
    for i in range(n - 1):
        if not X.ranks[i] or not X.ranks[i + 1] or not _ncols(K[i]):
            res.beta[degs[i]] = []
            continue
        img = matmul(D1[i], K[i], Rw)
        s = snfs[i + 1]
        if s is None:
            coords = img
        else:
            r = len(finite_vals[i + 1])
            coords = matmul([row for row in s.Vinv[r:]], img, Rw) if s.Vinv[r:] else []
        res.beta[degs[i]] = coords
    res.beta[degs[-1]] = []

    # beta o beta = 0: D1 D1 Z^i must land in B^{i+2}
    for i in range(n - 2):
        if not (_ncols(K[i]) and X.ranks[i + 1] and X.ranks[i + 2]):
            continue
        w = matmul(D1[i + 1], matmul(D1[i], K[i], Rw), Rw)
        if not _in_image(w, D0[i + 1], snfs[i + 1], finite_vals[i + 1], Rw):
            raise InconsistentComplex("beta o beta != 0 at precision")

    if not _orders:
        return res

    semisimple = True
    for i in range(n):
        incoming = D0[i - 1] if i > 0 and X.ranks[i - 1] and X.ranks[i] else None
        Ki = K[i]
        # H^i(X/T) = Z^i / B^i
        if not _ncols(Ki):
            res.homology[degs[i]] = 0
        else:
            e = subquotient_order_exponent(Ki, incoming or [[] for _ in range(X.ranks[i])], Rw, margin)
            res.homology[degs[i]] = INF if e is None else q_exp * e
        # ker beta^i
        if not _ncols(Ki):
            res.h_beta[degs[i]] = 0
            continue
        s = snfs[i]
        if s is not None:
            C = matmul(s.U, matmul(D1[i], Ki, Rw), Rw)
            Y = _preimage_lattice(C, finite_vals[i], Rw, margin)
            kerb = matmul(Ki, Y, Rw) if _ncols(Y) else []
        else:
            kerb = Ki
        # im beta^{i-1} + B^i
        if incoming is not None:
            gens = incoming
            if _ncols(K[i - 1]):
                gens = hstack(matmul(D1[i - 1], K[i - 1], Rw), incoming)
        else:
            gens = [[] for _ in range(X.ranks[i])]
        if not _ncols(kerb):
            e = 0
        else:
            e = subquotient_order_exponent(kerb, gens, Rw, margin)
        if e is None:
            semisimple = False
            res.h_beta[degs[i]] = INF
        else:
            res.h_beta[degs[i]] = q_exp * e
    res.semisimple = semisimple
    return res


def _in_image(W, A, s, vals, Rw):
    """Do the columns of ``W`` lie in the column span of ``A``?"""
    if s is None:
        return all(x.is_zero() for row in W for x in row)
    C = matmul(s.U, W, Rw)
    for j, row in enumerate(C):
        for x in row:
            if j < len(vals):
                v = x.valuation()
                if not isinstance(v, AtLeast) and v < vals[j]:
                    return False
            elif not x.is_zero():
                return False
    return True


def bockstein_euler_char(X: PerfectComplex, c=None, twist_mode: str = "rho",
                         margin: int = DEFAULT_MARGIN) -> Fraction:
    """``prod_i #H^i_beta^{(-1)^{i+1}}``.

    With this sign the resolution ``[Lambda -f-> Lambda]`` in degrees -1, 0
    gives ``#H^0(Gamma, M) / #H^1(Gamma, M)``.
    """
    res = bockstein_cohomology(X, c, twist_mode, margin)
    if not res.semisimple:
        raise NotSemisimple("Bockstein cohomology is not finite")
    return _alternating(res, X.ring.p)


def _alternating(res: BocksteinResult, p: int) -> Fraction:
    e = 0
    for deg, x in res.h_beta.items():
        e += x if deg % 2 else -x
    return Fraction(p) ** e


# ---------------------------------------------------------------------------
# resolutions of elementary modules and the evaluation target


def resolution(M: ElementaryModule, trunc: int = 16) -> PerfectComplex:
    """Diagonal two-term resolution ``Lambda^k -> Lambda^k`` in degrees -1, 0."""
    R = M.ring
    entries = []
    for pc in M.pieces:
        if isinstance(pc, MuPiece):
            entries.append(PowerSeries.from_ints(R, [R.p ** pc.exponent], trunc))
        else:
            entries.append(PowerSeries.from_ints(R, list(piece_polynomial(R, pc)), trunc))
    k = len(entries)
    zero = PowerSeries.zero(R, trunc)
    diff = [[entries[i] if i == j else zero for j in range(k)] for i in range(k)]
    if k == 0:
        return PerfectComplex(R, -1, [], [], trunc)
    return PerfectComplex(R, -1, [k, k], [diff], trunc)


def two_term(f: PowerSeries) -> PerfectComplex:
    """``[Lambda -f-> Lambda]`` in degrees -1, 0."""
    return PerfectComplex(f.ring, -1, [1, 1], [[[f]]], f.M)


def _det_series(A, R, M):
    k = len(A)
    total = PowerSeries.zero(R, M)
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = PowerSeries.one(R, M)
        for i in range(k):
            term = term * A[i][perm[i]].truncate(M)
        total = total + term if sign > 0 else total - term
    return total


def evaluation_target(X: PerfectComplex, c=None, twist_mode: str = "rho") -> Fraction:
    """``|xi(rho)|_p^d`` for a square two-term complex.

    ``xi`` is the determinant of the twisted differential evaluated at
    ``T = 0``.  When it vanishes, the leading Taylor coefficient is used.
    """
    R = X.ring
    if len(X.ranks) == 0:
        return Fraction(1)
    if len(X.ranks) != 2 or X.ranks[0] != X.ranks[1]:
        raise BocksteinError("evaluation target needs a square two-term complex")
    c = R.one if c is None else c
    Xt = twist_complex(X, c if twist_mode == "rho" else R.one)
    det = _det_series(Xt.diffs[0], R, X.M)
    for j, (cf, e) in enumerate(zip(det.coeffs, det.ledger)):
        v = cf.valuation()
        if not isinstance(v, AtLeast) and v < e:
            return Fraction(1, R.p ** (R.d * int(v)))
    raise BocksteinError("determinant vanishes to the available precision")


def three_way(M: ElementaryModule, n: int, trunc: int = 16, margin: int = DEFAULT_MARGIN):
    """Bockstein, group-cohomology and evaluation sides for ``M`` twisted by ``c = u^n``."""
    R = M.ring
    X = resolution(M, trunc)
    c = cyclotomic_u(R) ** n
    res = bockstein_cohomology(X, c, "rho", margin)
    out = {"n": n, "semisimple": res.semisimple}
    out["bockstein"] = _alternating(res, R.p) if res.semisimple else None
    h0, h1 = gamma_cohomology_orders(M, n, margin)
    out["group"] = None if (h0 is Infinite or h1 is Infinite) else Fraction(h0, h1)
    ch = characteristic_element(M, trunc)
    val = evaluate_at(ch, c - 1)
    v = val.valuation()
    out["evaluation"] = None if isinstance(v, AtLeast) else Fraction(1, R.p ** (R.d * int(v)))
    vals = [out[k] for k in ("bockstein", "group", "evaluation")]
    out["ok"] = res.semisimple and None not in vals and len(set(vals)) == 1
    return out
