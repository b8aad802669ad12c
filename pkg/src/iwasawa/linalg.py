"""Smith-type reduction over the chain ring ``O/p^N``.

Matrices are lists of rows of :class:`PadicScalar`.  A matrix over ``O/p^N``
is treated as an approximation of a matrix over ``O``: pivots of valuation
``>= N`` are read as exact zeros (rank drop), pivots in
``[N - margin, N)`` cannot be certified and raise ``PrecisionExhausted``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .padic import AtLeast, CoeffRing, PadicError, PadicScalar, make_coeff_ring

DEFAULT_MARGIN = 5


class PrecisionExhausted(PadicError):
    pass


Matrix = List[List[PadicScalar]]


def mat(ring: CoeffRing, rows) -> Matrix:
    return [[x if isinstance(x, PadicScalar) else ring.scalar(x) for x in row] for row in rows]


def identity(ring: CoeffRing, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def zeros(ring: CoeffRing, m: int, n: int) -> Matrix:
    return [[ring.zero] * n for _ in range(m)]


def matmul(A: Matrix, B: Matrix, ring: Optional[CoeffRing] = None) -> Matrix:
    if not A or not B:
        if ring is None:
            raise ValueError("empty product needs an explicit ring")
        return [[ring.zero] * (len(B[0]) if B else 0) for _ in range(len(A))]
    R = ring or A[0][0].ring if A[0] else ring
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = R.zero
            for t in range(k):
                a = A[i][t]
                if not a.is_zero():
                    b = B[t][j]
                    if not b.is_zero():
                        acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def matvec(A: Matrix, x, ring: CoeffRing):
    return [sum((a * b for a, b in zip(row, x)), ring.zero) for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)] if A else []


def hstack(A: Matrix, B: Matrix) -> Matrix:
    return [list(a) + list(b) for a, b in zip(A, B)]


def is_zero_matrix(A: Matrix) -> bool:
    return all(x.is_zero() for row in A for x in row)


def _unit_part(x: PadicScalar, v: int) -> PadicScalar:
    return x.divide_by_p(v).with_prec(x.ring.N) if v else x


@dataclass
class SNFResult:
    """``U A V = D`` with ``D`` diagonal, ``D_ii = p^{valuations[i]}`` (or 0)."""

    valuations: list  # int, or AtLeast(N) for zero pivots
    rank: int
    U: Optional[Matrix] = None
    V: Optional[Matrix] = None
    Vinv: Optional[Matrix] = None
    Uinv: Optional[Matrix] = None

    def finite_valuations(self):
        return [v for v in self.valuations if not isinstance(v, AtLeast)]


def snf(A: Matrix, ring: CoeffRing, transforms: bool = False) -> SNFResult:
    """Diagonalize ``A`` (m x n) by unimodular row/column operations.

    Pivot choice: minimal valuation, ties broken by lowest row index, then
    lowest column index.  Pivots are normalized to exact powers of p.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    W = [list(r) for r in A]
    N = ring.N
    if transforms:
        U = identity(ring, m)
        Uinv = identity(ring, m)
        V = identity(ring, n)
        Vinv = identity(ring, n)
    vals = []
    rank = 0
    for k in range(min(m, n)):
        best = None
        for i in range(k, m):
            row = W[i]
            for j in range(k, n):
                x = row[j]
                if x.is_zero():
                    continue
                v = x.valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            vals.extend([AtLeast(N)] * (min(m, n) - k))
            break
        v, i, j = best
        # move pivot to (k, k)
        if i != k:
            W[i], W[k] = W[k], W[i]
            if transforms:
                U[i], U[k] = U[k], U[i]
                for r in Uinv:
                    r[i], r[k] = r[k], r[i]
        if j != k:
            for r in W:
                r[j], r[k] = r[k], r[j]
            if transforms:
                for r in V:
                    r[j], r[k] = r[k], r[j]
                Vinv[j], Vinv[k] = Vinv[k], Vinv[j]
        piv = W[k][k]
        uinv = _unit_part(piv, v).inverse()
        # normalize pivot row so that the pivot is exactly p^v
        W[k] = [x * uinv for x in W[k]]
        if transforms:
            U[k] = [x * uinv for x in U[k]]
            u = uinv.inverse()
            for r in Uinv:
                r[k] = r[k] * u
        pv = ring.scalar(ring.p ** v)
        # eliminate column k below and row k to the right
        for i2 in range(m):
            if i2 == k or W[i2][k].is_zero():
                continue
            f = W[i2][k].divide_by_p(v).with_prec(N)
            W[i2] = [a - f * b for a, b in zip(W[i2], W[k])]
            if transforms:
                U[i2] = [a - f * b for a, b in zip(U[i2], U[k])]
                for r in Uinv:
                    r[k] = r[k] + r[i2] * f
        for j2 in range(k + 1, n):
            if W[k][j2].is_zero():
                continue
            f = W[k][j2].divide_by_p(v).with_prec(N)
            for r in W:
                r[j2] = r[j2] - f * r[k]
            if transforms:
                for r in V:
                    r[j2] = r[j2] - f * r[k]
                Vinv[k] = [a + f * b for a, b in zip(Vinv[k], Vinv[j2])]
        W[k][k] = pv
        vals.append(v)
        rank += 1
    if transforms:
        return SNFResult(vals, rank, U, V, Vinv, Uinv)
    return SNFResult(vals, rank)


def certify(vals, N: int, margin: int = DEFAULT_MARGIN):
    """Split SNF valuations into finite ones and a count of zero pivots."""
    finite, zeros_ = [], 0
    for v in vals:
        if isinstance(v, AtLeast):
            zeros_ += 1
        elif v >= N - margin:
            raise PrecisionExhausted(
                "pivot of valuation %d too close to precision %d" % (v, N))
        else:
            finite.append(v)
    return finite, zeros_


def det_valuation(A: Matrix, ring: CoeffRing):
    """Valuation of ``det A`` (AtLeast(N) when singular at precision)."""
    res = snf(A, ring)
    if any(isinstance(v, AtLeast) for v in res.valuations):
        return AtLeast(ring.N)
    return sum(res.valuations)


def kernel_basis(A: Matrix, ring: CoeffRing, ncols: Optional[int] = None, margin=DEFAULT_MARGIN):
    """O-basis (as columns) of the kernel of ``A`` lifted to ``O``.

    Returns ``(basis, snf_result)`` where ``basis`` is ``n x k``.
    """
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return identity(ring, n), None
    res = snf(A, ring, transforms=True)
    finite, _ = certify(res.valuations, ring.N, margin)
    r = len(finite)
    basis = [row[r:] for row in res.V]
    return basis, res


def span_valuations(G: Matrix, ring: CoeffRing, margin=DEFAULT_MARGIN):
    """Certified elementary divisors (valuations) of the span of the columns of ``G``."""
    if not G or not G[0]:
        return []
    finite, _ = certify(snf(G, ring).valuations, ring.N, margin)
    return finite


def subquotient_order_exponent(big: Matrix, small: Matrix, ring: CoeffRing, margin=DEFAULT_MARGIN):
    """``log_q [span(big) : span(small)]`` for ``span(small) <= span(big)``.

    Returns ``None`` when the ranks differ (the subquotient is infinite).
    Columns are generators; both matrices have the same number of rows.
    """
    vb = span_valuations(big, ring, margin)
    vs = span_valuations(small, ring, margin)
    if len(vb) != len(vs):
        return None
    return sum(vs) - sum(vb)


# ---------------------------------------------------------------------------
# integer helpers (Z/p^K) used by finite-module code


def int_ring(p: int, K: int) -> CoeffRing:
    return make_coeff_ring(p, 1, K)


def int_matrix(ring: CoeffRing, rows) -> Matrix:
    return [[ring.scalar(int(x)) for x in row] for row in rows]


def to_int_rows(A: Matrix):
    return [[int(x.coords[0]) for x in row] for row in A]


def inverse_mod(A, p: int, K: int):
    """Inverse of an integer matrix modulo p^K (must be invertible mod p)."""
    R = int_ring(p, K)
    n = len(A)
    res = snf(int_matrix(R, A), R, transforms=True)
    if res.rank < n or any(v != 0 for v in res.valuations):
        raise PadicError("matrix not invertible mod p")
    # U A V = I  =>  A^{-1} = V U
    return to_int_rows(matmul(res.V, res.U, R))
