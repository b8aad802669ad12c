import random

from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from iwasawa.linalg import (
    int_matrix, int_ring, inverse_mod, matmul, snf, subquotient_order_exponent, to_int_rows,
)
from iwasawa.padic import AtLeast, vp

p, N = 5, 12
R = int_ring(p, N)


def oracle_valuations(rows):
    """p-valuations of the integer invariant factors, capped at N (sympy SNF over Z)."""
    D = smith_normal_form(Matrix(rows), domain=ZZ)
    out = []
    for i in range(min(D.shape)):
        d = int(D[i, i])
        out.append(N if d == 0 else min(N, vp(abs(d), p) if d % p == 0 else 0))
    return sorted(out)


def ours(rows):
    res = snf(int_matrix(R, rows), R)
    return sorted(N if isinstance(v, AtLeast) else min(N, int(v)) for v in res.valuations)


def test_snf_examples():
    assert ours([[5, 10], [25, 3]]) == [0, 1]
    assert ours([[0, 0], [0, 0]]) == [N, N]
    assert ours([[25]]) == [2]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_snf_against_sympy(m, n, rnd):
    rows = [[rnd.choice([0, 1, 5, 25, 125]) * rnd.randint(-6, 6) for _ in range(n)] for _ in range(m)]
    assert ours(rows) == oracle_valuations(rows)


def test_snf_transforms():
    rng = random.Random(3)
    for _ in range(20):
        rows = [[rng.randrange(p ** 3) * rng.choice([1, 5]) for _ in range(3)] for _ in range(3)]
        A = int_matrix(R, rows)
        res = snf(A, R, transforms=True)
        D = matmul(matmul(res.U, A, R), res.V, R)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert D[i][j].is_zero()


def test_inverse_mod():
    A = [[2, 5], [3, 7]]
    inv = inverse_mod(A, p, 6)
    mod = p ** 6
    prod = [[sum(A[i][k] * inv[k][j] for k in range(2)) % mod for j in range(2)] for i in range(2)]
    assert prod == [[1, 0], [0, 1]]


def test_subquotient_order():
    # (Z/p^N)^2 spanned by e1, p e2 inside the span of e1, e2: index p
    big = int_matrix(R, [[1, 0], [0, 1]])
    small = int_matrix(R, [[1, 0], [0, 5]])
    assert subquotient_order_exponent(big, small, R) == 1
