"""Torsion Lambda-modules in elementary form, finite Gamma-modules and
Delta-eigenspaces.

Conventions
-----------
* ``M(n)`` is ``M`` with ``gamma`` acting through ``u^n`` times the original
  action.  Hence the cohomology of ``M(-n)`` is computed from multiplication
  by ``u^{-n}(1+T) - 1``.
* Orders are true cardinalities: a cyclic piece ``O/p^k`` has ``q^k``
  elements with ``q = p^d``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence, Union

from .linalg import (
    DEFAULT_MARGIN, PrecisionExhausted, certify, hstack, identity, int_matrix,
    int_ring, inverse_mod, matmul, snf, to_int_rows, zeros,
)
from .padic import AtLeast, CoeffRing, PadicError, PadicScalar, cyclotomic_u, make_coeff_ring
from .series import PowerSeries, TruncationTooSmall, twist_substitute

DEFAULT_M = 16


class ModuleError(PadicError):
    pass


class NotFinite(ModuleError):
    pass


class _Infinite:
    """Flag for an infinite cohomology group."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Infinite"

    def __str__(self):
        return "inf"


Infinite = _Infinite()


def p_exponent(order: int, p: int) -> int:
    k = 0
    while order % p == 0:
        order //= p
        k += 1
    if order != 1:
        raise ModuleError("not a p-power")
    return k


# ---------------------------------------------------------------------------
# elementary modules


@dataclass(frozen=True)
class MuPiece:
    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise ModuleError("mu exponent must be >= 1")


@dataclass(frozen=True)
class PolyPiece:
    """``Lambda/(f^mult)`` with ``f`` distinguished, coefficients low to high."""

    coeffs: tuple
    mult: int = 1

    def __post_init__(self):
        if self.mult < 1:
            raise ModuleError("multiplicity must be >= 1")
        if not self.coeffs or self.coeffs[-1] != 1:
            raise ModuleError("polynomial must be monic")
        if any(c.is_unit() for c in self.coeffs[:-1]):
            raise ModuleError("polynomial is not distinguished")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ElementaryModule:
    ring: CoeffRing
    pieces: tuple = ()

    @classmethod
    def build(cls, ring, mus=(), polys=()):
        """``polys`` is a sequence of ``(coeffs, mult)`` with integer/scalar coefficients."""
        pieces = [MuPiece(int(m)) for m in mus]
        for coeffs, mult in polys:
            pieces.append(PolyPiece(tuple(ring.scalar(c) for c in coeffs), int(mult)))
        return cls(ring, tuple(pieces))

    @property
    def mu(self) -> int:
        return sum(pc.exponent for pc in self.pieces if isinstance(pc, MuPiece))

    @property
    def lam(self) -> int:
        return sum(pc.degree * pc.mult for pc in self.pieces if isinstance(pc, PolyPiece))

    def __add__(self, other):
        if other.ring != self.ring:
            raise ModuleError("direct sum over different rings")
        return ElementaryModule(self.ring, self.pieces + other.pieces)

    # JSON description: {"mu": [...], "polys": [{"coeffs": [...], "mult": k}]}
    def to_json(self) -> dict:
        return {
            "mu": [pc.exponent for pc in self.pieces if isinstance(pc, MuPiece)],
            "polys": [
                {"coeffs": [str(_signed(c)) for c in pc.coeffs], "mult": pc.mult}
                for pc in self.pieces if isinstance(pc, PolyPiece)
            ],
        }

    @classmethod
    def from_json(cls, ring, data):
        if isinstance(data, str):
            data = json.loads(data)
        polys = [([int(c) for c in d["coeffs"]], int(d.get("mult", 1))) for d in data.get("polys", [])]
        return cls.build(ring, data.get("mu", []), polys)


def _signed(c: PadicScalar) -> int:
    if c.ring.d != 1:
        raise ModuleError("JSON export only for d = 1")
    x = c.coords[0]
    return x - c.ring.modulus if x > c.ring.modulus // 2 else x


def _poly_mul(ring, a, b):
    out = [ring.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_pow(ring, a, k):
    out = [ring.one]
    for _ in range(k):
        out = _poly_mul(ring, out, a)
    return out


def piece_polynomial(ring, pc: PolyPiece):
    return _poly_pow(ring, list(pc.coeffs), pc.mult)


def characteristic_element(M: ElementaryModule, trunc: int = DEFAULT_M) -> PowerSeries:
    """``p^{sum mu} * prod f^lambda`` as an exact polynomial series mod ``T^trunc``."""
    R = M.ring
    poly = [R.one]
    for pc in M.pieces:
        if isinstance(pc, PolyPiece):
            poly = _poly_mul(R, poly, piece_polynomial(R, pc))
    if len(poly) - 1 >= trunc:
        raise TruncationTooSmall("characteristic element of degree %d needs M > %d" % (len(poly) - 1, len(poly) - 1))
    scale = R.scalar(R.p ** M.mu)
    return PowerSeries.from_ints(R, [scale * c for c in poly], trunc)


def _twist_poly(ring, coeffs, n):
    """Monic normalization of ``f(u^{-n}(1+T) - 1)``."""
    u = cyclotomic_u(ring)
    c = u ** (-n) if n else ring.one
    f = PowerSeries.from_ints(ring, list(coeffs), len(coeffs))
    g = twist_substitute(f, c)
    lead = g.coeffs[-1]
    inv = lead.inverse()
    return tuple(x * inv for x in g.coeffs)


def twist_module(M: ElementaryModule, n: int) -> ElementaryModule:
    """``M(n)``: each ``f(T)`` becomes the distinguished part of ``f(u^{-n}(1+T)-1)``.

    The substituted polynomial is congruent to ``T^deg f`` mod p with unit
    leading coefficient, so its distinguished part is its monic normalization.
    """
    if n == 0:
        return M
    out = []
    for pc in M.pieces:
        if isinstance(pc, MuPiece):
            out.append(pc)
        else:
            out.append(PolyPiece(_twist_poly(M.ring, pc.coeffs, n), pc.mult))
    return ElementaryModule(M.ring, tuple(out))


def companion_matrix(ring, poly):
    """Matrix of multiplication by T on ``O[T]/(poly)`` in the basis 1, T, ..."""
    D = len(poly) - 1
    C = zeros(ring, D, D)
    for i in range(1, D):
        C[i][i - 1] = ring.one
    for i in range(D):
        C[i][D - 1] = -poly[i]
    return C


def gamma_operator(ring, poly, n):
    """Matrix of ``gamma - 1`` on ``(O[T]/(poly))(-n)``: ``a I + b C`` with ``a = u^{-n}-1, b = u^{-n}``."""
    u = cyclotomic_u(ring)
    b = u ** (-n) if n else ring.one
    a = b - 1
    C = companion_matrix(ring, poly)
    D = len(C)
    return [[(a if i == j else ring.zero) + b * C[i][j] for j in range(D)] for i in range(D)]


def gamma_cohomology_orders(M: ElementaryModule, n: int, margin: int = DEFAULT_MARGIN):
    """``(#H^0, #H^1)`` of ``Gamma`` acting on ``M(-n)``.

    Each order is an int (a power of p) or the ``Infinite`` flag.  Raises
    ``PrecisionExhausted`` when finiteness cannot be certified.
    """
    R = M.ring
    q = R.q
    h0_inf = False
    h1_exp = 0
    for pc in M.pieces:
        if isinstance(pc, MuPiece):
            # (O/p^mu)[[T]] / (T - t): gamma - 1 is injective, coker O/p^mu
            h1_exp += pc.exponent
            continue
        A = gamma_operator(R, piece_polynomial(R, pc), n)
        vals = snf(A, R).valuations
        if any(isinstance(v, AtLeast) for v in vals):
            h0_inf = True
            continue
        total = sum(vals)
        if total >= R.N - margin:
            raise PrecisionExhausted(
                "det valuation %d not certifiable at N=%d (margin %d)" % (total, R.N, margin))
        h1_exp += total
    if h0_inf:
        return Infinite, Infinite
    return 1, q ** h1_exp


# ---------------------------------------------------------------------------
# finite Gamma-modules over Z_p


@dataclass(frozen=True)
class FiniteGammaModule:
    """``A = (+) Z/p^{e_i}`` with ``gamma`` acting through an integer matrix."""

    p: int
    divisors: tuple
    action: tuple  # rows of ints, reduced mod p^E

    def __post_init__(self):
        k = len(self.divisors)
        if len(self.action) != k or any(len(r) != k for r in self.action):
            raise ModuleError("action matrix has wrong shape")
        E = self.exponent
        for i in range(k):
            for j in range(k):
                gap = self.divisors[i] - self.divisors[j]
                if gap > 0 and self.action[i][j] % (self.p ** gap):
                    raise ModuleError("action does not respect the divisor filtration")
        if k and E:
            R = int_ring(self.p, 1)
            if snf(int_matrix(R, self.action), R).rank < k:
                raise ModuleError("action is not invertible")

    @property
    def exponent(self) -> int:
        return max(self.divisors, default=0)

    @property
    def order(self) -> int:
        return self.p ** sum(self.divisors)

    @classmethod
    def make(cls, p, divisors, action):
        E = max(divisors, default=0)
        mod = p ** E if E else 1
        return cls(p, tuple(int(e) for e in divisors), tuple(tuple(int(x) % mod for x in r) for r in action))

    def twisted(self, n: int) -> "FiniteGammaModule":
        """``A(n)``: gamma acts through ``u^n`` times the original matrix."""
        if n == 0 or not self.divisors:
            return self
        mod = self.p ** self.exponent
        s = pow(1 + self.p, n, mod) if n > 0 else pow(pow(1 + self.p, -n, mod), -1, mod)
        return FiniteGammaModule.make(self.p, self.divisors, [[s * x for x in r] for r in self.action])

    def power(self, k: int) -> "FiniteGammaModule":
        mod = self.p ** self.exponent
        X = [[int(i == j) for j in range(len(self.divisors))] for i in range(len(self.divisors))]
        for _ in range(k):
            X = [[sum(a * b for a, b in zip(r, c)) % mod for c in zip(*self.action)] for r in X]
        return FiniteGammaModule.make(self.p, self.divisors, X)

    def gamma_minus_one(self):
        k = len(self.divisors)
        return [[self.action[i][j] - (i == j) for j in range(k)] for i in range(k)]


def endo_cokernel_order(p, divisors, op) -> int:
    """``#coker(op)`` on ``(+) Z/p^{e_i}`` via SNF of ``[op | D]``."""
    k = len(divisors)
    if k == 0:
        return 1
    E = max(divisors)
    R = int_ring(p, E + 1)
    rows = [list(op[i]) + [p ** divisors[i] if i == j else 0 for j in range(k)] for i in range(k)]
    vals = snf(int_matrix(R, rows), R).valuations
    return p ** sum(int(v) for v in vals)


def endo_kernel_order(p, divisors, op) -> int:
    """``#ker(op)`` on ``(+) Z/p^{e_i}``.

    The preimage lattice ``{x : op x in D Z^k}`` contains ``p^E Z^k``; modulo
    ``p^E`` it is the kernel of ``diag(p^{E-e_i}) op`` on ``(Z/p^E)^k``.
    """
    k = len(divisors)
    if k == 0:
        return 1
    E = max(divisors)
    if E == 0:
        return 1
    R = int_ring(p, E)
    rows = [[op[i][j] * p ** (E - divisors[i]) for j in range(k)] for i in range(k)]
    vals = snf(int_matrix(R, rows), R).valuations
    lat = sum(min(int(v), E) for v in vals)
    return p ** (lat - sum(E - e for e in divisors))


def finite_cohomology_orders(A: FiniteGammaModule, n: int = 0):
    """``(#H^0, #H^1) = (#ker, #coker)`` of ``gamma - 1`` on ``A(-n)``."""
    B = A.twisted(-n)
    op = B.gamma_minus_one()
    return endo_kernel_order(A.p, A.divisors, op), endo_cokernel_order(A.p, A.divisors, op)


def euler_characteristic(M, n: int = 0) -> Fraction:
    """``#H_0 / #H_1 = #coker(gamma-1) / #ker(gamma-1)`` on ``M(-n)``."""
    if isinstance(M, FiniteGammaModule):
        ker, coker = finite_cohomology_orders(M, n)
        return Fraction(coker, ker)
    h0, h1 = gamma_cohomology_orders(M, n)
    if h0 is Infinite or h1 is Infinite:
        raise NotFinite("Gamma-cohomology of M(-n) is infinite")
    return Fraction(h1, h0)


def pontryagin_dual(A: FiniteGammaModule) -> FiniteGammaModule:
    """``A^vee`` with ``(g f)(a) = f(g^{-1} a)``; action ``D X^{-T} D^{-1}``.

    With ``W = D^{-1} X D`` (integral because X respects the filtration) the
    dual action is ``(W^{-1})^T`` in the dual basis.
    """
    p, e = A.p, A.divisors
    k = len(e)
    if k == 0:
        return A
    E = A.exponent
    K = 2 * E + 2
    W = []
    for i in range(k):
        row = []
        for j in range(k):
            x = A.action[i][j]
            sh = e[j] - e[i]
            row.append(x * p ** sh if sh >= 0 else x // p ** (-sh))
        W.append(row)
    Winv = inverse_mod(W, p, K)
    Y = [[Winv[j][i] for j in range(k)] for i in range(k)]
    return FiniteGammaModule.make(p, e, Y)


def brute_force_orders(A: FiniteGammaModule, n: int = 0):
    """Oracle: enumerate ``A`` and count ``ker`` and ``image`` of gamma - 1."""
    B = A.twisted(-n)
    op = B.gamma_minus_one()
    mods = [A.p ** e for e in A.divisors]
    ker = 0
    image = set()
    for x in product(*[range(m) for m in mods]):
        y = tuple(sum(op[i][j] * x[j] for j in range(len(x))) % mods[i] for i in range(len(x)))
        if not any(y):
            ker += 1
        image.add(y)
    total = 1
    for m in mods:
        total *= m
    return ker, total // len(image)


def random_finite_gamma_module(rng: random.Random, p: int, max_rank=3, max_exp=3) -> FiniteGammaModule:
    """Random filtration-respecting automorphism on random divisors."""
    k = rng.randint(1, max_rank)
    e = sorted(rng.randint(1, max_exp) for _ in range(k))
    E = max(e)
    mod = p ** E
    while True:
        W = [[rng.randrange(mod) for _ in range(k)] for _ in range(k)]
        for i in range(k):
            for j in range(k):
                gap = e[j] - e[i]
                if gap > 0:
                    W[i][j] = (W[i][j] * p ** gap) % mod
        R = int_ring(p, 1)
        if snf(int_matrix(R, W), R).rank == k:
            break
    # X = D W D^{-1}
    X = []
    for i in range(k):
        row = []
        for j in range(k):
            sh = e[i] - e[j]
            x = W[i][j]
            row.append(x * p ** sh if sh >= 0 else x // p ** (-sh))
        X.append(row)
    return FiniteGammaModule.make(p, e, X)


# ---------------------------------------------------------------------------
# Delta-eigenspaces


@dataclass(frozen=True)
class DeltaModule:
    """Finite ``O[Delta]``-module ``(+) O/p^{e_i}`` for ``Delta = prod Z/n_j``.

    ``actions[j]`` is the matrix of the j-th generator.
    """

    ring: CoeffRing
    divisors: tuple
    group_orders: tuple
    actions: tuple

    def __post_init__(self):
        size = 1
        for o in self.group_orders:
            size *= o
        if size % self.ring.p == 0:
            raise ModuleError("p divides #Delta")

    @property
    def delta_size(self) -> int:
        s = 1
        for o in self.group_orders:
            s *= o
        return s

    @property
    def order(self) -> int:
        return self.ring.q ** sum(self.divisors)


@dataclass(frozen=True)
class EigenComponent:
    ring: CoeffRing
    divisors: tuple
    character: tuple  # values psi(g_j)
    idempotent: tuple

    @property
    def order(self) -> int:
        return self.ring.q ** sum(self.divisors)


def _mat_pow(ring, A, k):
    n = len(A)
    out = identity(ring, n)
    base = [list(r) for r in A]
    while k:
        if k & 1:
            out = matmul(out, base, ring)
        base = matmul(base, base, ring)
        k >>= 1
    return out


def idempotent_matrix(ring, group_orders, actions, psi_values, dim):
    """``e_psi = (1/#Delta) sum_delta psi(delta) delta^{-1}`` as a matrix."""
    size = 1
    for o in group_orders:
        size *= o
    if size % ring.p == 0:
        raise ModuleError("p divides #Delta")
    pows = []
    for G, o in zip(actions, group_orders):
        pows.append([_mat_pow(ring, G, (o - a) % o) for a in range(o)])
    E = zeros(ring, dim, dim)
    for expo in product(*[range(o) for o in group_orders]):
        coeff = ring.one
        mat_ = identity(ring, dim)
        for j, a in enumerate(expo):
            coeff = coeff * psi_values[j] ** a
            mat_ = matmul(mat_, pows[j][a], ring)
        for i in range(dim):
            for t in range(dim):
                if not mat_[i][t].is_zero():
                    E[i][t] = E[i][t] + coeff * mat_[i][t]
    inv = ring.scalar(size).inverse()
    return [[x * inv for x in r] for r in E]


def eigenspace_decompose(A: DeltaModule, psi_values: Sequence) -> EigenComponent:
    """Image ``e_psi A``, computed as ``A / (1 - e_psi) A`` by SNF of ``[1 - E | D]``."""
    R = A.ring
    psi_values = [R.scalar(x) for x in psi_values]
    for x, o in zip(psi_values, A.group_orders):
        if x ** o != 1:
            raise ModuleError("character value is not an %d-th root of unity" % o)
    k = len(A.divisors)
    E = idempotent_matrix(R, A.group_orders, A.actions, psi_values, k)
    if k == 0:
        return EigenComponent(R, (), tuple(psi_values), ())
    rows = []
    for i in range(k):
        row = [(R.one if i == j else R.zero) - E[i][j] for j in range(k)]
        row += [R.scalar(R.p ** A.divisors[i]) if i == j else R.zero for j in range(k)]
        rows.append(row)
    vals = snf(rows, R).valuations
    divs = tuple(sorted(int(v) for v in vals if not isinstance(v, AtLeast) and v > 0))
    return EigenComponent(R, divs, tuple(psi_values), tuple(tuple(r) for r in E))


def characters_of(ring: CoeffRing, group_orders):
    """All characters of ``prod Z/n_j`` with values in ``ring`` (needs ``n_j | m``)."""
    m = ring.m
    out = []
    for expo in product(*[range(o) for o in group_orders]):
        vals = []
        for a, o in zip(expo, group_orders):
            if m % o:
                raise ModuleError("ring does not contain the %d-th roots of unity" % o)
            vals.append(ring.zeta ** ((m // o) * a))
        out.append(tuple(vals))
    return out


def regular_representation(ring: CoeffRing, order: int, exponent: int) -> DeltaModule:
    """``(O/p^e)[Z/order]`` with the generator acting by cyclic shift."""
    G = zeros(ring, order, order)
    for i in range(order):
        G[(i + 1) % order][i] = ring.one
    return DeltaModule(ring, (exponent,) * order, (order,), (tuple(tuple(r) for r in G),))


def random_delta_module(rng: random.Random, ring: CoeffRing, order: int, max_exp=3) -> DeltaModule:
    """Sum of regular and character pieces, conjugated by a block-unipotent change of basis."""
    blocks = []  # (exponent, matrix rows for generator)
    zetas = [ring.zeta ** ((ring.m // order) * a) for a in range(order)]
    for _ in range(rng.randint(1, 3)):
        e = rng.randint(1, max_exp)
        if rng.random() < 0.5:
            blocks.append(("reg", e))
        else:
            blocks.append(("chi", e, rng.randrange(order)))
    divs = []
    diag = []
    for b in blocks:
        if b[0] == "reg":
            divs += [b[1]] * order
            diag.append(("reg", order))
        else:
            divs.append(b[1])
            diag.append(("chi", zetas[b[2]]))
    k = len(divs)
    G = zeros(ring, k, k)
    pos = 0
    for d in diag:
        if d[0] == "reg":
            for i in range(order):
                G[pos + (i + 1) % order][pos + i] = ring.one
            pos += order
        else:
            G[pos][pos] = d[1]
            pos += 1
    # conjugate by P = I + (strictly lower, filtration-respecting) to scramble bases
    order_idx = sorted(range(k), key=lambda i: divs[i])
    perm_divs = [divs[i] for i in order_idx]
    G = [[G[order_idx[i]][order_idx[j]] for j in range(k)] for i in range(k)]
    P = identity(ring, k)
    Pinv_rows = None
    for i in range(k):
        for j in range(i):
            gap = perm_divs[i] - perm_divs[j]
            x = ring.scalar(tuple(rng.randrange(ring.p ** 3) for _ in range(ring.d)))
            if gap > 0:
                x = x * ring.scalar(ring.p ** gap)
            P[i][j] = x
    # P is unipotent lower triangular with P_ij divisible by p^{e_j - e_i}; so is P^{-1}
    Pinv_rows = _unipotent_inverse(ring, P)
    Gc = matmul(matmul(P, G, ring), Pinv_rows, ring)
    return DeltaModule(ring, tuple(perm_divs), (order,), (tuple(tuple(r) for r in Gc),))


def _unipotent_inverse(ring, P):
    k = len(P)
    X = identity(ring, k)
    # forward substitution for lower unipotent P
    for col in range(k):
        for i in range(k):
            acc = ring.one if i == col else ring.zero
            for j in range(i):
                acc = acc - P[i][j] * X[j][col]
            X[i][col] = acc
    return X


def component_order_bruteforce(A: DeltaModule, psi_values):
    """Oracle for tiny modules over Z_p: enumerate ``e_psi A``."""
    R = A.ring
    if R.d != 1:
        raise ModuleError("brute force only for d = 1")
    E = idempotent_matrix(R, A.group_orders, A.actions, [R.scalar(x) for x in psi_values], len(A.divisors))
    mods = [R.p ** e for e in A.divisors]
    Ei = to_int_rows(E)
    seen = set()
    for x in product(*[range(m) for m in mods]):
        y = tuple(sum(Ei[i][j] * x[j] for j in range(len(x))) % mods[i] for i in range(len(x)))
        seen.add(y)
    return len(seen)


# ---------------------------------------------------------------------------
# random elementary modules


def random_distinguished(rng: random.Random, ring: CoeffRing, degree: int, depth: int = 3):
    p = ring.p
    coeffs = []
    for _ in range(degree):
        c = ring.scalar(tuple(rng.randrange(p ** depth) for _ in range(ring.d)))
        coeffs.append(c * p)
    coeffs.append(ring.one)
    return tuple(coeffs)


def random_elementary_module(rng: random.Random, ring: CoeffRing, max_lambda: int = 8,
                             max_mu_pieces: int = 2, max_poly_pieces: int = 3) -> ElementaryModule:
    pieces = []
    for _ in range(rng.randint(0, max_mu_pieces)):
        pieces.append(MuPiece(rng.randint(1, 2)))
    budget = max_lambda
    for _ in range(rng.randint(0, max_poly_pieces)):
        if budget <= 0:
            break
        deg = rng.randint(1, min(3, budget))
        mult = rng.randint(1, max(1, min(2, budget // deg)))
        pieces.append(PolyPiece(random_distinguished(rng, ring, deg), mult))
        budget -= deg * mult
    rng.shuffle(pieces)
    return ElementaryModule(ring, tuple(pieces))
