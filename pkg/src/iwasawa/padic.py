"""Fixed-precision arithmetic in unramified extensions of Z_p.

A :class:`CoeffRing` models ``Z_p[zeta_m] / p^N``.  Elements are stored as
coordinate tuples in the power basis ``1, x, ..., x^(d-1)`` where ``x`` is the
Teichmuller root of unity ``zeta_m`` itself, so ``h`` (the defining
polynomial) is the minimal polynomial of ``zeta_m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union


class PadicError(ValueError):
    pass


class NonUnitError(PadicError):
    pass


class AtLeast(int):
    """A valuation lower bound: the element is zero at the working precision."""

    def __repr__(self):
        return "AtLeast(%d)" % int(self)

    def __str__(self):
        return ">=%d" % int(self)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise PadicError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def multiplicative_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    k, x = 1, a % m
    while x != 1:
        x = (x * a) % m
        k += 1
    return k


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo the odd prime p."""
    phi = p - 1
    primes = [q for q in range(2, phi + 1) if phi % q == 0 and is_prime(q)]
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in primes):
            return g
    raise PadicError("no primitive root mod %d" % p)


# ---------------------------------------------------------------------------
# raw coordinate arithmetic (tuples of ints modulo p^N, reduced modulo h)


def _polmulmod(a, b, h, mod):
    d = len(h) - 1
    prod = [0] * (2 * d - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k] % mod
        if c:
            for i in range(d):
                prod[k - d + i] -= c * h[i]
        prod[k] = 0
    return tuple(x % mod for x in prod[:d])


@dataclass(frozen=True, eq=False)
class CoeffRing:
    """``O/p^N`` with ``O = Z_p[zeta_m]`` unramified of degree ``d``."""

    p: int
    m: int
    N: int
    d: int
    h: tuple
    zeta_coords: tuple = field(repr=False)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def q(self) -> int:
        return self.p ** self.d

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, CoeffRing):
            return NotImplemented
        return (self.p, self.m, self.N, self.h) == (other.p, other.m, other.N, other.h)

    def __hash__(self):
        return hash((self.p, self.m, self.N, self.h))

    def __call__(self, x) -> "PadicScalar":
        return self.scalar(x)

    def scalar(self, x) -> "PadicScalar":
        if isinstance(x, PadicScalar):
            if x.ring == self:
                return x
            if (x.ring.p, x.ring.m, x.ring.h[:1]) != (self.p, self.m, self.h[:1]) and x.ring.d != self.d:
                raise PadicError("incompatible coefficient rings")
            return PadicScalar(self, tuple(c % self.modulus for c in x.coords), min(x.prec, self.N))
        if isinstance(x, int):
            return PadicScalar(self, (x % self.modulus,) + (0,) * (self.d - 1))
        if isinstance(x, (tuple, list)):
            if len(x) != self.d:
                raise PadicError("expected %d coordinates" % self.d)
            return PadicScalar(self, tuple(int(c) % self.modulus for c in x))
        # Fractions and anything exposing numerator/denominator
        num, den = int(x.numerator), int(x.denominator)
        if den % self.p == 0:
            raise PadicError("denominator divisible by p")
        return self.scalar(num * pow(den, -1, self.modulus))

    @property
    def zero(self) -> "PadicScalar":
        return PadicScalar(self, (0,) * self.d)

    @property
    def one(self) -> "PadicScalar":
        return self.scalar(1)

    @property
    def zeta(self) -> "PadicScalar":
        """The chosen primitive m-th root of unity."""
        return PadicScalar(self, self.zeta_coords)

    def at_precision(self, N: int) -> "CoeffRing":
        return make_coeff_ring(self.p, self.m, N)

    def _mul(self, a: tuple, b: tuple) -> tuple:
        mod = self.modulus
        if self.d == 1:
            return ((a[0] * b[0]) % mod,)
        return _polmulmod(a, b, self.h, mod)


Scalarish = Union["PadicScalar", int]


class PadicScalar:
    """Element of ``O/p^N``; ``prec`` records how many digits are meaningful."""

    __slots__ = ("ring", "coords", "prec")

    def __init__(self, ring: CoeffRing, coords: tuple, prec: int | None = None):
        self.ring = ring
        self.coords = coords
        self.prec = ring.N if prec is None else min(prec, ring.N)

    # -- helpers
    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            if other.ring.p != self.ring.p or other.ring.m != self.ring.m:
                raise PadicError("mixing scalars from different coefficient rings")
            return other
        return self.ring.scalar(other)

    def _common(self, other):
        other = self._coerce(other)
        if other.ring.N < self.ring.N:
            return other.ring.scalar(self), other, other.ring
        if other.ring.N > self.ring.N:
            return self, self.ring.scalar(other), self.ring
        return self, other, self.ring

    def __add__(self, other):
        a, b, R = self._common(other)
        mod = R.modulus
        return PadicScalar(R, tuple((x + y) % mod for x, y in zip(a.coords, b.coords)), min(a.prec, b.prec))

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        return PadicScalar(self.ring, tuple((-x) % mod for x in self.coords), self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        a, b, R = self._common(other)
        prec = min(a.prec + b.valuation(), b.prec + a.valuation(), R.N) if a.prec < R.N or b.prec < R.N else R.N
        return PadicScalar(R, R._mul(a.coords, b.coords), prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        R = self.ring
        result = (1,) + (0,) * (R.d - 1)
        base = self.coords
        while e:
            if e & 1:
                result = R._mul(result, base)
            base = R._mul(base, base)
            e >>= 1
        return PadicScalar(R, result, self.prec)

    def __eq__(self, other):
        if isinstance(other, (PadicScalar, int)):
            o = self._coerce(other)
            if o.ring.N != self.ring.N:
                a, b, _ = self._common(o)
                return a.coords == b.coords
            return self.coords == o.coords
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.p, self.ring.m, self.coords))

    def __repr__(self):
        if self.ring.d == 1:
            return "PadicScalar(%d mod %d^%d)" % (self.coords[0], self.ring.p, self.ring.N)
        return "PadicScalar(%s mod %d^%d)" % (list(self.coords), self.ring.p, self.ring.N)

    def __int__(self):
        if any(self.coords[1:]):
            raise PadicError("not a rational p-adic integer")
        return self.coords[0]

    # -- valuation and units
    def is_zero(self) -> bool:
        return not any(self.coords)

    def valuation(self) -> int:
        """``min v_p`` over coordinates, or ``AtLeast(prec)`` when zero at precision."""
        p = self.ring.p
        best = None
        for c in self.coords:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = v if best is None else min(best, v)
        if best is None or best >= self.prec:
            return AtLeast(self.prec)
        return best

    def is_unit(self) -> bool:
        return any(c % self.ring.p for c in self.coords)

    def inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise NonUnitError("%r is not a unit" % (self,))
        R = self.ring
        if R.d == 1:
            return PadicScalar(R, (pow(self.coords[0], -1, R.modulus),), self.prec)
        # inverse mod p from x^(q-2), then Newton lifting y <- y(2 - xy)
        y = self ** (R.q - 2)
        two = R.scalar(2)
        for _ in range(R.N.bit_length() + 1):
            y = y * (two - self * y)
        return PadicScalar(R, y.coords, self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def divide_by_p(self, k: int) -> "PadicScalar":
        """Exact division by ``p^k``; the top ``k`` digits become unknown."""
        pk = self.ring.p ** k
        if any(c % pk for c in self.coords):
            raise PadicError("not divisible by p^%d" % k)
        return PadicScalar(self.ring, tuple(c // pk for c in self.coords), self.prec - k)

    def with_prec(self, prec: int) -> "PadicScalar":
        return PadicScalar(self.ring, self.coords, prec)

    def reduce(self, k: int) -> "PadicScalar":
        """Coordinates reduced to ``[0, p^k)``."""
        pk = self.ring.p ** k
        return PadicScalar(self.ring, tuple(c % pk for c in self.coords), min(self.prec, k))

    def frobenius(self) -> "PadicScalar":
        # zeta -> zeta^p extends to the arithmetic Frobenius of O
        R = self.ring
        z = R.zeta ** R.p
        acc = R.zero
        zp = R.one
        for c in self.coords:
            acc = acc + zp * c
            zp = zp * z
        return acc.with_prec(self.prec)


# ---------------------------------------------------------------------------
# ring construction


def _teichmuller_coords(R: CoeffRing, coords: tuple) -> tuple:
    q = R.q
    x = coords
    for _ in range(R.N + 2):
        y = PadicScalar(R, x) ** q
        if y.coords == x:
            return x
        x = y.coords
    raise PadicError("Teichmuller iteration did not stabilise")


@lru_cache(maxsize=None)
def _residue_factor(p: int, m: int) -> tuple:
    """First irreducible factor (sorted) of the m-th cyclotomic polynomial mod p."""
    from sympy import Poly, cyclotomic_poly, symbols

    x = symbols("x")
    fac = Poly(cyclotomic_poly(m, x), x, modulus=p).factor_list()[1]
    cands = []
    for f, _ in fac:
        coeffs = [int(c) % p for c in reversed(f.all_coeffs())]
        cands.append(tuple(coeffs))
    return sorted(cands)[0]


@lru_cache(maxsize=None)
def make_coeff_ring(p: int, m: int = 1, N: int = 30) -> CoeffRing:
    """Build ``Z_p[zeta_m]/p^N``.

    For ``d = 1`` the root of unity is ``teich(g)^((p-1)/m)`` with ``g`` the
    smallest primitive root mod ``p``; these choices are compatible across
    ``m`` so that the Dirichlet character ``"p:1"`` embeds as the Teichmuller
    character.  ``m = 1`` uses the convention ``h = x``.
    """
    if not isinstance(p, int) or p == 2 or not is_prime(p):
        raise PadicError("p must be an odd prime, got %r" % (p,))
    if m < 1 or m % p == 0:
        raise PadicError("m must be a positive integer coprime to p")
    if N < 1:
        raise PadicError("precision N must be >= 1")
    d = multiplicative_order(p, m)
    mod = p ** N
    if d == 1:
        if m == 1:
            return CoeffRing(p, 1, N, 1, (0, 1), (1,))
        tmp = CoeffRing(p, m, N, 1, (0, 1), (1,))
        g = primitive_root(p)
        (t,) = _teichmuller_coords(tmp, (g,))
        z = pow(t, (p - 1) // m, mod)
        return CoeffRing(p, m, N, 1, ((-z) % mod, 1), (z,))
    h0 = _residue_factor(p, m)
    tmp = CoeffRing(p, m, N, d, h0, (0, 1) + (0,) * (d - 2))
    zeta = PadicScalar(tmp, _teichmuller_coords(tmp, tmp.zeta_coords))
    # minimal polynomial prod_i (X - zeta^(p^i)); its coefficients lie in Z/p^N
    poly = [tmp.one]
    conj = zeta
    for _ in range(d):
        new = [tmp.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * conj
        poly = new
        conj = conj ** p
    h = []
    for c in poly:
        if any(c.coords[1:]):
            raise PadicError("minimal polynomial of zeta not rational")
        h.append(c.coords[0])
    return CoeffRing(p, m, N, d, tuple(h), (0, 1) + (0,) * (d - 2))


def valuation(a: PadicScalar) -> int:
    return a.valuation()


def teichmuller(a: PadicScalar) -> PadicScalar:
    """The (q-1)-st root of unity congruent to ``a`` mod p."""
    if not a.is_unit():
        raise NonUnitError("Teichmuller lift of a non-unit")
    return PadicScalar(a.ring, _teichmuller_coords(a.ring, a.coords))


def cyclotomic_u(ring: CoeffRing) -> PadicScalar:
    """Image ``u = 1 + p`` of the fixed topological generator of Gamma."""
    return ring.scalar(1 + ring.p)


def log_u(x: int, p: int, k: int) -> int:
    """``ell`` mod ``p^k`` with ``u^ell = <x>`` mod ``p^(k+1)``, by digit search.

    ``<x> = x / omega(x)`` is the principal-unit part of the p-adic unit x.
    """
    if x % p == 0:
        raise NonUnitError("log_u of a non-unit")
    mod = p ** (k + 1)
    w = pow(x, p ** k, mod)  # omega(x) = x^(p^k) mod p^(k+1)
    principal = (x * pow(w, -1, mod)) % mod
    u = 1 + p
    ell = 0
    for j in range(k):
        step = pow(u, p ** j, mod)
        cur = pow(u, ell, mod)
        modj = p ** (j + 2)
        for t in range(p):
            if (cur * pow(step, t, mod) - principal) % modj == 0:
                ell += t * p ** j
                break
        else:
            raise PadicError("log_u search failed")
    return ell


def as_scalars(ring: CoeffRing, xs: Iterable) -> list:
    return [ring.scalar(x) for x in xs]
