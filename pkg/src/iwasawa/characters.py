"""Dirichlet characters, exact generalized Bernoulli numbers and truncated
L-values at non-positive integers.

Character notation ``"f:e1,e2,..."``: ``f`` is the modulus and ``e_i`` the
exponent of the value on the i-th canonical generator of ``(Z/f)^x``.  The
canonical generators come in CRT order, primes ascending:

* ``2^e``: none for ``e = 1``; ``[-1]`` for ``e = 2``; ``[-1, 5]`` for ``e >= 3``;
* odd ``l^k``: the smallest primitive root modulo ``l^k``;

each lifted to ``Z/f`` as ``1`` modulo the other prime-power factors.  A
generator of order ``o`` with exponent ``e`` takes the value ``exp(2 pi i e / o)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Dict, Optional, Sequence, Tuple

from .padic import AtLeast, CoeffRing, PadicError, PadicScalar, make_coeff_ring, vp


class CharacterError(ValueError):
    pass


class EmbeddingDenominator(PadicError):
    pass


def _lcm(a, b):
    return a * b // gcd(a, b)


def factorize(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _mult_order(a, n):
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def _primitive_root_prime_power(l, k):
    mod = l ** k
    phi = l ** (k - 1) * (l - 1)
    for g in range(2, mod):
        if gcd(g, l) == 1 and _mult_order(g, mod) == phi:
            return g
    raise CharacterError("no primitive root mod %d" % mod)


@lru_cache(maxsize=None)
def canonical_generators(f: int) -> Tuple[Tuple[int, int], ...]:
    """``((g_1, o_1), ...)``: generators of ``(Z/f)^x`` lifted to ``Z/f`` and their orders."""
    if f < 1:
        raise CharacterError("modulus must be positive")
    gens = []
    for l, k in factorize(f):
        mod = l ** k
        other = f // mod
        local = []
        if l == 2:
            if k == 2:
                local = [(mod - 1, 2)]
            elif k >= 3:
                local = [(mod - 1, 2), (5, 2 ** (k - 2))]
        else:
            local = [(_primitive_root_prime_power(l, k), l ** (k - 1) * (l - 1))]
        for g, o in local:
            # CRT: x = g mod l^k, x = 1 mod other
            if other == 1:
                x = g % f
            else:
                t = ((g - 1) * pow(other, -1, mod)) % mod
                x = (1 + other * t) % f
            gens.append((x, o))
    return tuple(gens)


# ---------------------------------------------------------------------------
# exact cyclotomic numbers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> Tuple[int, ...]:
    """Integer coefficients (low to high) of the m-th cyclotomic polynomial."""
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_exact_div(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] // b[-1]
        out[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return out


class ExactCyclotomicRational:
    """Element of ``Q(zeta_m)`` in the power basis ``1, zeta, ..., zeta^{phi(m)-1}``."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        self.m = m
        phi = len(cyclotomic_polynomial(m)) - 1
        cs = [Fraction(c) for c in coeffs]
        self.coeffs = tuple(_reduce_cyclo(cs, m)) if len(cs) > phi else tuple(cs + [Fraction(0)] * (phi - len(cs)))

    @classmethod
    def rational(cls, m, x):
        return cls(m, [Fraction(x)])

    @classmethod
    def zeta_power(cls, m, k):
        k %= m
        cs = [Fraction(0)] * (k + 1)
        cs[k] = Fraction(1)
        return cls(m, cs)

    def __add__(self, other):
        other = self._coerce(other)
        return ExactCyclotomicRational(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return ExactCyclotomicRational(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactCyclotomicRational(self.m, [a * other for a in self.coeffs])
        other = self._coerce(other)
        prod = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return ExactCyclotomicRational(self.m, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        raise TypeError("only division by rationals is supported")

    def _coerce(self, other):
        if isinstance(other, ExactCyclotomicRational):
            if other.m != self.m:
                raise CharacterError("mixing cyclotomic fields %d and %d" % (self.m, other.m))
            return other
        return ExactCyclotomicRational.rational(self.m, other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactCyclotomicRational.rational(self.m, other)
        if not isinstance(other, ExactCyclotomicRational):
            return NotImplemented
        return self.m == other.m and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise CharacterError("value is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self):
        if self.is_rational():
            return "ExactCyclotomicRational(%s)" % self.coeffs[0]
        return "ExactCyclotomicRational(m=%d, %s)" % (self.m, [str(c) for c in self.coeffs])

    def to_padic(self, ring: CoeffRing) -> PadicScalar:
        """Image under ``zeta_m -> ring.zeta^(ring.m/m)``.

        Denominators divisible by p are allowed only if the value itself is
        p-integral; otherwise ``EmbeddingDenominator`` is raised.
        """
        if ring.m % self.m:
            raise CharacterError("ring does not contain the %d-th roots of unity" % self.m)
        p = ring.p
        den = 1
        for c in self.coeffs:
            den = _lcm(den, c.denominator)
        k = vp(den, p) if den % p == 0 else 0
        R2 = make_coeff_ring(p, ring.m, ring.N + k)
        z = R2.zeta ** (ring.m // self.m)
        acc = R2.zero
        zp = R2.one
        for c in self.coeffs:
            acc = acc + zp * (c.numerator * (den // c.denominator))
            zp = zp * z
        if k:
            if any(x % p ** k for x in acc.coords):
                raise EmbeddingDenominator("value is not p-integral")
            acc = PadicScalar(R2, tuple(x // p ** k for x in acc.coords))
        out = ring.scalar(acc.coords) * ring.scalar(den // p ** k).inverse()
        return out

    def p_valuation(self, p: int):
        """``v_p`` of the value (``None`` for zero).

        Irrational values are embedded into the unramified ring ``Z_p[zeta_m]``
        (``p`` not dividing ``m``), where ``v_p`` does not depend on the embedding.
        """
        if self.is_zero():
            return None
        if self.is_rational():
            x = self.coeffs[0]
            v = vp(x.numerator, p) if x.numerator % p == 0 else 0
            return v - (vp(x.denominator, p) if x.denominator % p == 0 else 0)
        if self.m % p == 0:
            raise CharacterError("p divides the cyclotomic level")
        den = 1
        for c in self.coeffs:
            den = _lcm(den, c.denominator)
        shift = vp(den, p) if den % p == 0 else 0
        scaled = self * Fraction(p ** shift)
        N = 20
        while True:
            v = scaled.to_padic(make_coeff_ring(p, self.m, N)).valuation()
            if not isinstance(v, AtLeast):
                return int(v) - shift
            N *= 2


def _reduce_cyclo(cs, m):
    phi_poly = cyclotomic_polynomial(m)
    deg = len(phi_poly) - 1
    cs = list(cs)
    for k in range(len(cs) - 1, deg - 1, -1):
        c = cs[k]
        if c:
            for i in range(deg + 1):
                cs[k - deg + i] -= c * phi_poly[i]
    return cs[:deg]


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple

    def __post_init__(self):
        gens = canonical_generators(self.modulus)
        if len(self.exponents) != len(gens):
            raise CharacterError("modulus %d has %d canonical generators, got %d exponents"
                                 % (self.modulus, len(gens), len(self.exponents)))
        object.__setattr__(self, "exponents",
                           tuple(int(e) % o for e, (_, o) in zip(self.exponents, gens)))

    @classmethod
    def parse(cls, text: str) -> "DirichletCharacter":
        """Parse ``"f:e1,e2,..."`` (``"f:"`` or ``"f"`` for the trivial character)."""
        text = text.strip()
        if ":" in text:
            f, rest = text.split(":", 1)
        else:
            f, rest = text, ""
        f = int(f)
        exps = [int(x) for x in rest.split(",") if x.strip()] if rest.strip() else []
        if not exps:
            exps = [0] * len(canonical_generators(f))
        return cls(f, tuple(exps))

    @classmethod
    def trivial(cls, f: int = 1):
        return cls(f, (0,) * len(canonical_generators(f)))

    def notation(self) -> str:
        return "%d:%s" % (self.modulus, ",".join(str(e) for e in self.exponents))

    def __str__(self):
        return self.notation()

    # -- values: chi(a) = zeta_L^{k(a)} with L = lcm of generator orders
    @property
    def _L(self) -> int:
        L = 1
        for _, o in canonical_generators(self.modulus):
            L = _lcm(L, o)
        return L

    @property
    def order(self) -> int:
        L = self._L
        g = L
        for e, (_, o) in zip(self.exponents, canonical_generators(self.modulus)):
            g = gcd(g, e * (L // o))
        return L // g

    def value_table(self) -> Dict[int, int]:
        """``a -> k`` with ``chi(a) = zeta_order^k`` for ``a`` coprime to the modulus."""
        return _value_table(self.modulus, self.exponents)

    def value_exponent(self, a: int) -> Optional[int]:
        return self.value_table().get(a % self.modulus)

    def value(self, a: int) -> ExactCyclotomicRational:
        m = self.order
        k = self.value_exponent(a)
        if k is None:
            return ExactCyclotomicRational.rational(m, 0)
        return ExactCyclotomicRational.zeta_power(m, k)

    def value_padic(self, a: int, ring: CoeffRing) -> PadicScalar:
        m = self.order
        if ring.m % m:
            raise CharacterError("ring does not contain the values of %s" % self)
        k = self.value_exponent(a)
        if k is None:
            return ring.zero
        return ring.zeta ** ((ring.m // m) * k)

    @property
    def parity(self) -> int:
        if self.modulus <= 2:
            return 1
        k = self.value_exponent(self.modulus - 1)
        m = self.order
        return 1 if k == 0 else -1 if 2 * k == m else 0

    def is_even(self) -> bool:
        return self.parity == 1

    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def conductor(self) -> int:
        return _conductor(self.modulus, self.exponents)

    def primitive(self) -> "DirichletCharacter":
        """The primitive character inducing this one."""
        return _primitive(self.modulus, self.exponents)

    def power(self, k: int) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, tuple(e * k for e in self.exponents))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        """Product, realized on the lcm of the moduli."""
        F = _lcm(self.modulus, other.modulus)
        a, b = self.lift(F), other.lift(F)
        return DirichletCharacter(F, tuple(x + y for x, y in zip(a.exponents, b.exponents)))

    def lift(self, F: int) -> "DirichletCharacter":
        """The character mod ``F`` (a multiple of the modulus) induced by this one."""
        if F % self.modulus:
            raise CharacterError("%d is not a multiple of %d" % (F, self.modulus))
        gens = canonical_generators(F)
        L = self._L
        exps = []
        for g, o in gens:
            k = self.value_exponent(g)
            if k is None:
                raise CharacterError("generator not coprime to modulus")
            # chi(g) = zeta_order^k and must be an o-th root of unity
            m = self.order
            if (k * o) % m:
                raise CharacterError("inconsistent lift")
            exps.append(k * o // m)
        return DirichletCharacter(F, tuple(exps))


@lru_cache(maxsize=4096)
def _value_table(f: int, exps: tuple) -> Dict[int, int]:
    gens = canonical_generators(f)
    L = 1
    for _, o in gens:
        L = _lcm(L, o)
    g = L
    for e, (_, o) in zip(exps, gens):
        g = gcd(g, e * (L // o))
    m = L // g
    table = {1 % f: 0}
    for (gen, o), e in zip(gens, exps):
        step = (e * (L // o) // g) % m  # chi(gen) = zeta_m^step
        new = {}
        for a, k in table.items():
            x = a
            for t in range(o):
                new[x] = (k + t * step) % m
                x = x * gen % f
        table = new
    return table


@lru_cache(maxsize=4096)
def _conductor(f: int, exps: tuple) -> int:
    table = _value_table(f, exps)
    best = f
    for d in sorted(x for x in range(1, f + 1) if f % x == 0):
        if all(k == 0 for a, k in table.items() if (a - 1) % d == 0):
            best = d
            break
    return best


@lru_cache(maxsize=4096)
def _primitive(f: int, exps: tuple) -> DirichletCharacter:
    c = _conductor(f, exps)
    chi = DirichletCharacter(f, exps)
    gens = canonical_generators(c)
    m = chi.order
    new = []
    for g, o in gens:
        # lift g to a residue mod f coprime to f
        b = g
        while gcd(b, f) != 1:
            b += c
        k = chi.value_exponent(b)
        if (k * o) % m:
            raise CharacterError("conductor computation inconsistent")
        new.append(k * o // m)
    return DirichletCharacter(c, tuple(new))


# ---------------------------------------------------------------------------
# Bernoulli numbers


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """``B_n`` with ``B_1 = -1/2``, from ``sum_{j<=n} C(n+1, j) B_j = 0``."""
    if n == 0:
        return Fraction(1)
    s = Fraction(0)
    for j in range(n):
        s += comb(n + 1, j) * bernoulli_number(j)
    return -s / (n + 1)


def bernoulli_polynomial(n: int, x: Fraction) -> Fraction:
    return sum((comb(n, j) * bernoulli_number(j) * Fraction(x) ** (n - j) for j in range(n + 1)), Fraction(0))


def bernoulli_with_modulus(n: int, chi: DirichletCharacter, F: Optional[int] = None) -> ExactCyclotomicRational:
    """``F^{n-1} sum_{a=1}^{F} chi(a) B_n(a/F)`` for the character viewed modulo ``F``.

    Expanded as ``sum_j C(n,j) B_j F^{j-1} S_{n-j}`` with ``S_k = sum chi(a) a^k``.
    """
    if n < 1:
        raise CharacterError("n must be >= 1")
    F = chi.modulus if F is None else F
    if F % chi.modulus:
        raise CharacterError("F must be a multiple of the modulus")
    m = chi.order
    table = chi.value_table()
    f = chi.modulus
    # group the power sums by character value exponent
    sums = [[0] * m for _ in range(n + 1)]
    for a in range(1, F + 1):
        if gcd(a, F) != 1 and F != 1:
            continue
        k = table.get(a % f)
        if k is None:
            continue
        ap = 1
        for e in range(n + 1):
            sums[e][k] += ap
            ap *= a
    total = ExactCyclotomicRational.rational(m, 0)
    zetas = [ExactCyclotomicRational.zeta_power(m, k) for k in range(m)]
    for j in range(n + 1):
        c = comb(n, j) * bernoulli_number(j) * Fraction(F) ** (j - 1)
        if c == 0:
            continue
        row = sums[n - j]
        vec = ExactCyclotomicRational.rational(m, 0)
        for k in range(m):
            if row[k]:
                vec = vec + zetas[k] * row[k]
        total = total + vec * c
    return total


def generalized_bernoulli(n: int, psi: DirichletCharacter) -> ExactCyclotomicRational:
    """``B_{n,psi}`` of the primitive character attached to ``psi``."""
    return bernoulli_with_modulus(n, psi.primitive())


def euler_factor(psi: DirichletCharacter, l: int, n: int) -> ExactCyclotomicRational:
    """``1 - psi(l) l^{n-1}`` for the primitive character."""
    prim = psi.primitive()
    return 1 - prim.value(l) * Fraction(l) ** (n - 1)


def truncated_L_value(psi: DirichletCharacter, n: int, sigma: Sequence[int]) -> ExactCyclotomicRational:
    """``L^Sigma(psi, 1-n) = (-B_{n,psi}/n) prod_{l in Sigma, l not | f} (1 - psi(l) l^{n-1})``."""
    if n < 1:
        raise CharacterError("n must be >= 1")
    prim = psi.primitive()
    val = generalized_bernoulli(n, prim) * Fraction(-1, n)
    for l in sorted(set(sigma)):
        if prim.modulus % l:
            val = val * euler_factor(prim, l, n)
    return val


def is_type_S(psi: DirichletCharacter, p: int) -> bool:
    """Even, nontrivial, order prime to p.

    Characters whose conductor is divisible by p are accepted as well: for an
    order prime to p the field cut out meets the cyclotomic Z_p-extension of Q
    trivially either way.
    """
    return psi.is_even() and not psi.is_trivial() and psi.order % p != 0


def characters_mod(f: int):
    """All Dirichlet characters modulo f."""
    from itertools import product

    gens = canonical_generators(f)
    for exps in product(*[range(o) for _, o in gens]):
        yield DirichletCharacter(f, tuple(exps))


def teichmuller_power(p: int, i: int) -> DirichletCharacter:
    """``omega^i`` as the character ``"p:i"`` (generator = smallest primitive root)."""
    return DirichletCharacter(p, (i % (p - 1),))
