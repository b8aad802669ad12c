"""Truncated power series over ``O/p^N``: the computational model of ``O[[T]]``.

Every series carries a per-coefficient precision ledger ``e_0..e_{M-1}``:
coefficient ``c_j`` is only claimed modulo ``p^{e_j}``.  Series built from
exact polynomials carry ``is_polynomial=True`` meaning the (invisible) tail
beyond ``T^M`` is known to vanish, which lets substitution and evaluation
avoid the usual truncation loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .padic import AtLeast, CoeffRing, PadicError, PadicScalar, make_coeff_ring

SERIAL_VERSION = 1


class SeriesError(PadicError):
    pass


class AllZeroAtPrecision(SeriesError):
    pass


class TruncationTooSmall(SeriesError):
    pass


class InsufficientPrecision(SeriesError):
    pass


class NotDistinguished(SeriesError):
    pass


def _ceil_div(a, b):
    return -((-a) // b)


class PowerSeries:
    """``sum c_j T^j mod (p^N, T^M)`` with a precision ledger."""

    __slots__ = ("ring", "coeffs", "ledger", "is_polynomial")

    def __init__(self, ring: CoeffRing, coeffs, ledger=None, is_polynomial=False):
        if len(coeffs) < 1:
            raise SeriesError("truncation order M must be >= 1")
        cs = []
        for c in coeffs:
            cs.append(c if isinstance(c, PadicScalar) and c.ring is ring else ring.scalar(c))
        self.ring = ring
        self.coeffs = tuple(cs)
        if ledger is None:
            ledger = [c.prec for c in cs]
        self.ledger = tuple(min(int(e), ring.N) for e in ledger)
        if len(self.ledger) != len(self.coeffs):
            raise SeriesError("ledger length mismatch")
        self.is_polynomial = bool(is_polynomial)

    # -- constructors
    @classmethod
    def from_ints(cls, ring, values, M=None, polynomial=True):
        values = list(values)
        if M is None:
            M = max(len(values), 1)
        if len(values) > M:
            if any(ring.scalar(v) != 0 for v in values[M:]):
                polynomial = False
            values = values[:M]
        values = values + [0] * (M - len(values))
        return cls(ring, values, None, polynomial)

    @classmethod
    def zero(cls, ring, M):
        return cls(ring, [0] * M, None, True)

    @classmethod
    def one(cls, ring, M):
        return cls.from_ints(ring, [1], M)

    @classmethod
    def T(cls, ring, M):
        return cls.from_ints(ring, [0, 1], M)

    # -- basic properties
    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def p(self) -> int:
        return self.ring.p

    def __repr__(self):
        return "PowerSeries(%s + O(T^%d), ledger=%s)" % (
            self._terms_str(), self.M, list(self.ledger))

    def _terms_str(self):
        bits = []
        for j, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            val = c.coords[0] if self.ring.d == 1 else list(c.coords)
            bits.append("%s*T^%d" % (val, j) if j else str(val))
        return " + ".join(bits) or "0"

    def degree(self) -> int:
        """Index of the last coefficient that is nonzero mod p^N (-1 for 0)."""
        for j in range(self.M - 1, -1, -1):
            if not self.coeffs[j].is_zero():
                return j
        return -1

    def coefficient(self, j) -> PadicScalar:
        return self.coeffs[j].with_prec(self.ledger[j])

    def min_precision(self) -> int:
        return min(self.ledger)

    def truncate(self, M) -> "PowerSeries":
        if M == self.M:
            return self
        if M > self.M:
            return self.extend(M)
        poly = self.is_polynomial and self.degree() < M
        return PowerSeries(self.ring, self.coeffs[:M], self.ledger[:M], poly)

    def extend(self, M) -> "PowerSeries":
        """Pad a series to a larger truncation order (only exact for polynomials)."""
        if M == self.M:
            return self
        if M < self.M:
            return self.truncate(M)
        extra = M - self.M
        pad = self.ring.N if self.is_polynomial else 0
        return PowerSeries(self.ring, self.coeffs + (self.ring.zero,) * extra,
                           self.ledger + (pad,) * extra, self.is_polynomial)

    def with_ledger(self, ledger) -> "PowerSeries":
        return PowerSeries(self.ring, self.coeffs, ledger, self.is_polynomial)

    def change_precision(self, N) -> "PowerSeries":
        R = make_coeff_ring(self.ring.p, self.ring.m, N)
        return PowerSeries(R, [R.scalar(c) for c in self.coeffs],
                           [min(e, N) for e in self.ledger], self.is_polynomial)

    def agrees_with(self, other: "PowerSeries", upto=None) -> bool:
        """Coefficientwise equality within the joint ledger."""
        M = min(self.M, other.M) if upto is None else upto
        for j in range(M):
            e = min(self.ledger[j], other.ledger[j])
            if e <= 0:
                continue
            diff = self.coeffs[j] - other.coeffs[j]
            if diff.valuation() < e:
                return False
        return True

    def valuations(self):
        return [c.with_prec(e).valuation() for c, e in zip(self.coeffs, self.ledger)]

    # -- ring operations
    def _check(self, other):
        if isinstance(other, PowerSeries):
            if other.ring != self.ring:
                raise SeriesError("series over different coefficient rings")
            if other.M != self.M:
                M = min(self.M, other.M)
                return self.truncate(M), other.truncate(M)
            return self, other
        return self, PowerSeries.from_ints(self.ring, [other], self.M)

    def __add__(self, other):
        a, b = self._check(other)
        return PowerSeries(a.ring, [x + y for x, y in zip(a.coeffs, b.coeffs)],
                           [min(x, y) for x, y in zip(a.ledger, b.ledger)],
                           a.is_polynomial and b.is_polynomial)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self.ring, [-c for c in self.coeffs], self.ledger, self.is_polynomial)

    def __sub__(self, other):
        a, b = self._check(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PowerSeries":
        c = self.ring.scalar(c) if not isinstance(c, PadicScalar) else c
        vc = c.valuation()
        led = [min(e + vc, c.prec + v) for e, v in zip(self.ledger, self._vals_floor())]
        return PowerSeries(self.ring, [c * x for x in self.coeffs], led, self.is_polynomial)

    def _vals_floor(self):
        # valuation lower bounds used for pessimistic ledger updates
        out = []
        for c, e in zip(self.coeffs, self.ledger):
            v = c.valuation()
            out.append(min(int(v), e))
        return out

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        a, b = self._check(other)
        R, M = a.ring, a.M
        va, vb = a._vals_floor(), b._vals_floor()
        mod = R.modulus
        d = R.d
        coeffs = []
        led = []
        ac = [c.coords for c in a.coeffs]
        bc = [c.coords for c in b.coeffs]
        for k in range(M):
            acc = [0] * d
            e = R.N
            for i in range(k + 1):
                j = k - i
                e = min(e, a.ledger[i] + vb[j], b.ledger[j] + va[i])
                if not any(ac[i]) or not any(bc[j]):
                    continue
                prod = R._mul(ac[i], bc[j])
                for t in range(d):
                    acc[t] += prod[t]
            coeffs.append(PadicScalar(R, tuple(x % mod for x in acc)))
            led.append(e)
        poly = a.is_polynomial and b.is_polynomial and a.degree() + b.degree() < M
        return PowerSeries(R, coeffs, led, poly)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PowerSeries.one(self.ring, self.M)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift_down(self, k) -> "PowerSeries":
        """``(f - (f mod T^k)) / T^k``; the top ``k`` coefficients become unknown."""
        pad_e = self.ring.N if self.is_polynomial else 0
        coeffs = list(self.coeffs[k:]) + [self.ring.zero] * k
        led = list(self.ledger[k:]) + [pad_e] * k
        return PowerSeries(self.ring, coeffs, led, self.is_polynomial)

    def shift_up(self, k) -> "PowerSeries":
        coeffs = [self.ring.zero] * k + list(self.coeffs[: self.M - k])
        led = [self.ring.N] * k + list(self.ledger[: self.M - k])
        poly = self.is_polynomial and self.degree() + k < self.M
        return PowerSeries(self.ring, coeffs, led, poly)

    def inverse(self) -> "PowerSeries":
        c0 = self.coeffs[0]
        if not c0.is_unit() or self.ledger[0] < 1:
            raise SeriesError("series with non-unit constant term is not invertible")
        R, M = self.ring, self.M
        inv0 = c0.inverse()
        vals = self._vals_floor()
        out = [inv0]
        led = [self.ledger[0]]
        for k in range(1, M):
            acc = R.zero
            e = self.ledger[0]
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
                e = min(e, self.ledger[j], led[k - j] + vals[j])
            out.append(-(acc * inv0))
            led.append(e)
        return PowerSeries(R, out, led, False)

    def divide_by_p(self, k) -> "PowerSeries":
        return PowerSeries(self.ring, [c.divide_by_p(k) for c in self.coeffs],
                           [e - k for e in self.ledger], self.is_polynomial)

    # -- serialization
    def to_dict(self) -> dict:
        p, N = self.ring.p, self.ring.N
        digits = []
        for c in self.coeffs:
            per_coord = []
            for x in c.coords:
                ds = []
                for _ in range(N):
                    ds.append(x % p)
                    x //= p
                per_coord.append(ds)
            digits.append(per_coord)
        return {
            "version": SERIAL_VERSION,
            "p": p,
            "m": self.ring.m,
            "N": N,
            "M": self.M,
            "ledger": list(self.ledger),
            "polynomial": self.is_polynomial,
            "coeffs": digits,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PowerSeries":
        if data.get("version") != SERIAL_VERSION:
            raise SeriesError("unsupported series serialization version %r" % data.get("version"))
        R = make_coeff_ring(int(data["p"]), int(data["m"]), int(data["N"]))
        coeffs = []
        for per_coord in data["coeffs"]:
            xs = []
            for ds in per_coord:
                x = 0
                for dgt in reversed(ds):
                    x = x * R.p + int(dgt)
                xs.append(x)
            coeffs.append(R.scalar(tuple(xs)))
        if len(coeffs) != int(data["M"]):
            raise SeriesError("coefficient count does not match M")
        return cls(R, coeffs, data["ledger"], data.get("polynomial", False))


@dataclass(frozen=True)
class WeierstrassData:
    mu: int
    lam: int
    distinguished: PowerSeries
    unit: PowerSeries

    @property
    def lambda_(self):
        return self.lam

    def recombine(self) -> PowerSeries:
        p = self.unit.ring.p
        return (self.distinguished * self.unit).scale(p ** self.mu)


def _mu_lambda(f: PowerSeries):
    """Read off (mu, lambda) from the visible coefficients with ambiguity checks."""
    known = []
    for j, (c, e) in enumerate(zip(f.coeffs, f.ledger)):
        v = c.with_prec(e).valuation()
        if not isinstance(v, AtLeast):
            known.append((j, int(v)))
    if not known:
        raise AllZeroAtPrecision("every coefficient is zero at its recorded precision")
    mu = min(v for _, v in known)
    lam = min(j for j, v in known if v == mu)
    for j, (c, e) in enumerate(zip(f.coeffs, f.ledger)):
        v = c.with_prec(e).valuation()
        if isinstance(v, AtLeast):
            if e < mu or (j < lam and e <= mu):
                raise InsufficientPrecision(
                    "coefficient %d known only mod p^%d; cannot certify mu/lambda" % (j, e))
    return mu, lam


def _raw(f: PowerSeries):
    return [list(c.coords) for c in f.coeffs]


def _series_mul_raw(R, a, b, M):
    d, mod = R.d, R.modulus
    if d == 1:
        ai = [x[0] for x in a[:M]]
        bi = [x[0] for x in b[:M]]
        out = [0] * M
        for i, x in enumerate(ai):
            if x:
                lim = min(M - i, len(bi))
                for j in range(lim):
                    y = bi[j]
                    if y:
                        out[i + j] += x * y
        return [[x % mod] for x in out]
    out = [[0] * d for _ in range(M)]
    for i in range(min(M, len(a))):
        if not any(a[i]):
            continue
        for j in range(min(M - i, len(b))):
            if not any(b[j]):
                continue
            pr = R._mul(tuple(a[i]), tuple(b[j]))
            o = out[i + j]
            for t in range(d):
                o[t] += pr[t]
    return [[x % mod for x in o] for o in out]


def _contraction_solve(R, base, A, lam, M, Binv=None):
    """Fixed point of ``q = Binv * (base - tau_lam(q*A))`` modulo T^M.

    ``A`` is divisible by p so the map is a p-adic contraction; every pass
    gains at least one digit, hence at most ``N + 1`` passes are needed.
    """
    mod = R.modulus
    zero = [0] * R.d
    q = [list(x) for x in base]
    if Binv is not None:
        q = _series_mul_raw(R, Binv, q, M)
    for _ in range(R.N + 3):
        qa = _series_mul_raw(R, q, A, M + lam)
        new = [[(base[k][t] - qa[k + lam][t]) % mod for t in range(R.d)] for k in range(M)]
        if Binv is not None:
            new = _series_mul_raw(R, Binv, new, M)
        if new == q:
            return q
        q = new
    raise SeriesError("Weierstrass iteration failed to converge")


def _prep_ledgers(f, mu, lam, M):
    """Pessimistic ledgers for q (= U^{-1}) and P, indexed by coefficient."""
    N = f.ring.N
    cap = N - mu
    sources = [(j, e - mu) for j, e in enumerate(f.ledger) if e - mu < cap]
    if not f.is_polynomial:
        sources.append((M, 0))
    step = max(lam, 1)

    def cost(j, k):
        return max(0, _ceil_div(j - lam - k, step)) if j >= lam else 0

    eq = []
    for k in range(M):
        e = cap
        for j, ej in sources:
            e = min(e, ej + cost(j, k))
        eq.append(max(e, 0))
    eP = []
    for k in range(lam):
        e = cap
        for i in range(k + 1):
            e = min(e, eq[i] + 1, cap if k - i >= M else f.ledger[k - i] - mu)
        eP.append(max(e, 0))
    return eq, eP


def _prep_polynomial(R, raw, lam):
    """Exact factorization ``g = (T^lam + a) U`` of a polynomial ``g``.

    Writing ``g = A + T^lam B`` the pair satisfies ``a = A U^{-1} mod T^lam``
    and ``U = B - tau_lam(U a)``; iterating is a p-adic contraction since
    ``a = 0 mod p``.  Everything stays polynomial of degree ``<= deg g``.
    """
    D = len(raw) - 1
    while D > lam and not any(raw[D]):
        D -= 1
    raw = raw[: D + 1]
    A = raw[:lam]
    B = raw[lam:]
    mod = R.modulus
    zero = [0] * R.d
    a = [list(zero) for _ in range(lam)]
    U = [list(x) for x in B]
    for _ in range(R.N + 3):
        Ui = _raw(PowerSeries(R, [tuple(x) for x in (U + [zero] * lam)[:lam]], None, False).inverse()) if lam else []
        a_new = _series_mul_raw(R, A, Ui, lam) if lam else []
        Ua = _series_mul_raw(R, U, a_new, len(U) + lam)
        U_new = [[(B[k][t] - Ua[k + lam][t]) % mod for t in range(R.d)] for k in range(len(B))]
        if a_new == a and U_new == U:
            return a, U
        a, U = a_new, U_new
    raise SeriesError("Weierstrass iteration failed to converge")


def weierstrass_prep(f: PowerSeries) -> WeierstrassData:
    """Return ``(mu, lambda, P, U)`` with ``f = p^mu * P * U``.

    The unit is found as the fixed point of ``q = B^{-1}(1 - tau(q A))`` where
    ``p^{-mu} f = A + T^lambda B``, ``tau`` drops the first ``lambda``
    coefficients, and ``U = q^{-1}``.  Exact polynomial inputs are factored
    as polynomials (see ``_prep_polynomial``) and keep full precision.
    """
    R = f.ring
    mu, lam = _mu_lambda(f)
    M = f.M
    if lam >= M:
        raise TruncationTooSmall("lambda >= M")
    g = f.divide_by_p(mu) if mu else f
    if f.is_polynomial:
        a, Ucoef = _prep_polynomial(R, _raw(g), lam)
        e = max(min(g.ledger), 0)
        one = (1,) + (0,) * (R.d - 1)
        P = PowerSeries(R, ([tuple(x) for x in a] + [one] + [(0,) * R.d] * M)[:M],
                        [e] * lam + [R.N] * (M - lam), True)
        Ucs = [tuple(x) for x in Ucoef]
        U = PowerSeries(R, (Ucs + [(0,) * R.d] * M)[:M], [e] * M, len(Ucs) <= M)
        return WeierstrassData(mu, lam, P, U)
    Mi = M
    raw = _raw(g)
    A = raw[:lam]
    B = raw[lam:] + [[0] * R.d for _ in range(lam)]
    Binv = _raw(PowerSeries(R, [tuple(x) for x in B], None, False).inverse())
    one = [[1] + [0] * (R.d - 1)] + [[0] * R.d for _ in range(Mi - 1)]
    q = _contraction_solve(R, one, A, lam, Mi, Binv=Binv)
    qs = PowerSeries(R, [tuple(x) for x in q], None, False)
    P_raw = _series_mul_raw(R, q, raw, lam)
    P_coeffs = [tuple(x) for x in P_raw] + [(1,) + (0,) * (R.d - 1)] + [(0,) * R.d] * (Mi - lam - 1)
    U = qs.inverse()
    eq, eP = _prep_ledgers(f, mu, lam, M)
    eU = []
    run = R.N
    for k in range(M):
        run = min(run, eq[k])
        eU.append(run)
    P = PowerSeries(R, P_coeffs[:M], eP + [R.N] * (M - lam), True)
    U = PowerSeries(R, U.coeffs[:M], eU, False)
    for j in range(lam):
        if eP[j] >= 1 and P.coeffs[j].is_unit():
            raise SeriesError("internal error: non-distinguished output")
    return WeierstrassData(mu, lam, P, U)


def is_distinguished(P: PowerSeries) -> bool:
    lam = P.degree()
    if lam < 0 or P.coeffs[lam] != 1:
        return False
    return all(not c.is_unit() for c in P.coeffs[:lam])


def _poly_divmod(f, P, lam):
    """Long division of an exact polynomial by a monic polynomial."""
    R, M = f.ring, f.M
    work = list(f.coeffs[: f.degree() + 1]) or [R.zero]
    lead = P.coeffs[: lam + 1]
    quo = [R.zero] * max(len(work) - lam, 1)
    for k in range(len(work) - 1, lam - 1, -1):
        c = work[k]
        if c.is_zero():
            continue
        quo[k - lam] = c
        for i in range(lam + 1):
            work[k - lam + i] = work[k - lam + i] - c * lead[i]
    e = min(min(f.ledger), min(P.ledger[: lam + 1]))
    qs = PowerSeries(R, (quo + [R.zero] * M)[:M], [e] * M, len(quo) <= M)
    rs = PowerSeries(R, (work[:lam] + [R.zero] * M)[:M], [e] * lam + [R.N] * (M - lam), True)
    return qs, rs


def weierstrass_divide(f: PowerSeries, P: PowerSeries):
    """``f = q P + r`` with ``deg r < deg P`` for a distinguished polynomial ``P``."""
    if not is_distinguished(P):
        raise NotDistinguished("divisor must be a distinguished polynomial")
    R = f.ring
    lam = P.degree()
    M = f.M
    if lam >= M:
        raise TruncationTooSmall("deg P >= M")
    if f.is_polynomial:
        return _poly_divmod(f, P, lam)
    raw = _raw(f)
    A = [list(c.coords) for c in P.coeffs[:lam]]
    base = raw[lam:] + [[0] * R.d for _ in range(lam)]
    q = _contraction_solve(R, base, A, lam, M)
    qA = _series_mul_raw(R, q, A, lam)
    mod = R.modulus
    r = [[(raw[k][t] - qA[k][t]) % mod for t in range(R.d)] for k in range(lam)]
    # ledger: same contraction-cost bound as in preparation (mu = 0)
    eq, _ = _prep_ledgers(f, 0, lam, M)
    ePl = min(P.ledger[:lam] or [R.N])
    er = []
    for k in range(lam):
        e = min(f.ledger[k], min(eq[: k + 1]) + 1, ePl)
        er.append(e)
    eq = [min(e, ePl) for e in eq]
    qs = PowerSeries(R, [tuple(x) for x in q[:M]], eq, False)
    rs = PowerSeries(R, [tuple(x) for x in r] + [(0,) * R.d] * (M - lam), er + [R.N] * (M - lam), True)
    return qs, rs


def twist_substitute(f: PowerSeries, c) -> PowerSeries:
    """``f(c(1+T) - 1)`` modulo ``T^M``.

    With ``s = c - 1`` the k-th coefficient is ``sum_{j>=k} f_j C(j,k) s^(j-k) c^k``.
    For a non-polynomial ``f`` the unseen tail contributes at valuation
    ``>= (M-k) v(s)``, which the ledger records.
    """
    R = f.ring
    c = R.scalar(c) if not isinstance(c, PadicScalar) else c
    s = c - 1
    vs = s.valuation()
    if vs < 1:
        raise SeriesError("substitution point c(1+T)-1 is not in the maximal ideal")
    vs = int(vs)
    M = f.M
    spow = [R.one]
    for _ in range(M):
        spow.append(spow[-1] * s)
    cpow = [R.one]
    for _ in range(M):
        cpow.append(cpow[-1] * c)
    out, led = [], []
    for k in range(M):
        acc = R.zero
        e = R.N if f.is_polynomial else (M - k) * vs
        for j in range(k, M):
            if not f.coeffs[j].is_zero():
                acc = acc + f.coeffs[j] * spow[j - k] * comb(j, k)
            e = min(e, f.ledger[j] + (j - k) * vs)
        out.append(acc * cpow[k])
        led.append(min(e, R.N))
    return PowerSeries(R, out, led, f.is_polynomial)


def evaluate_at(f: PowerSeries, t) -> PadicScalar:
    """``f(t)`` for ``v(t) >= 1`` with the precision carried on the result."""
    R = f.ring
    t = R.scalar(t) if not isinstance(t, PadicScalar) else t
    vt = t.valuation()
    if vt < 1:
        raise SeriesError("evaluation point must lie in the maximal ideal")
    vt = int(vt) if not isinstance(vt, AtLeast) else R.N
    acc = R.zero
    for c in reversed(f.coeffs):
        acc = acc * t + c
    prec = min(t.prec, R.N)
    for j, e in enumerate(f.ledger):
        prec = min(prec, e + j * vt)
    if not f.is_polynomial:
        prec = min(prec, f.M * vt)
    return PadicScalar(R, acc.coords, prec)


def series_from_roots(ring: CoeffRing, roots, M) -> PowerSeries:
    """``prod (T - r)`` as an exact polynomial series."""
    f = PowerSeries.one(ring, M)
    for r in roots:
        f = f * PowerSeries.from_ints(ring, [-ring.scalar(r), 1], M)
    return f
