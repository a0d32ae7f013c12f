"""Exact arithmetic in the real cyclotomic fields Q(2cos(pi/N)).

An element is stored as integer coordinates over a common positive
denominator in the power basis 1, t, ..., t^(d-1) with t = 2cos(pi/N).
Zero tests are exact; signs are certified by floating point with an
explicit error bound, falling back to interval arithmetic (mpmath) with
increasing precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import mpmath

# -- polynomial helpers (integer coefficient lists, low degree first) ---------


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact(a, b):
    """Exact division of integer polynomials, b monic up to sign."""
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        if c % lead:
            raise ArithmeticError("inexact polynomial division")
        c //= lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, cyclotomic(d))
    return tuple(num)


def dickson(k: int) -> list[int]:
    """Polynomial D_k with D_k(x + 1/x) = x^k + x^-k (D_0 = 2)."""
    prev, cur = [2], [0, 1]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


@lru_cache(maxsize=None)
def min_poly(N: int) -> tuple[int, ...]:
    """Monic minimal polynomial of 2cos(pi/N) over Q."""
    if N < 1:
        raise ValueError("N must be positive")
    M = 2 * N
    if M <= 2:
        return (2, 1)  # t = -2
    if M == 4:
        return (0, 1)  # t = 0
    phi = cyclotomic(M)
    d = (len(phi) - 1) // 2
    psi = [0] * (d + 1)
    psi[0] = phi[d]
    for k in range(1, d + 1):
        for i, c in enumerate(dickson(k)):
            psi[i] += phi[d + k] * c
    while psi and psi[-1] == 0:
        psi.pop()
    return tuple(psi)


class CycloField:
    """The field Q(2cos(pi/N)) with a fixed power basis."""

    __slots__ = ("N", "poly", "degree", "_reduce", "_t_float", "_t_err")

    def __init__(self, N: int):
        self.N = N
        self.poly = min_poly(N)
        self.degree = len(self.poly) - 1
        d = self.degree
        # t^j for j in [d, 2d-2] as coordinate vectors
        red = []
        cur = [-c for c in self.poly[:-1]]
        for _ in range(max(d - 1, 1)):
            red.append(cur)
            top = cur[-1]
            nxt = [0] + cur[:-1]
            if top:
                for i in range(d):
                    nxt[i] -= top * self.poly[i]
            cur = nxt
        self._reduce = red
        self._t_float = 2 * math.cos(math.pi / N)

    def __repr__(self) -> str:
        return f"CycloField({self.N})"

    def reduce(self, coeffs: list[int]) -> list[int]:
        d = self.degree
        n = len(coeffs)
        if n <= d:
            return list(coeffs) + [0] * (d - n)
        if n > 2 * d - 1 or d == 1:
            out = list(coeffs)
            poly = self.poly
            for j in range(n - 1, d - 1, -1):
                c = out[j]
                if c:
                    for i in range(d):
                        out[j - d + i] -= c * poly[i]
            return out[:d]
        out = list(coeffs[:d])
        for j in range(d, n):
            c = coeffs[j]
            if c:
                for i, r in enumerate(self._reduce[j - d]):
                    if r:
                        out[i] += c * r
        return out

    def generator_power(self, k: int) -> list[int]:
        """Coordinates of D_k(t) = 2cos(k*pi/N)."""
        return self.reduce(dickson(k))


@lru_cache(maxsize=None)
def field(N: int) -> CycloField:
    return CycloField(N)


def field_for_labels(labels) -> CycloField:
    """Smallest field of the form Q(2cos(pi/N)) containing every cos(pi/m)."""
    N = 1
    for m in labels:
        if isinstance(m, int) and m > 3:
            N = N * m // math.gcd(N, m)
    return field(N)


@lru_cache(maxsize=None)
def _embedding(N: int, L: int) -> tuple[tuple[int, ...], ...]:
    """Images of t_N^i (i < deg) in the power basis of Q(2cos(pi/L)), N | L."""
    src, dst = field(N), field(L)
    gen = dst.generator_power(L // N)
    cols = []
    cur = [1] + [0] * (dst.degree - 1)
    for _ in range(src.degree):
        cols.append(tuple(cur))
        cur = dst.reduce(_poly_mul(cur, gen))
    return tuple(cols)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# -- elements ----------------------------------------------------------------


class AlgReal:
    """Exact element of Q(2cos(pi/N))."""

    __slots__ = ("K", "num", "den")

    def __init__(self, K: CycloField, num: Sequence[int], den: int = 1, _normalized: bool = False):
        self.K = K
        if _normalized:
            self.num, self.den = num, den
            return
        num = list(num)
        if len(num) != K.degree:
            num = K.reduce(num)
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = reduce(math.gcd, num, den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self.num = tuple(num)
        self.den = den

    # constructors
    @classmethod
    def rational(cls, q, K: CycloField | None = None) -> "AlgReal":
        K = K or field(1)
        q = Fraction(q)
        return cls(K, [q.numerator] + [0] * (K.degree - 1), q.denominator)

    @classmethod
    def cos_pi_over(cls, m: int, K: CycloField | None = None) -> "AlgReal":
        """cos(pi/m) in K (default: the smallest field containing it)."""
        if m == 2:
            return cls.rational(0, K)
        if m == 3:
            return cls.rational(Fraction(1, 2), K)
        K = K or field(m)
        if K.N % m:
            raise ValueError(f"cos(pi/{m}) is not in {K}")
        return cls(K, K.generator_power(K.N // m), 2)

    def embed(self, L: int) -> "AlgReal":
        if L == self.K.N:
            return self
        if L % self.K.N:
            raise ValueError(f"cannot embed {self.K} into Q(2cos(pi/{L}))")
        cols = _embedding(self.K.N, L)
        K = field(L)
        out = [0] * K.degree
        for c, col in zip(self.num, cols):
            if c:
                for i, x in enumerate(col):
                    out[i] += c * x
        return AlgReal(K, out, self.den)

    def _coerce(self, other):
        if isinstance(other, AlgReal):
            if other.K is self.K:
                return self, other
            L = _lcm(self.K.N, other.K.N)
            return self.embed(L), other.embed(L)
        if isinstance(other, (int, Fraction)):
            return self, AlgReal.rational(other, self.K)
        return NotImplemented, NotImplemented

    # arithmetic
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        if a.den == b.den:
            return AlgReal(a.K, [x + y for x, y in zip(a.num, b.num)], a.den)
        return AlgReal(a.K, [x * b.den + y * a.den for x, y in zip(a.num, b.num)], a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return AlgReal(self.K, tuple(-c for c in self.num), self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        K = a.K
        if K.degree == 1:
            return AlgReal(K, [a.num[0] * b.num[0]], a.den * b.den)
        return AlgReal(K, K.reduce(_poly_mul(a.num, b.num)), a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "AlgReal":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        K = self.K
        if K.degree == 1:
            return AlgReal(K, [self.den], self.num[0])
        num, den = _modular_inverse(list(self.num), K)
        return AlgReal(K, [c * self.den for c in num], den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero")
            return AlgReal(self.K, [c * q.denominator for c in self.num], self.den * q.numerator)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return AlgReal.rational(other, self.K) / self

    def __pow__(self, k: int):
        out = AlgReal.rational(1, self.K)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparisons
    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return (a - b).is_zero()

    def __hash__(self):
        if all(c == 0 for c in self.num[1:]):
            return hash(Fraction(self.num[0], self.den))
        return hash((self.K.N, self.num, self.den))

    def sign(self) -> int:
        """Certified sign: -1, 0 or +1."""
        if self.is_zero():
            return 0
        if self.K.degree == 1:
            return 1 if self.num[0] > 0 else -1
        s = self._float_sign()
        if s:
            return s
        prec = 128
        while True:
            lo, hi = self.interval(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2

    def _float_sign(self) -> int:
        t = self.K._t_float
        try:
            acc = 0.0
            bound = 0.0
            p = 1.0
            for c in self.num:
                term = c * p
                acc += term
                bound += abs(term)
                p *= t
        except OverflowError:
            return 0
        if not math.isfinite(acc) or not math.isfinite(bound):
            return 0
        err = bound * (4 * len(self.num) + 8) * 2.3e-16 + 1e-300
        if acc > err:
            return 1
        if acc < -err:
            return -1
        return 0

    def interval(self, prec: int = 128) -> tuple:
        """Enclosure (lo, hi) of the value as mpmath mpf endpoints."""
        iv = mpmath.iv
        old = iv.prec
        iv.prec = prec
        try:
            t = 2 * iv.cos(iv.pi / self.K.N)
            acc = iv.mpf(0)
            for c in reversed(self.num):
                acc = acc * t + c
            acc = acc / self.den
            lo, hi = acc._mpi_
            return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)
        finally:
            iv.prec = old

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        lo, hi = self.interval(80)
        return float(lo + (hi - lo) / 2)

    def approx(self, digits: int = 30) -> str:
        lo, hi = self.interval(int(digits * 3.4) + 40)
        with mpmath.workprec(int(digits * 3.4) + 40):
            return mpmath.nstr((lo + hi) / 2, digits)

    def to_fraction(self) -> Fraction:
        if any(self.num[1:]):
            raise ValueError("not rational")
        return Fraction(self.num[0], self.den)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def coefficients(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.num]

    def to_json(self) -> dict:
        return {
            "field_N": self.K.N,
            "coeffs": [f"{q.numerator}/{q.denominator}" for q in self.coefficients()],
            "approx": self.approx(20),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AlgReal":
        K = field(int(data["field_N"]))
        coeffs = [Fraction(s) for s in data["coeffs"]]
        den = reduce(_lcm, (q.denominator for q in coeffs), 1)
        return cls(K, [int(q * den) for q in coeffs], den)

    def __repr__(self) -> str:
        if self.is_rational():
            return f"AlgReal({self.to_fraction()})"
        return f"AlgReal(N={self.K.N}, {self.approx(12)})"


def _strip(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def cos_pi(m, K: CycloField | None = None) -> AlgReal:
    return AlgReal.cos_pi_over(m, K)


# -- modular inversion -------------------------------------------------------------
#
# u = a^-1 in Q[t]/(f) is computed modulo many word-size primes, combined by
# CRT and recovered by rational reconstruction; the candidate is accepted
# only after the exact check a * u == 1.


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIMES: list[int] = []


def _prime(i: int) -> int:
    while len(_PRIMES) <= i:
        c = (_PRIMES[-1] if _PRIMES else (1 << 61) + 1) - 2
        while not _is_prime(c):
            c -= 2
        _PRIMES.append(c)
    return _PRIMES[i]


def _inv_mod_p(a: list[int], f: Sequence[int], p: int) -> list[int] | None:
    """u with u * a = 1 mod (f, p), or None when a is not invertible mod p."""

    def strip(x):
        while x and x[-1] == 0:
            x.pop()
        return x

    r0 = [c % p for c in f]
    r1 = strip([c % p for c in a])
    s0: list[int] = []
    s1 = [1]
    while len(r1) > 1:
        # r0 = q * r1 + r
        r = r0[:]
        inv_lead = pow(r1[-1], -1, p)
        dr = len(r1) - 1
        q = [0] * (len(r) - dr)
        for k in range(len(r) - 1, dr - 1, -1):
            c = r[k] * inv_lead % p
            if c:
                q[k - dr] = c
                base = k - dr
                for i, b in enumerate(r1):
                    r[base + i] = (r[base + i] - c * b) % p
        r = strip(r[:dr])
        qs = [0] * (len(q) + len(s1) - 1)
        for i, x in enumerate(q):
            if x:
                for j, y in enumerate(s1):
                    qs[i + j] += x * y
        n = max(len(s0), len(qs))
        s2 = [((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p for i in range(n)]
        r0, r1 = r1, r
        s0, s1 = s1, strip(s2)
    if not r1:
        return None
    c = pow(r1[0], -1, p)
    return [x * c % p for x in s1]


def _ratrec(x: int, m: int) -> tuple[int, int] | None:
    """n/d = x mod m with |n|, d <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, x % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    if t1 < 0:
        r1, t1 = -r1, -t1
    if math.gcd(r1, t1) != 1:
        return None
    return r1, t1


def _modular_inverse(a: list[int], K: "CycloField") -> tuple[list[int], int]:
    """(num, den) with (num / den) * a = 1 in K, for integer coordinates a."""
    d = K.degree
    residues: list[int] | None = None
    modulus = 1
    last = None
    i = 0
    used = 0
    while True:
        p = _prime(i)
        i += 1
        u = _inv_mod_p(a, K.poly, p)
        if u is None:
            continue
        u = u + [0] * (d - len(u))
        if residues is None:
            residues, modulus = u, p
        else:
            inv_m = pow(modulus, -1, p)
            residues = [r + modulus * (((x - r) * inv_m) % p) for r, x in zip(residues, u)]
            modulus *= p
        used += 1
        if used & (used - 1):
            continue  # attempt reconstruction after 1, 2, 4, 8, ... primes
        fracs = []
        for r in residues:
            rr = _ratrec(r, modulus)
            if rr is None:
                break
            fracs.append(rr)
        else:
            den = 1
            for _, q in fracs:
                den = den * q // math.gcd(den, q)
            num = [n * (den // q) for n, q in fracs]
            cand = (num, den)
            if cand == last or used >= 2:
                prod = K.reduce(_poly_mul(a, num))
                if prod[0] == den and not any(prod[1:]):
                    return cand
            last = cand
