"""Exact univariate arithmetic over Z[q] and its fraction field.

Polynomials are immutable tuples of Python ints in ascending degree order.
Rational functions are kept in a canonical reduced form: numerator and
denominator have no common polynomial factor, the gcd of all integer
coefficients of numerator and denominator combined is 1, and the leading
coefficient of the denominator is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class ZeroDenominatorError(ZeroDivisionError):
    """Raised when a rational function would have a zero denominator."""


def _trim(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class IntPoly:
    """Dense polynomial with integer coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = _trim([int(c) for c in coeffs])
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    @staticmethod
    def const(c: int) -> "IntPoly":
        return IntPoly((c,))

    @staticmethod
    def monomial(k: int, c: int = 1) -> "IntPoly":
        if k < 0:
            raise ValueError("negative exponent")
        return IntPoly((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def constant(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return IntPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return IntPoly.const(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return IntPoly()
            return IntPoly(tuple(other * c for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = IntPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "IntPoly":
        """Multiply by q**k."""
        if self.is_zero():
            return self
        return IntPoly((0,) * k + self.coeffs)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPoly":
        """Divide out the content; sign chosen so the leading coefficient is positive."""
        if self.is_zero():
            return self
        g = self.content()
        if self.leading() < 0:
            g = -g
        return IntPoly(tuple(c // g for c in self.coeffs))

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1))

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def reversed_coeffs(self) -> "IntPoly":
        """Coefficient reversal: q**deg * p(1/q)."""
        return IntPoly(tuple(reversed(self.coeffs)))

    def is_palindromic(self) -> bool:
        return bool(self.coeffs) and self.coeffs == tuple(reversed(self.coeffs))

    def valuation(self) -> int:
        """Exponent of the lowest nonzero term (0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def divexact_unit(self, d: "IntPoly") -> "IntPoly":
        """Exact division by d when d has constant term +1 or -1.

        Works from the low end so every step stays in Z; raises if the
        division is not exact.
        """
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        d0 = d.coeffs[0]
        if d0 not in (1, -1):
            return self.divexact(d)
        if self.is_zero():
            return IntPoly()
        nq = self.degree - d.degree
        if nq < 0:
            raise ArithmeticError("inexact polynomial division")
        rem = list(self.coeffs) + [0] * max(0, d.degree + nq + 1 - len(self.coeffs))
        dc = d.coeffs
        out = [0] * (nq + 1)
        for i in range(nq + 1):
            c = rem[i]
            if c:
                t = c * d0  # d0 is +-1
                out[i] = t
                for j, dj in enumerate(dc):
                    rem[i + j] -= t * dj
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return IntPoly(out)

    def divexact(self, d: "IntPoly") -> "IntPoly":
        """Exact division over Z; raises ArithmeticError when not exact."""
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return IntPoly()
        rem = [Fraction(c) for c in self.coeffs]
        dc = d.coeffs
        dn = len(dc)
        lead = Fraction(dc[-1])
        nq = len(rem) - dn
        if nq < 0:
            raise ArithmeticError("inexact polynomial division")
        out = [Fraction(0)] * (nq + 1)
        for i in range(nq, -1, -1):
            c = rem[i + dn - 1]
            if c:
                t = c / lead
                out[i] = t
                for j in range(dn):
                    rem[i + j] -= t * dc[j]
        if any(rem) or any(f.denominator != 1 for f in out):
            raise ArithmeticError("inexact polynomial division")
        return IntPoly(tuple(int(f) for f in out))

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)!r})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                q = "q" if i == 1 else f"q^{i}"
                if c == 1:
                    parts.append(q)
                elif c == -1:
                    parts.append(f"-{q}")
                else:
                    parts.append(f"{c}{q}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


ZERO = IntPoly()
ONE = IntPoly((1,))
Q = IntPoly((0, 1))


def _prem(a: IntPoly, b: IntPoly) -> IntPoly:
    """Pseudo-remainder: lc(b)**(dega-degb+1) * a mod b, computed over Z."""
    r = list(a.coeffs)
    dc = b.coeffs
    dn = len(dc)
    lead = dc[-1]
    steps = len(r) - dn
    if steps < 0:
        return a
    for i in range(steps, -1, -1):
        top = r[i + dn - 1]
        for j in range(len(r)):
            r[j] *= lead
        for j in range(dn):
            r[i + j] -= top * dc[j]
    return IntPoly(_trim(r))


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Greatest common divisor in Z[q] (primitive part via a primitive
    remainder sequence, integer content by gcd), positive leading coefficient."""
    if a.is_zero():
        return b.primitive() * b.content() if not b.is_zero() else IntPoly()
    if b.is_zero():
        return a.primitive() * a.content()
    ca, cb = a.content(), b.content()
    c = math.gcd(ca, cb)
    f, g = a.primitive(), b.primitive()
    if f.degree < g.degree:
        f, g = g, f
    while not g.is_zero():
        r = _prem(f, g).primitive()
        f, g = g, r
    return f.primitive() * c


@dataclass(frozen=True)
class RatFunc:
    """Rational function over Z[q] in canonical reduced form."""

    num: IntPoly
    den: IntPoly

    @staticmethod
    def of(num, den=ONE) -> "RatFunc":
        if isinstance(num, int):
            num = IntPoly.const(num)
        if isinstance(den, int):
            den = IntPoly.const(den)
        return reduce_fraction(num, den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        if isinstance(other, int):
            other = RatFunc.of(other)
        return reduce_fraction(self.num * other.den + other.num * self.den,
                               self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        if isinstance(other, int):
            other = RatFunc.of(other)
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc.of(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            other = RatFunc.of(other)
        return reduce_fraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = RatFunc.of(other)
        return reduce_fraction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.of(other) / self

    def evaluate(self, x):
        den = self.den.evaluate(x)
        if den == 0:
            raise ZeroDivisionError("pole of rational function")
        num = self.num.evaluate(x)
        if isinstance(num, int) and isinstance(den, int):
            return Fraction(num, den)
        return num / den

    def degree_gap(self) -> int:
        """deg(den) - deg(num); the zero function has no meaningful gap."""
        return self.den.degree - self.num.degree

    def __str__(self):
        return f"({self.num}) / ({self.den})"


RAT_ZERO = RatFunc(ZERO, ONE)
RAT_ONE = RatFunc(ONE, ONE)


def reduce_fraction(num: IntPoly, den: IntPoly) -> RatFunc:
    """Canonical reduced form of num/den.

    The polynomial gcd (including integer content) is divided out, then the
    sign is fixed so the denominator has a positive leading coefficient.
    The combined integer content of the result is 1.
    """
    if den.is_zero():
        raise ZeroDenominatorError("zero denominator")
    if num.is_zero():
        return RatFunc(ZERO, ONE)
    g = poly_gcd(num, den)
    num = num.divexact(g)
    den = den.divexact(g)
    if den.leading() < 0:
        num, den = -num, -den
    return RatFunc(num, den)


@dataclass(frozen=True)
class PowerSeriesPrefix:
    """Initial coefficients of a power series expansion.

    ``integral`` is True when every coefficient is an integer (always the
    case when the denominator has constant term +-1).
    """

    coeffs: tuple
    order: int
    integral: bool

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)


def series_expand(f: RatFunc, order: int) -> PowerSeriesPrefix:
    """Coefficients of f through q**order (order+1 of them), exactly."""
    if order < 0:
        raise ValueError("order must be >= 0")
    d0 = f.den.constant()
    if d0 == 0:
        raise ZeroDenominatorError("denominator vanishes at q=0")
    nc, dc = f.num.coeffs, f.den.coeffs
    if d0 in (1, -1):
        out = []
        for i in range(order + 1):
            acc = nc[i] if i < len(nc) else 0
            for j in range(1, min(i, len(dc) - 1) + 1):
                acc -= dc[j] * out[i - j]
            out.append(acc * d0)
        return PowerSeriesPrefix(tuple(out), order, True)
    out = []
    for i in range(order + 1):
        acc = Fraction(nc[i] if i < len(nc) else 0)
        for j in range(1, min(i, len(dc) - 1) + 1):
            acc -= dc[j] * out[i - j]
        out.append(acc / d0)
    if all(c.denominator == 1 for c in out):
        return PowerSeriesPrefix(tuple(int(c) for c in out), order, True)
    return PowerSeriesPrefix(tuple(out), order, False)


def euler_phi(k: int) -> int:
    n, result, p = k, k, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


_CYCLOTOMIC_CACHE: dict = {}


def cyclotomic(k: int) -> IntPoly:
    """The k-th cyclotomic polynomial, by exact division of q**k - 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    got = _CYCLOTOMIC_CACHE.get(k)
    if got is not None:
        return got
    p = IntPoly.monomial(k) - ONE
    for d in range(1, k):
        if k % d == 0:
            p = p.divexact(cyclotomic(d))
    _CYCLOTOMIC_CACHE[k] = p
    return p


def cyclotomic_factor(p: IntPoly):
    """Split off all cyclotomic factors of p.

    Returns (factors, remainder) with factors a tuple of (k, multiplicity)
    pairs sorted by k; only k with phi(k) <= deg p can divide, so the search
    is finite.
    """
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    rem = p
    factors = []
    deg = p.degree
    k = 1
    # phi(k) >= sqrt(k/2) for all k, so k <= 2*deg**2 bounds the search.
    while k <= max(1, 2 * deg * deg):
        if euler_phi(k) <= rem.degree:
            phi_k = cyclotomic(k)
            mult = 0
            while True:
                try:
                    nxt = rem.divexact(phi_k)
                except ArithmeticError:
                    break
                rem = nxt
                mult += 1
            if mult:
                factors.append((k, mult))
        k += 1
        if rem.degree == 0 and k > deg + 1:
            break
    return tuple(factors), rem


def is_denominator_cyclotomic(den: IntPoly):
    """True when den is +-1 times a product of cyclotomics without Phi_1."""
    factors, rem = cyclotomic_factor(den)
    ok = rem.degree == 0 and abs(rem.constant()) == 1
    no_phi1 = all(k != 1 for k, _ in factors)
    return ok and no_phi1, factors


def q_number(n: int) -> IntPoly:
    """[n]_q = 1 + q + ... + q**(n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return IntPoly((1,) * n)


def q_factorial_products(ns) -> IntPoly:
    """Product of q-integers [n]_q over the given exponents."""
    out = ONE
    for n in ns:
        out = out * q_number(n)
    return out


def check_palindromic(p: IntPoly) -> bool:
    return p.is_palindromic()


def reverse_substitute(f: RatFunc) -> RatFunc:
    """The substitution q -> 1/q, cleared of negative powers and reduced.

    For the magnitude of an arrangement with n hyperplanes the result equals
    q**n times the input; the structural checks assert exactly that.
    """
    rn = f.num.reversed_coeffs()
    rd = f.den.reversed_coeffs()
    e = f.den.degree - f.num.degree
    if e >= 0:
        return reduce_fraction(rn.shift(e), rd)
    return reduce_fraction(rn, rd.shift(-e))
