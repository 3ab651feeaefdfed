"""Exact scalars: rationals extended by square roots of square-free integers.

A :class:`RadScalar` is a finite sum ``sum_d q_d * sqrt(d)`` with rational
``q_d`` and square-free radicands ``d >= 1`` (``d == 1`` is the rational
part).  The set of radicands is open-ended; whatever the computation
produces is kept, and products are renormalised on the fly.

Rationals are ``gmpy2.mpq`` throughout.
"""

from __future__ import annotations

import math
from functools import lru_cache
from numbers import Rational as _AbcRational

from gmpy2 import mpq, mpz

Rational = type(mpq())

__all__ = [
    "Rational",
    "RadScalar",
    "reduce_radical",
    "sqrt_rational",
    "to_rational",
    "ZERO",
    "ONE",
    "ScalarMode",
    "EXACT",
    "float_mode",
]


def to_rational(x) -> Rational:
    """Coerce ints, Fractions, mpq and decimal strings such as ``"3/4"``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    if isinstance(x, _AbcRational):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@lru_cache(maxsize=4096)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=4096)
def reduce_radical(n: int) -> tuple[int, int]:
    """Write ``n = k**2 * d`` with ``d`` square-free; return ``(d, k)``."""
    n = int(n)
    if n < 1:
        raise ValueError(f"reduce_radical needs n >= 1, got {n}")
    d, k = 1, 1
    counts: dict[int, int] = {}
    for p in _prime_factors(n):
        counts[p] = counts.get(p, 0) + 1
    for p, e in counts.items():
        k *= p ** (e // 2)
        if e % 2:
            d *= p
    return d, k


def _mul_radicands(a: int, b: int) -> tuple[int, int]:
    # sqrt(a)*sqrt(b) = g*sqrt(a*b/g^2) when a, b are square-free
    g = math.gcd(a, b)
    return (a // g) * (b // g), g


class RadScalar:
    """Immutable element of Q(sqrt(d1), sqrt(d2), ...)."""

    __slots__ = ("_t", "_h")

    def __init__(self, terms=None):
        # trusted fast path: dict {squarefree d: nonzero mpq}
        self._t = terms if terms is not None else {}
        self._h = None

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "RadScalar":
        if isinstance(x, RadScalar):
            return x
        q = to_rational(x)
        return cls({1: q}) if q else cls()

    @classmethod
    def from_terms(cls, terms) -> "RadScalar":
        """Build from arbitrary ``{radicand: rational}`` pairs, normalising."""
        out: dict[int, Rational] = {}
        for d, q in dict(terms).items():
            q = to_rational(q)
            if not q:
                continue
            sf, k = reduce_radical(int(d))
            out[sf] = out.get(sf, mpq(0)) + q * k
        return cls({d: q for d, q in out.items() if q})

    @classmethod
    def sqrt(cls, x) -> "RadScalar":
        return sqrt_rational(x)

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[int, Rational]:
        return dict(self._t)

    def is_rational(self) -> bool:
        return not self._t or (len(self._t) == 1 and 1 in self._t)

    def rational_part(self) -> Rational:
        return self._t.get(1, mpq(0))

    def as_rational(self) -> Rational:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    def radicands(self) -> tuple[int, ...]:
        return tuple(sorted(self._t))

    def __bool__(self):
        return bool(self._t)

    def __float__(self):
        return float(sum((float(q) * math.sqrt(d) for d, q in self._t.items()), 0.0))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RadScalar):
            if isinstance(other, float):
                return float(self) + other
            try:
                other = RadScalar.coerce(other)
            except TypeError:
                return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for d, q in other._t.items():
            s = t.get(d)
            if s is None:
                t[d] = q
            else:
                s = s + q
                if s:
                    t[d] = s
                else:
                    del t[d]
        return RadScalar(t)

    __radd__ = __add__

    def __neg__(self):
        return RadScalar({d: -q for d, q in self._t.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, RadScalar):
            if isinstance(other, float):
                return float(self) - other
            try:
                other = RadScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        return RadScalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RadScalar):
            if isinstance(other, float):
                return float(self) * other
            try:
                q = to_rational(other)
            except TypeError:
                return NotImplemented
            if not q:
                return ZERO
            return RadScalar({d: c * q for d, c in self._t.items()})
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(b) == 1 and 1 in b:
            q = b[1]
            return RadScalar({d: c * q for d, c in a.items()})
        if len(a) == 1 and 1 in a:
            q = a[1]
            return RadScalar({d: c * q for d, c in b.items()})
        t: dict[int, Rational] = {}
        for d1, q1 in a.items():
            for d2, q2 in b.items():
                d, g = _mul_radicands(d1, d2)
                c = q1 * q2 * g
                s = t.get(d)
                t[d] = c if s is None else s + c
        return RadScalar({d: q for d, q in t.items() if q})

    __rmul__ = __mul__

    def conjugate_at(self, p: int) -> "RadScalar":
        """Galois conjugate sending sqrt(p) -> -sqrt(p) for a prime ``p``."""
        return RadScalar({d: (-q if d % p == 0 else q) for d, q in self._t.items()})

    def invert(self) -> "RadScalar":
        """Multiplicative inverse by rationalising one prime radical at a time."""
        if not self._t:
            raise ZeroDivisionError("RadScalar division by zero")
        num = ONE
        den = self
        while not den.is_rational():
            p = min(
                pr for d in den._t if d != 1 for pr in _prime_factors(d)
            )
            conj = den.conjugate_at(p)
            num = num * conj
            den = den * conj
        q = den.rational_part()
        if not q:
            # cannot happen for a nonzero element of a real radical field
            raise ZeroDivisionError("norm vanished during rationalisation")
        return num * (1 / q)

    def __truediv__(self, other):
        if not isinstance(other, RadScalar):
            if isinstance(other, float):
                return float(self) / other
            q = to_rational(other)
            if not q:
                raise ZeroDivisionError("RadScalar division by zero")
            return RadScalar({d: c / q for d, c in self._t.items()})
        if other.is_rational():
            return self / other.rational_part()
        return self * other.invert()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return RadScalar.coerce(other) * self.invert()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.invert() ** (-e)
        out, base = ONE, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RadScalar):
            return self._t == other._t
        if isinstance(other, float):
            return float(self) == other
        try:
            q = to_rational(other)
        except TypeError:
            return NotImplemented
        if not q:
            return not self._t
        return len(self._t) == 1 and self._t.get(1) == q

    def __hash__(self):
        if self._h is None:
            if self.is_rational():
                self._h = hash(self.rational_part())
            else:
                self._h = hash(frozenset(self._t.items()))
        return self._h

    def sign(self) -> int:
        """Exact sign via interval refinement on mpmath; rare path."""
        if not self._t:
            return 0
        if self.is_rational():
            q = self.rational_part()
            return 1 if q > 0 else -1
        import mpmath

        prec = 64
        while True:
            with mpmath.workprec(prec):
                v = mpmath.fsum(
                    mpmath.mpf(int(q.numerator)) / int(q.denominator) * mpmath.sqrt(d)
                    for d, q in self._t.items()
                )
                if abs(v) > mpmath.mpf(2) ** (-prec // 2):
                    return 1 if v > 0 else -1
            prec *= 2

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # display ------------------------------------------------------------
    def __repr__(self):
        return f"RadScalar({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for d in sorted(self._t):
            q = self._t[d]
            if d == 1:
                parts.append(str(q))
            elif q == 1:
                parts.append(f"sqrt({d})")
            elif q == -1:
                parts.append(f"-sqrt({d})")
            else:
                parts.append(f"{q}*sqrt({d})")
        return " + ".join(parts).replace("+ -", "- ")

    # JSON -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "terms": [
                {"rad": d, "num": str(q.numerator), "den": str(q.denominator)}
                for d, q in sorted(self._t.items())
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "RadScalar":
        if isinstance(obj, (int, str)):
            return cls.coerce(obj)
        try:
            terms = obj["terms"]
            return cls.from_terms(
                {
                    int(t["rad"]): mpq(int(t["num"]), int(t.get("den", "1")))
                    for t in terms
                }
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed scalar JSON: {obj!r}") from exc


ZERO = RadScalar()
ONE = RadScalar({1: mpq(1)})


def sqrt_rational(x) -> RadScalar:
    """Exact square root of a non-negative rational (or RadScalar that is rational)."""
    if isinstance(x, RadScalar):
        x = x.as_rational()
    q = to_rational(x)
    if q < 0:
        raise ValueError("square root of a negative rational")
    if not q:
        return ZERO
    # sqrt(p/r) = sqrt(p*r)/r
    p, r = int(q.numerator), int(q.denominator)
    d, k = reduce_radical(p * r)
    return RadScalar({d: mpq(k, r)})


class ScalarMode:
    """Arithmetic backend: exact RadScalar (default) or binary64 with a tolerance."""

    def __init__(self, exact: bool = True, tol: float = 1e-9):
        if not exact and not tol > 0:
            raise ValueError("float mode needs a positive tolerance")
        self.exact = exact
        self.tol = tol

    @property
    def zero(self):
        return ZERO if self.exact else 0.0

    @property
    def one(self):
        return ONE if self.exact else 1.0

    def coerce(self, x):
        if self.exact:
            return RadScalar.coerce(x)
        return float(x)

    def sqrt(self, q):
        """Square root of a non-negative rational (or int)."""
        if self.exact:
            return sqrt_rational(q)
        return math.sqrt(float(q))

    def is_zero(self, x) -> bool:
        if self.exact:
            return not x
        return abs(float(x)) <= self.tol

    def __repr__(self):
        return "ScalarMode(exact)" if self.exact else f"ScalarMode(float, tol={self.tol})"


EXACT = ScalarMode()


def float_mode(tol: float = 1e-9) -> ScalarMode:
    return ScalarMode(exact=False, tol=tol)
