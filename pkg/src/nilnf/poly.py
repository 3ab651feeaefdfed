"""Graded multivariate polynomials with the Fischer inner products.

Exponent vectors are tuples of length ``n``; variables are indexed from 0.
Coefficients are :class:`~nilnf.scalar.RadScalar` in exact mode or ``float``
in float mode.  Homogeneous slices are enumerated in graded-lex order
(lexicographically descending within a degree), which every module uses for
matrix assembly.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial

from gmpy2 import mpq

from .scalar import ONE, ZERO, RadScalar, to_rational

__all__ = [
    "Poly",
    "monomials",
    "alpha_factorial",
    "normalized_weight",
    "fischer_inner",
    "normalized_inner",
    "norm_sq",
    "derive",
    "multiply",
    "act_linear_field",
    "dim_homogeneous",
]


def _coerce(c):
    if isinstance(c, (RadScalar, float)):
        return c
    return RadScalar.coerce(c)


@lru_cache(maxsize=None)
def monomials(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of degree ``k`` in ``n`` variables, graded-lex."""
    if n == 0:
        return ((),) if k == 0 else ()
    out = []
    for combo in combinations_with_replacement(range(n), k):
        a = [0] * n
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    out.sort(reverse=True)
    return tuple(out)


def dim_homogeneous(n: int, k: int) -> int:
    return comb(k + n - 1, n - 1)


@lru_cache(maxsize=None)
def alpha_factorial(alpha: tuple[int, ...]) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


@lru_cache(maxsize=None)
def normalized_weight(alpha: tuple[int, ...]):
    """``alpha! / |alpha|!``, the weight of ``x^alpha`` in the normalized product."""
    return mpq(alpha_factorial(alpha), factorial(sum(alpha)))


class Poly:
    """Sparse polynomial ``sum c_alpha x^alpha`` in ``n`` variables.

    Treat instances as immutable.
    """

    __slots__ = ("n", "_t")

    def __init__(self, n: int, terms=None, _trusted: bool = False):
        self.n = n
        if terms is None:
            self._t = {}
        elif _trusted:
            self._t = terms
        else:
            t = {}
            for a, c in dict(terms).items():
                a = tuple(int(e) for e in a)
                if len(a) != n or min(a, default=0) < 0:
                    raise ValueError(f"bad exponent {a} for n={n}")
                c = _coerce(c)
                if c:
                    t[a] = t[a] + c if a in t else c
            self._t = {a: c for a, c in t.items() if c}

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n, {}, True)

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        c = _coerce(c)
        return cls(n, {(0,) * n: c} if c else {}, True)

    @classmethod
    def var(cls, n: int, i: int, coeff=ONE) -> "Poly":
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        a = [0] * n
        a[i] = 1
        return cls(n, {tuple(a): _coerce(coeff)}, True)

    @classmethod
    def monomial(cls, alpha, coeff=ONE) -> "Poly":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: coeff})

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return self._t

    def items(self):
        return self._t.items()

    def coeff(self, alpha):
        return self._t.get(tuple(alpha), ZERO)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(a) for a in self._t), default=-1)

    def order(self) -> int:
        """Lowest total degree present; ``-1`` for zero."""
        return min((sum(a) for a in self._t), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = {sum(a) for a in self._t}
        if not degs:
            return True
        return len(degs) == 1 and (k is None or degs == {k})

    def homogeneous(self, k: int) -> "Poly":
        return Poly(self.n, {a: c for a, c in self._t.items() if sum(a) == k}, True)

    def slices(self) -> dict[int, "Poly"]:
        out: dict[int, dict] = {}
        for a, c in self._t.items():
            out.setdefault(sum(a), {})[a] = c
        return {k: Poly(self.n, t, True) for k, t in sorted(out.items())}

    def truncate(self, m: int) -> "Poly":
        """Jet of order ``m``: keep terms of degree ``<= m``."""
        return Poly(self.n, {a: c for a, c in self._t.items() if sum(a) <= m}, True)

    def drop_below(self, m: int) -> "Poly":
        return Poly(self.n, {a: c for a, c in self._t.items() if sum(a) >= m}, True)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Poly"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        self._check(other)
        if not other._t:
            return self
        t = dict(self._t)
        for a, c in other._t.items():
            s = t.get(a)
            if s is None:
                t[a] = c
            else:
                s = s + c
                if s:
                    t[a] = s
                else:
                    del t[a]
        return Poly(self.n, t, True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {a: -c for a, c in self._t.items()}, True)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(self.n, other) - self

    def scale(self, s) -> "Poly":
        if not isinstance(s, float):
            s = _coerce(s)
        if not s:
            return Poly.zero(self.n)
        t = {}
        for a, c in self._t.items():
            v = c * s
            if v:
                t[a] = v
        return Poly(self.n, t, True)

    def mul(self, other: "Poly", max_deg: int | None = None) -> "Poly":
        self._check(other)
        if not self._t or not other._t:
            return Poly.zero(self.n)
        t: dict = {}
        if max_deg is None:
            for a, c in self._t.items():
                for b, d in other._t.items():
                    e = tuple(x + y for x, y in zip(a, b))
                    v = c * d
                    s = t.get(e)
                    t[e] = v if s is None else s + v
        else:
            odeg = [(b, d, sum(b)) for b, d in other._t.items()]
            for a, c in self._t.items():
                room = max_deg - sum(a)
                if room < 0:
                    continue
                for b, d, db in odeg:
                    if db > room:
                        continue
                    e = tuple(x + y for x, y in zip(a, b))
                    v = c * d
                    s = t.get(e)
                    t[e] = v if s is None else s + v
        return Poly(self.n, {e: v for e, v in t.items() if v}, True)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(self.n, 1)
        for _ in range(e):
            out = out * self
        return out

    def derive(self, j: int) -> "Poly":
        if not 0 <= j < self.n:
            raise IndexError(f"variable index {j} out of range for n={self.n}")
        t = {}
        for a, c in self._t.items():
            e = a[j]
            if e:
                b = a[:j] + (e - 1,) + a[j + 1 :]
                t[b] = c * e
        return Poly(self.n, t, True)

    def gradient(self) -> list["Poly"]:
        return [self.derive(j) for j in range(self.n)]

    def compose(self, subs: list["Poly"], max_deg: int) -> "Poly":
        """Truncated composition ``self(subs[0], ..., subs[n-1])``.

        Every substituted polynomial must vanish at the origin; the result is
        truncated at degree ``max_deg``.
        """
        if len(subs) != self.n:
            raise ValueError("need one substitution per variable")
        m = subs[0].n if subs else self.n
        cache: dict[tuple, Poly] = {(0,) * self.n: Poly.const(m, 1)}

        def power(alpha):
            hit = cache.get(alpha)
            if hit is not None:
                return hit
            i = max(k for k, e in enumerate(alpha) if e)
            prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1 :]
            out = power(prev).mul(subs[i], max_deg)
            cache[alpha] = out
            return out

        acc: dict = {}
        for a, c in sorted(self._t.items(), key=lambda kv: sum(kv[0])):
            if sum(a) > max_deg:
                continue
            for e, v in power(a)._t.items():
                w = v * c
                s = acc.get(e)
                acc[e] = w if s is None else s + w
        return Poly(m, {e: v for e, v in acc.items() if v}, True)

    # comparison / conversion ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self._t == other._t
        if other == 0:
            return not self._t
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self._t.items())))

    def to_float(self) -> "Poly":
        return Poly(self.n, {a: float(c) for a, c in self._t.items()}, True)

    def chop(self, tol: float) -> "Poly":
        return Poly(self.n, {a: c for a, c in self._t.items() if abs(c) > tol}, True)

    def __repr__(self):
        return f"Poly({self.n}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        names = _var_names(self.n)
        parts = []
        for a in sorted(self._t, key=lambda a: (-sum(a), tuple(-e for e in a))):
            c = self._t[a]
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(a) if e
            )
            cs = str(c)
            if not mono:
                parts.append(f"({cs})")
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    # JSON -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {
                    "alpha": list(a),
                    "coeff": c if isinstance(c, float) else c.to_json(),
                }
                for a, c in sorted(self._t.items(), reverse=True)
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "Poly":
        try:
            n = int(obj["n"])
            terms = {}
            for t in obj["terms"]:
                c = t["coeff"]
                c = float(c) if isinstance(c, float) else RadScalar.from_json(c)
                a = tuple(int(e) for e in t["alpha"])
                terms[a] = terms.get(a, ZERO) + c
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from exc
        return cls(n, terms)


def _var_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def _homog_degree(f: Poly, g: Poly, delta: int | None) -> int:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")
    for p in (f, g):
        if not p.is_homogeneous(delta):
            raise ValueError("inner product needs homogeneous input of the stated degree")
    if delta is None:
        delta = max(f.degree(), g.degree(), 0)
    return delta


def fischer_inner(f: Poly, g: Poly, delta: int | None = None):
    """Fischer (Belitskii) product ``sum a_alpha c_alpha alpha!`` on P_delta."""
    _homog_degree(f, g, delta)
    s = ZERO
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    for a, c in small.items():
        d = big.terms.get(a)
        if d is not None:
            s = s + c * d * alpha_factorial(a)
    return s


def _weight(a, c):
    w = normalized_weight(a)
    return float(w) if isinstance(c, float) else w


def normalized_inner(f: Poly, g: Poly, delta: int | None = None):
    """Normalized product ``sum a_alpha c_alpha alpha!/|alpha|!`` on P_delta."""
    _homog_degree(f, g, delta)
    return inner_any(f, g)


def inner_any(f: Poly, g: Poly):
    """Normalized product extended to non-homogeneous input (slices orthogonal)."""
    s = ZERO
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    for a, c in small.items():
        d = big.terms.get(a)
        if d is not None:
            s = s + c * d * _weight(a, c)
    return s


def norm_sq(f: Poly):
    """Full-series squared norm ``sum_k ||f_k||_k^2``."""
    s = ZERO
    for a, c in f.items():
        s = s + c * c * _weight(a, c)
    return s


def derive(f: Poly, j: int) -> Poly:
    return f.derive(j)


def multiply(f: Poly, g: Poly) -> Poly:
    return f * g


def act_derivation(components, f: Poly, max_deg: int | None = None) -> Poly:
    """Lie derivative ``sum_i components[i] * df/dx_i`` along a field."""
    out = Poly.zero(f.n)
    for i, ci in enumerate(components):
        if ci:
            d = f.derive(i)
            if d:
                out = out + ci.mul(d, max_deg)
    return out


def act_linear_field(F, f: Poly) -> Poly:
    """Apply a (linear) vector field ``F`` to ``f`` as a derivation."""
    comps = getattr(F, "components", F)
    if len(comps) != f.n:
        raise ValueError("dimension mismatch")
    return act_derivation(comps, f)


def random_poly(rng, n: int, degrees, coeff_range: int = 3, density: float = 1.0) -> Poly:
    """Random polynomial with small integer coefficients in the given degrees."""
    t = {}
    for k in degrees:
        for a in monomials(n, k):
            if rng.random() <= density:
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    t[a] = to_rational(c)
    return Poly(n, t)
