"""Polynomial vector fields, Lie brackets, truncated conjugacy and r-norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .poly import Poly, act_derivation, inner_any, monomials, norm_sq
from .scalar import ZERO, RadScalar, sqrt_rational, to_rational

__all__ = [
    "VectorField",
    "RNorm",
    "lie_bracket",
    "truncate",
    "rnorm",
    "c_delta",
    "c_delta_enumerated",
    "jacobian_rnorm",
    "conjugate_truncated",
    "pushforward_truncated",
    "inverse_map",
    "compose_maps",
]


class VectorField:
    """``sum_i components[i] * d/dx_i`` with polynomial components."""

    __slots__ = ("n", "components")

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = comps[0].n
        if len(comps) != n or any(c.n != n for c in comps):
            raise ValueError("components must be n polynomials in n variables")
        self.n = n
        self.components = comps

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls([Poly.zero(n)] * n)

    @classmethod
    def linear(cls, matrix) -> "VectorField":
        """Linear field ``x -> M x``: component ``i`` is ``sum_j M[i][j] x_j``."""
        n = len(matrix)
        comps = []
        for i in range(n):
            t = {}
            for j in range(n):
                if matrix[i][j]:
                    a = [0] * n
                    a[j] = 1
                    t[tuple(a)] = matrix[i][j]
            comps.append(Poly(n, t))
        return cls(comps)

    @classmethod
    def from_sparse(cls, n: int, vec: dict) -> "VectorField":
        """Inverse of :meth:`to_sparse`; keys are ``(alpha, i)``."""
        parts: list[dict] = [{} for _ in range(n)]
        for (a, i), c in vec.items():
            if c:
                parts[i][a] = c
        return cls([Poly(n, p, True) for p in parts])

    @classmethod
    def basis_element(cls, alpha, i: int, coeff=1) -> "VectorField":
        n = len(alpha)
        comps = [Poly.zero(n)] * n
        comps = list(comps)
        comps[i] = Poly.monomial(alpha, coeff)
        return cls(comps)

    # inspection ---------------------------------------------------------
    def to_sparse(self) -> dict:
        out = {}
        for i, p in enumerate(self.components):
            for a, c in p.items():
                out[(a, i)] = c
        return out

    def __getitem__(self, i) -> Poly:
        return self.components[i]

    def is_zero(self) -> bool:
        return not any(self.components)

    def __bool__(self):
        return not self.is_zero()

    def degree(self) -> int:
        return max(p.degree() for p in self.components)

    def order(self) -> int:
        ords = [p.order() for p in self.components if p]
        return min(ords) if ords else -1

    def homogeneous(self, k: int) -> "VectorField":
        return VectorField([p.homogeneous(k) for p in self.components])

    def slices(self) -> dict[int, "VectorField"]:
        degs = sorted({sum(a) for p in self.components for a in p.terms})
        return {k: self.homogeneous(k) for k in degs}

    def truncate(self, m: int) -> "VectorField":
        return VectorField([p.truncate(m) for p in self.components])

    def drop_below(self, m: int) -> "VectorField":
        return VectorField([p.drop_below(m) for p in self.components])

    def window(self, lo: int, hi: int) -> "VectorField":
        return self.drop_below(lo).truncate(hi)

    def linear_matrix(self) -> list[list]:
        """Matrix of the linear part (row ``i``: coefficients of component ``i``)."""
        n = self.n
        M = [[ZERO] * n for _ in range(n)]
        for i, p in enumerate(self.components):
            for a, c in p.items():
                if sum(a) == 1:
                    M[i][a.index(1)] = c
        return M

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "VectorField"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField([-a for a in self.components])

    def scale(self, s) -> "VectorField":
        return VectorField([a.scale(s) for a in self.components])

    def times_poly(self, f: Poly, max_deg: int | None = None) -> "VectorField":
        """The field ``f * self``."""
        return VectorField([f.mul(a, max_deg) for a in self.components])

    def __mul__(self, s):
        if isinstance(s, Poly):
            return self.times_poly(s)
        return self.scale(s)

    def __rmul__(self, s):
        return self.__mul__(s)

    def apply(self, f: Poly, max_deg: int | None = None) -> Poly:
        """Lie derivative of ``f`` along this field."""
        if f.n != self.n:
            raise ValueError("dimension mismatch")
        return act_derivation(self.components, f, max_deg)

    def jacobian_apply(self, W: "VectorField", max_deg: int | None = None) -> "VectorField":
        """``DV . W`` where ``V`` is this field."""
        self._check(W)
        return VectorField([W.apply(p, max_deg) for p in self.components])

    def compose(self, U: "VectorField", max_deg: int) -> "VectorField":
        """Truncated ``V o (id + U)``."""
        self._check(U)
        n = self.n
        subs = [Poly.var(n, j) + U.components[j] for j in range(n)]
        return VectorField([p.compose(subs, max_deg) for p in self.components])

    # inner products -------------------------------------------------------
    def inner(self, other: "VectorField"):
        """Normalized Fischer product summed over components (all degrees)."""
        self._check(other)
        s = ZERO
        for a, b in zip(self.components, other.components):
            s = s + inner_any(a, b)
        return s

    def norm_sq(self):
        s = ZERO
        for a in self.components:
            s = s + norm_sq(a)
        return s

    # comparison / conversion ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, VectorField):
            return self.n == other.n and self.components == other.components
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(self.components)

    def to_float(self) -> "VectorField":
        return VectorField([p.to_float() for p in self.components])

    def __repr__(self):
        return f"VectorField({self})"

    def __str__(self):
        names = ["x", "y", "z"] if self.n <= 3 else [f"x{i + 1}" for i in range(self.n)]
        parts = [f"({p})*d/d{names[i]}" for i, p in enumerate(self.components) if p]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"n": self.n, "components": [p.to_json() for p in self.components]}

    @classmethod
    def from_json(cls, obj) -> "VectorField":
        try:
            n = int(obj["n"])
            comps = [Poly.from_json(c) for c in obj["components"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed vector field JSON: {exc}") from exc
        if len(comps) != n:
            raise ValueError(f"expected {n} components, got {len(comps)}")
        return cls(comps)


def lie_bracket(V: VectorField, W: VectorField, max_deg: int | None = None) -> VectorField:
    """``[V, W] = DW.V - DV.W``; as derivations, ``V(W(f)) - W(V(f))``."""
    V._check(W)
    return VectorField(
        [V.apply(w, max_deg) - W.apply(v, max_deg) for v, w in zip(V.components, W.components)]
    )


def truncate(V: VectorField, m: int) -> VectorField:
    return V.truncate(m)


# ---------------------------------------------------------------------------
# analytic norms


def c_delta(n: int, delta: int) -> RadScalar:
    """``c_delta = n^(delta/2)``, exact."""
    return sqrt_rational(mpq(n) ** delta)


def c_delta_enumerated(n: int, delta: int) -> RadScalar:
    """``(sum_{|Q|=delta} |Q|!/Q!)^(1/2)`` by enumeration over all multi-indices."""
    total = 0
    for q in monomials(n, delta):
        m = math.factorial(delta)
        for e in q:
            m //= math.factorial(e)
        total += m
    return sqrt_rational(total)


@dataclass(frozen=True)
class RNorm:
    """``|f|_r = sum_delta ||f_delta|| c_delta r^delta``.

    ``value`` is always a float; ``exact`` is filled in when every slice norm
    is a square root of a rational, which keeps the sum inside RadScalar.
    """

    value: float
    radius: object
    slice_norm_sq: dict = field(default_factory=dict)
    exact: RadScalar | None = None

    def __float__(self):
        return self.value


def _slice_norms_sq(obj) -> dict[int, object]:
    if isinstance(obj, VectorField):
        out: dict[int, object] = {}
        for p in obj.components:
            for k, s in p.slices().items():
                out[k] = out.get(k, ZERO) + norm_sq(s)
        return dict(sorted(out.items()))
    return {k: norm_sq(s) for k, s in obj.slices().items()}


def rnorm(obj, r) -> RNorm:
    """r-norm of a polynomial or vector field (vector slices via the summed product)."""
    if isinstance(r, float):
        rr = r
        r_exact = None
    else:
        r_exact = to_rational(r)
        rr = float(r_exact)
    if rr <= 0:
        raise ValueError("radius must be positive")
    n = obj.n
    sq = _slice_norms_sq(obj)
    value = 0.0
    exact = ZERO if r_exact is not None else None
    for k, s in sq.items():
        value += math.sqrt(float(s)) * n ** (k / 2) * rr**k
        if exact is not None:
            if isinstance(s, RadScalar) and s.is_rational():
                exact = exact + sqrt_rational(s) * c_delta(n, k) * r_exact**k
            else:
                exact = None
    return RNorm(value=value, radius=r if r_exact is None else r_exact, slice_norm_sq=sq, exact=exact)


def jacobian_rnorm(V: VectorField, r) -> float:
    """``|DV|_r`` taken as the sum over ``j`` of ``|dV/dx_j|_r``."""
    total = 0.0
    for j in range(V.n):
        col = VectorField([p.derive(j) for p in V.components])
        total += rnorm(col, r).value
    return total


# ---------------------------------------------------------------------------
# conjugacy


def _check_tangent(U: VectorField):
    for p in U.components:
        for a in p.terms:
            if sum(a) < 2:
                raise ValueError("transformation generator must have order >= 2")


def conjugate_truncated(V: VectorField, U: VectorField, order: int) -> VectorField:
    """``J^order`` of ``Phi_* V`` where ``Phi^{-1} = id + U``.

    Solves ``(I + DU) W = V o (id + U)`` degree by degree: ``DU`` raises degree,
    so ``W_k`` only needs ``W_j`` for ``j < k``.
    """
    V._check(U)
    _check_tangent(U)
    if U.is_zero():
        return V.truncate(order)
    G = V.truncate(order).compose(U, order)
    n = V.n
    acc = VectorField.zero(n)
    W = VectorField.zero(n)
    for k in range(0, order + 1):
        Wk = G.homogeneous(k) - acc.homogeneous(k)
        if Wk:
            W = W + Wk
            acc = acc + U.jacobian_apply(Wk, order)
    return W


def inverse_map(U: VectorField, order: int) -> VectorField:
    """``G`` with ``(id + U) o (id + G) = id`` up to ``order``."""
    _check_tangent(U)
    G = -U.truncate(order)
    for _ in range(order):
        nxt = -(U.truncate(order).compose(G, order))
        if nxt == G:
            break
        G = nxt
    return G


def compose_maps(U1: VectorField, U2: VectorField, order: int) -> VectorField:
    """Generator of ``(id + U1) o (id + U2)``, truncated."""
    return (U2 + U1.compose(U2, order)).truncate(order)


def pushforward_truncated(W: VectorField, U: VectorField, order: int) -> VectorField:
    """Field ``V`` with ``conjugate_truncated(V, U, order) == J^order W``."""
    _check_tangent(U)
    lifted = W + U.jacobian_apply(W, order)
    return lifted.truncate(order).compose(inverse_map(U, order), order)


def random_field(rng, n: int, degrees, coeff_range: int = 3, density: float = 1.0) -> VectorField:
    from .poly import random_poly

    return VectorField([random_poly(rng, n, degrees, coeff_range, density) for _ in range(n)])
