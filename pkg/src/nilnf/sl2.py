"""sl2-triples attached to regular nilpotent linear fields and chain decompositions.

For a Jordan block of size ``nu`` on variables ``x_0, ..., x_{nu-1}`` the
lowering field is ``N = sum_k c_k x_k d/dx_{k-1}`` with ``c_k = sqrt(k(nu-k))``
and ``N*`` is its transpose.  With this scaling ``{N*, N, H'}``,
``H' = [N*, N]``, satisfies the sl2 relations and ``H'`` is diagonal, so
weight spaces are spanned by monomials (times ``d/dx_j``).

Roles on polynomials and vector fields: ``X`` raises the weight (``N*``
acting as a derivation, resp. ``ad_{N*}``), ``Y`` lowers it (``N``, resp.
``ad_N``) and ``H = [X, Y]``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from math import factorial

from .linalg import nullspace
from .poly import Poly, monomials, normalized_weight
from .scalar import EXACT, ScalarMode
from .vfield import VectorField, lie_bracket

__all__ = [
    "JordanType",
    "Sl2Triple",
    "Chain",
    "ChainDecomposition",
    "build_triple",
    "decompose",
    "chain_action",
    "chain_norm_sq",
    "chain_norm_formula",
    "vf_basis",
    "poly_basis",
]

POLY = "poly"
VF = "vf"


@dataclass(frozen=True)
class JordanType:
    """Sizes of the Jordan blocks of a regular nilpotent matrix."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks:
            raise ValueError("empty Jordan type")
        for b in blocks:
            if b < 2:
                raise ValueError(
                    f"block of size {b}: only regular nilpotent parts (blocks >= 2) are supported"
                )
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def parse(cls, text: str) -> "JordanType":
        parts = [p for p in str(text).replace(" ", "").split(",") if p]
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"bad Jordan type {text!r}: {exc}") from exc

    @property
    def n(self) -> int:
        return sum(self.blocks)

    def __str__(self):
        return "[" + ",".join(str(b) for b in self.blocks) + "]"


# ---------------------------------------------------------------------------
# sparse vectors over a monomial (or monomial x d/dx_j) basis


def _axpy(acc: dict, c, vec: dict, mode: ScalarMode):
    for k, v in vec.items():
        s = acc.get(k)
        t = c * v
        acc[k] = t if s is None else s + t
    for k in [k for k, v in acc.items() if mode.is_zero(v)]:
        del acc[k]


def _key_weight(key) -> object:
    alpha = key[0] if isinstance(key[0], tuple) else key
    return normalized_weight(alpha)


def sparse_inner(u: dict, v: dict, mode: ScalarMode = EXACT):
    """Normalized Fischer product of two sparse vectors (poly or vector field keys)."""
    s = mode.zero
    small, big = (u, v) if len(u) <= len(v) else (v, u)
    for k, c in small.items():
        d = big.get(k)
        if d is not None:
            w = _key_weight(k)
            s = s + c * d * (w if mode.exact else float(w))
    return s


class _LinearAction:
    """Action of a linear vector field ``x -> A x`` on monomials and monomial fields."""

    def __init__(self, matrix, mode: ScalarMode):
        self.mode = mode
        n = len(matrix)
        self.n = n
        self.rows = [
            [(j, matrix[i][j]) for j in range(n) if not mode.is_zero(matrix[i][j])] for i in range(n)
        ]
        self.cols = [
            [(i, matrix[i][j]) for i in range(n) if not mode.is_zero(matrix[i][j])] for j in range(n)
        ]
        self._pcache: dict = {}
        self._vcache: dict = {}
        self._lock = threading.Lock()

    def on_monomial(self, alpha) -> dict:
        hit = self._pcache.get(alpha)
        if hit is not None:
            return hit
        out: dict = {}
        for i, e in enumerate(alpha):
            if not e:
                continue
            for j, a in self.rows[i]:
                b = list(alpha)
                b[i] -= 1
                b[j] += 1
                b = tuple(b)
                t = a * e
                s = out.get(b)
                out[b] = t if s is None else s + t
        out = {k: v for k, v in out.items() if not self.mode.is_zero(v)}
        with self._lock:
            self._pcache[alpha] = out
        return out

    def on_field(self, key) -> dict:
        """``[A, x^alpha d/dx_j]`` as a sparse vector keyed by ``(alpha, i)``."""
        hit = self._vcache.get(key)
        if hit is not None:
            return hit
        alpha, j = key
        out: dict = {}
        for b, c in self.on_monomial(alpha).items():
            out[(b, j)] = c
        for i, a in self.cols[j]:
            k = (alpha, i)
            s = out.get(k)
            out[k] = -a if s is None else s - a
        out = {k: v for k, v in out.items() if not self.mode.is_zero(v)}
        with self._lock:
            self._vcache[key] = out
        return out

    def apply(self, vec: dict, space: str) -> dict:
        acc: dict = {}
        act = self.on_monomial if space == POLY else self.on_field
        for k, c in vec.items():
            _axpy(acc, c, act(k), self.mode)
        return acc


# ---------------------------------------------------------------------------
# the triple


class Sl2Triple:
    """``{N, N*, H'}`` for a regular nilpotent Jordan type in scaled coordinates.

    ``L`` is the diagonal coordinate change taking the standard Jordan field
    (all superdiagonal entries 1) to ``N``: ``matrix(N) = L J L^{-1}``.
    """

    def __init__(self, jordan: JordanType, mode: ScalarMode = EXACT):
        self.jordan = jordan
        self.mode = mode
        n = jordan.n
        self.n = n
        zero = mode.zero
        A = [[zero] * n for _ in range(n)]
        L = [mode.one] * n
        weights = [0] * n
        blocks = []
        off = 0
        for nu in jordan.blocks:
            blocks.append(tuple(range(off, off + nu)))
            for k in range(1, nu):
                A[off + k - 1][off + k] = mode.sqrt(k * (nu - k))
            for k in range(nu - 2, -1, -1):
                L[off + k] = A[off + k][off + k + 1] * L[off + k + 1]
            for i in range(nu):
                weights[off + i] = nu - 1 - 2 * i
            off += nu
        self.blocks = tuple(blocks)
        self.matrix_N = A
        self.matrix_Nstar = [[A[j][i] for j in range(n)] for i in range(n)]
        self.L = tuple(L)
        self.N = VectorField.linear(A)
        self.Nstar = VectorField.linear(self.matrix_Nstar)
        self.Hprime = lie_bracket(self.Nstar, self.N)
        self.weights = tuple(weights)
        self._X = _LinearAction(self.matrix_Nstar, mode)
        self._Y = _LinearAction(self.matrix_N, mode)
        self._dec_cache: dict = {}
        self._lock = threading.Lock()

    def exact_twin(self) -> "Sl2Triple":
        """The same triple over the exact backend (itself when already exact)."""
        if self.mode.exact:
            return self
        with self._lock:
            if getattr(self, "_twin", None) is None:
                self._twin = Sl2Triple(self.jordan, EXACT)
            return self._twin

    # relations -----------------------------------------------------------
    def relation_residuals(self) -> dict[str, VectorField]:
        """The three sl2 relations as residual fields (all zero when they hold)."""
        N, Ns, Hp = self.N, self.Nstar, self.Hprime
        return {
            "[N*,N]-H'": lie_bracket(Ns, N) - Hp,
            "[H',N*]-2N*": lie_bracket(Hp, Ns) - Ns.scale(2),
            "[H',N]+2N": lie_bracket(Hp, N) + N.scale(2),
        }

    def _is_zero_field(self, V: VectorField) -> bool:
        return all(self.mode.is_zero(c) for p in V.components for c in p.terms.values())

    def check_relations(self) -> bool:
        return all(self._is_zero_field(r) for r in self.relation_residuals().values())

    def check_ad_relations(self, max_degree: int = 3) -> bool:
        """``{ad_N*, ad_N, ad_H'}`` satisfies the sl2 relations on ``V_k``, ``k <= max_degree``."""
        Hp = self.Hprime
        mode = self.mode
        for k in range(0, max_degree + 1):
            for key in vf_basis(self.n, k):
                e = VectorField.basis_element(key[0], key[1], mode.one)
                Xe = lie_bracket(self.Nstar, e)
                Ye = lie_bracket(self.N, e)
                He = lie_bracket(Hp, e)
                r1 = lie_bracket(self.Nstar, Ye) - lie_bracket(self.N, Xe) - He
                r2 = lie_bracket(Hp, Xe) - lie_bracket(self.Nstar, He) - Xe.scale(2)
                r3 = lie_bracket(Hp, Ye) - lie_bracket(self.N, He) + Ye.scale(2)
                if not all(self._is_zero_field(r) for r in (r1, r2, r3)):
                    return False
        return True

    def check_L(self) -> bool:
        """``matrix(N) = L J L^{-1}`` with ``J`` the standard Jordan matrix."""
        n = self.n
        for blk in self.blocks:
            for a, b in zip(blk, blk[1:]):
                if not self.mode.is_zero(self.matrix_N[a][b] - self.L[a] / self.L[b]):
                    return False
        nz = sum(1 for i in range(n) for j in range(n) if not self.mode.is_zero(self.matrix_N[i][j]))
        return nz == sum(len(b) - 1 for b in self.blocks)

    def hprime_is_diagonal(self) -> bool:
        M = self.Hprime.linear_matrix()
        for i in range(self.n):
            for j in range(self.n):
                want = self.weights[i] if i == j else 0
                if not self.mode.is_zero(M[i][j] - want):
                    return False
        return True

    # coordinates -----------------------------------------------------------
    def from_standard(self, V: VectorField) -> VectorField:
        """Express a field given in standard Jordan coordinates in the scaled ones.

        With ``x' = L x`` the new field is ``L V(L^{-1} x')``.
        """
        n = self.n
        subs = [Poly.var(n, j, 1 / self.L[j] if self.mode.exact else 1.0 / float(self.L[j])) for j in range(n)]
        deg = max(V.degree(), 0)
        comps = [V.components[i].compose(subs, deg).scale(self.L[i]) for i in range(n)]
        return VectorField(comps)

    # operators on sparse vectors --------------------------------------------
    def X(self, vec: dict, space: str) -> dict:
        return self._X.apply(vec, space)

    def Y(self, vec: dict, space: str) -> dict:
        return self._Y.apply(vec, space)

    def H(self, vec: dict, space: str) -> dict:
        out = {}
        for k, c in vec.items():
            w = self.key_weight(k, space)
            if w:
                out[k] = c * w
        return out

    def key_weight(self, key, space: str) -> int:
        if space == POLY:
            return sum(a * h for a, h in zip(key, self.weights))
        alpha, j = key
        return sum(a * h for a, h in zip(alpha, self.weights)) - self.weights[j]

    # decompositions ------------------------------------------------------------
    def decomposition(self, space: str, k: int) -> "ChainDecomposition":
        key = (space, k)
        hit = self._dec_cache.get(key)
        if hit is None:
            hit = decompose(self, space, k)
            with self._lock:
                self._dec_cache[key] = hit
        return hit

    def __repr__(self):
        return f"Sl2Triple({self.jordan}, {self.mode})"


def build_triple(jt, mode: ScalarMode = EXACT, check_degree: int = 3) -> Sl2Triple:
    """Build and verify the sl2-triple for a Jordan type.

    Raises ``ArithmeticError`` if a relation fails (which would be a bug).
    """
    if not isinstance(jt, JordanType):
        jt = JordanType(tuple(jt))
    t = Sl2Triple(jt, mode)
    if not t.check_relations():
        raise ArithmeticError(f"sl2 relations fail for {jt}")
    if not t.hprime_is_diagonal():
        raise ArithmeticError(f"H' is not the expected diagonal for {jt}")
    if not t.check_L():
        raise ArithmeticError(f"coordinate change L inconsistent for {jt}")
    if check_degree is not None and check_degree >= 0 and not t.check_ad_relations(check_degree):
        raise ArithmeticError(f"ad-triple relations fail for {jt}")
    return t


# ---------------------------------------------------------------------------
# chain decompositions


def poly_basis(n: int, k: int) -> tuple:
    return monomials(n, k)


def vf_basis(n: int, k: int) -> tuple:
    """Basis ``x^alpha d/dx_j`` of ``V_k`` keyed ``(alpha, j)``, graded-lex in ``alpha``."""
    return tuple((a, j) for a in monomials(n, k) for j in range(n))


def chain_norm_formula(lam: int, m: int) -> int:
    """``m! lam! / (lam - m)!``: ratio ``||Y^m b||^2 / ||b||^2``."""
    return factorial(m) * factorial(lam) // factorial(lam - m)


@dataclass
class Chain:
    """``v_m = Y^m b_0`` for ``0 <= m <= weight``, with cached squared norms."""

    weight: int
    vectors: list
    norms_sq: list

    @property
    def primitive(self) -> dict:
        return self.vectors[0]

    def a(self, m: int) -> int:
        """Box eigenvalue ``m (lambda - m + 1)`` on ``v_m``."""
        return m * (self.weight - m + 1)


@dataclass
class ChainDecomposition:
    space: str
    degree: int
    n: int
    basis: tuple
    chains: list = field(default_factory=list)
    mode: ScalarMode = EXACT

    @property
    def dim(self) -> int:
        return len(self.basis)

    def weights(self) -> list[int]:
        return [c.weight for c in self.chains]

    def coords(self, vec: dict) -> list[list]:
        """Coefficients of ``vec`` on every chain vector (orthogonal expansion)."""
        out = []
        for ch in self.chains:
            row = []
            for v, nsq in zip(ch.vectors, ch.norms_sq):
                row.append(sparse_inner(vec, v, self.mode) / nsq)
            out.append(row)
        return out

    def assemble(self, coeffs: list[list]) -> dict:
        acc: dict = {}
        for ch, row in zip(self.chains, coeffs):
            for v, c in zip(ch.vectors, row):
                if not self.mode.is_zero(c):
                    _axpy(acc, c, v, self.mode)
        return acc

    def to_object(self, vec: dict):
        if self.space == POLY:
            return Poly(self.n, dict(vec), True)
        return VectorField.from_sparse(self.n, vec)

    def chain_vector(self, i: int, m: int):
        return self.to_object(self.chains[i].vectors[m])

    def to_json(self) -> dict:
        from .serialize import scalar_to_json

        return {
            "space": self.space,
            "degree": self.degree,
            "n": self.n,
            "dim": self.dim,
            "chains": [
                {
                    "weight": ch.weight,
                    "primitive": _obj_json(self.to_object(ch.vectors[0])),
                    "norm_sq": [scalar_to_json(x) for x in ch.norms_sq],
                }
                for ch in self.chains
            ],
        }


def _obj_json(obj):
    return obj.to_json()


def _gram_schmidt(vectors: list[dict], mode: ScalarMode) -> list[dict]:
    out: list[dict] = []
    norms: list = []
    for v in vectors:
        w = dict(v)
        for u, nu in zip(out, norms):
            c = sparse_inner(w, u, mode) / nu
            if not mode.is_zero(c):
                _axpy(w, -c, u, mode)
        if not w:
            continue
        out.append(w)
        norms.append(sparse_inner(w, w, mode))
    return out


def decompose(triple: Sl2Triple, space: str, k: int) -> ChainDecomposition:
    """Orthogonal decomposition of ``P_k`` or ``V_k`` into irreducible chains."""
    if space not in (POLY, VF):
        raise ValueError(f"space must be {POLY!r} or {VF!r}")
    if k < 0:
        raise ValueError("degree must be >= 0")
    n = triple.n
    mode = triple.mode
    if not mode.exact:
        # float elimination loses the chain structure at higher degrees, so
        # the basis is computed exactly once and converted
        exact = triple.exact_twin().decomposition(space, k)
        dec = ChainDecomposition(space=space, degree=k, n=n, basis=exact.basis, mode=mode)
        for ch in exact.chains:
            vecs = [{key: float(c) for key, c in v.items()} for v in ch.vectors]
            dec.chains.append(Chain(weight=ch.weight, vectors=vecs, norms_sq=[float(x) for x in ch.norms_sq]))
        return dec
    basis = poly_basis(n, k) if space == POLY else vf_basis(n, k)
    by_weight: dict[int, list] = {}
    for key in basis:
        by_weight.setdefault(triple.key_weight(key, space), []).append(key)
    act = triple._X.on_monomial if space == POLY else triple._X.on_field
    position = {key: i for i, key in enumerate(basis)}
    dec = ChainDecomposition(space=space, degree=k, n=n, basis=basis, mode=mode)
    for w in sorted(by_weight, reverse=True):
        if w < 0:
            continue
        keys = by_weight[w]
        rows: dict = {}
        for col, key in enumerate(keys):
            for t, c in act(key).items():
                rows.setdefault(t, {})[col] = c
        null = nullspace(list(rows.values()), len(keys), one=mode.one, is_zero=mode.is_zero)
        prims = [{keys[c]: v for c, v in vec.items()} for vec in null]
        prims.sort(key=lambda v: min(position[key] for key in v))
        for b in _gram_schmidt(prims, mode):
            vecs = [b]
            for _ in range(w):
                vecs.append(triple.Y(vecs[-1], space))
            n0 = sparse_inner(b, b, mode)
            norms = [n0 * chain_norm_formula(w, m) for m in range(w + 1)]
            dec.chains.append(Chain(weight=w, vectors=vecs, norms_sq=norms))
    total = sum(c.weight + 1 for c in dec.chains)
    if total != len(basis):
        raise ArithmeticError(f"chain dimensions {total} != dim {len(basis)}")
    return dec


def chain_action(dec: ChainDecomposition, i: int, op: str, m: int, triple: Sl2Triple | None = None):
    """Coefficient and target index of ``op`` applied to ``v_m`` of chain ``i``.

    Returns ``(coeff, m')`` with ``op(v_m) = coeff * v_{m'}``; ``m'`` is
    ``None`` when the image is zero past the end of the chain.  When a triple
    is given the claim is checked against an explicit application.
    """
    ch = dec.chains[i]
    lam = ch.weight
    if not 0 <= m <= lam:
        raise IndexError(f"m={m} outside chain range 0..{lam}")
    mode = dec.mode
    if op == "X":
        coeff, target = (mode.coerce(m * (lam - m + 1)), m - 1) if m > 0 else (mode.zero, None)
    elif op == "Y":
        coeff, target = (mode.one, m + 1) if m < lam else (mode.zero, None)
    elif op == "H":
        coeff, target = mode.coerce(lam - 2 * m), m
    else:
        raise ValueError(f"unknown operator {op!r}")
    if triple is not None:
        got = getattr(triple, op)(ch.vectors[m], dec.space)
        want: dict = {}
        if target is not None:
            _axpy(want, coeff, ch.vectors[target], mode)
        diff = dict(got)
        _axpy(diff, -mode.one, want, mode)
        if diff:
            raise ArithmeticError(f"chain action {op} on v_{m} disagrees with direct application")
    return coeff, target


def chain_norm_sq(dec: ChainDecomposition, i: int, m: int):
    ch = dec.chains[i]
    if not 0 <= m <= ch.weight:
        raise IndexError(f"m={m} outside chain range 0..{ch.weight}")
    return ch.norms_sq[m]
