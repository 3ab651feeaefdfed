"""Cohomological operators, the box solve and the iterated cohomological equation.

``d0 = ad_N`` (lowering, ``Y``), ``d0* = ad_N*`` (raising, ``X``) and
``box = d0 d0*``.  On the chain vector ``v_m = Y^m b_0`` of a chain of weight
``lam`` the box acts by ``a(m) = m (lam - m + 1)``; ``Ker box`` is spanned by
the primitive vectors and ``Im box`` by the ``v_m`` with ``m >= 1``.

The Newton step solves, on a degree window ``[m+1, 2m]``,

    pi_Im J^{2m} [N + f N*, X V] = Z,     V in Im box,

which expands to ``box V + pi_Im J^{2m}(f X X V) - pi_Im J^{2m}((X V)(f) N*)``,
i.e. ``box (I + Q1 - Q2) V = Z``; ``Q1 - Q2`` raises the degree, so the
Neumann series terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .poly import Poly
from .scalar import EXACT, ScalarMode
from .sl2 import POLY, VF, Sl2Triple, _axpy, chain_norm_formula
from .vfield import VectorField, lie_bracket, rnorm

__all__ = [
    "apply_d0",
    "apply_d0_star",
    "apply_box",
    "SplitVector",
    "project",
    "chain_coordinates",
    "box_solve",
    "solve_homological",
    "P1",
    "P2",
    "Q1",
    "Q2",
    "IteratedSolution",
    "iterated_solve",
    "perturbed_solve",
    "inverse_tangent",
    "StructuredSolution",
    "structured_solve",
    "q1_scalar_factor",
    "q1_factor_scan",
    "window_basis",
    "operator_matrix",
    "orthonormal_operator_norm",
    "nilpotency_index",
    "operator_bounds",
    "solver_constant_d",
    "is_joint_invariant",
]


# ---------------------------------------------------------------------------
# basic operators


def apply_d0(triple: Sl2Triple, U: VectorField, max_deg: int | None = None) -> VectorField:
    """``[N, U]``."""
    return lie_bracket(triple.N, U, max_deg)


def apply_d0_star(triple: Sl2Triple, U: VectorField, max_deg: int | None = None) -> VectorField:
    """``[N*, U]``."""
    return lie_bracket(triple.Nstar, U, max_deg)


def apply_box(triple: Sl2Triple, V: VectorField) -> VectorField:
    return apply_d0(triple, apply_d0_star(triple, V))


def is_joint_invariant(triple: Sl2Triple, f: Poly) -> bool:
    z = triple.mode.is_zero
    a = triple.N.apply(f)
    b = triple.Nstar.apply(f)
    return all(z(c) for c in a.terms.values()) and all(z(c) for c in b.terms.values())


def _negligible(mode: ScalarMode, c, nsq) -> bool:
    """Is the chain term ``c * v`` zero?  In float mode judged by ``|c| |v|``:
    chain vectors are unnormalized, so a small ``c`` may still matter."""
    if mode.exact:
        return not c
    return abs(float(c)) * math.sqrt(abs(float(nsq))) <= mode.tol


def _space_of(obj) -> str:
    return VF if isinstance(obj, VectorField) else POLY


def _slices(obj) -> dict[int, dict]:
    out: dict[int, dict] = {}
    if isinstance(obj, VectorField):
        for (a, i), c in obj.to_sparse().items():
            out.setdefault(sum(a), {})[(a, i)] = c
    else:
        for a, c in obj.items():
            out.setdefault(sum(a), {})[a] = c
    return out


def _from_sparse(space: str, n: int, vec: dict):
    if space == VF:
        return VectorField.from_sparse(n, vec)
    return Poly(n, dict(vec), True)


def _zero(space: str, n: int):
    return VectorField.zero(n) if space == VF else Poly.zero(n)


def _is_zero_obj(triple: Sl2Triple, obj) -> bool:
    z = triple.mode.is_zero
    if isinstance(obj, VectorField):
        return all(z(c) for p in obj.components for c in p.terms.values())
    return all(z(c) for c in obj.terms.values())


def chain_coordinates(triple: Sl2Triple, W) -> dict[int, list[list]]:
    """Per degree, coefficients of ``W`` on the chain vectors of that slice."""
    space = _space_of(W)
    return {k: triple.decomposition(space, k).coords(vec) for k, vec in _slices(W).items()}


# ---------------------------------------------------------------------------
# projections and box solve


@dataclass
class SplitVector:
    """``W = im_part + ker_part`` with ``im_part`` in ``Im box`` and ``ker_part`` in ``Ker box``."""

    im_part: object
    ker_part: object


def project(triple: Sl2Triple, W) -> SplitVector:
    space = _space_of(W)
    im_acc: dict = {}
    ker_acc: dict = {}
    mode = triple.mode
    for k, vec in _slices(W).items():
        dec = triple.decomposition(space, k)
        for ch, row in zip(dec.chains, dec.coords(vec)):
            for m, c in enumerate(row):
                if _negligible(mode, c, ch.norms_sq[m]):
                    continue
                _axpy(ker_acc if m == 0 else im_acc, c, ch.vectors[m], mode)
    return SplitVector(_from_sparse(space, W.n, im_acc), _from_sparse(space, W.n, ker_acc))


def box_solve(triple: Sl2Triple, Z, check: bool = True):
    """The unique ``V`` in ``Im box`` with ``box V = Z``; ``Z`` must lie in ``Im box``."""
    space = _space_of(Z)
    mode = triple.mode
    acc: dict = {}
    for k, vec in _slices(Z).items():
        dec = triple.decomposition(space, k)
        for ch, row in zip(dec.chains, dec.coords(vec)):
            if check and not _negligible(mode, row[0], ch.norms_sq[0]):
                raise ValueError("right-hand side has a component in Ker(box)")
            for m in range(1, ch.weight + 1):
                c = row[m]
                if not _negligible(mode, c, ch.norms_sq[m]):
                    _axpy(acc, c / ch.a(m), ch.vectors[m], mode)
    return _from_sparse(space, Z.n, acc)


def solve_homological(triple: Sl2Triple, R) -> tuple[VectorField, VectorField]:
    """``U = X box^{-1} pi_Im R`` (in ``Im d0*``) together with ``pi_Ker R``.

    On chains ``U = sum c_{j,m} v_{m-1}`` because ``X v_m = a(m) v_{m-1}``;
    ``[N, U] = pi_Im R``.
    """
    space = _space_of(R)
    mode = triple.mode
    u_acc: dict = {}
    k_acc: dict = {}
    for k, vec in _slices(R).items():
        dec = triple.decomposition(space, k)
        for ch, row in zip(dec.chains, dec.coords(vec)):
            if not _negligible(mode, row[0], ch.norms_sq[0]):
                _axpy(k_acc, row[0], ch.vectors[0], mode)
            for m in range(1, ch.weight + 1):
                if not _negligible(mode, row[m], ch.norms_sq[m]):
                    _axpy(u_acc, row[m], ch.vectors[m - 1], mode)
    return _from_sparse(space, R.n, u_acc), _from_sparse(space, R.n, k_acc)


# ---------------------------------------------------------------------------
# P1, P2, Q1, Q2


def P1(triple: Sl2Triple, f: Poly, V: VectorField, m: int) -> VectorField:
    """``J^{2m}(f X X V)``."""
    XXV = apply_d0_star(triple, apply_d0_star(triple, V))
    return XXV.times_poly(f, 2 * m)


def P2(triple: Sl2Triple, f: Poly, V: VectorField, m: int) -> VectorField:
    """``J^{2m}((X V)(f) N*)``."""
    g = apply_d0_star(triple, V).apply(f, 2 * m)
    return triple.Nstar.times_poly(g, 2 * m)


def Q1(triple: Sl2Triple, f: Poly, V: VectorField, m: int) -> VectorField:
    return box_solve(triple, project(triple, P1(triple, f, V, m)).im_part)


def Q2(triple: Sl2Triple, f: Poly, V: VectorField, m: int) -> VectorField:
    return box_solve(triple, project(triple, P2(triple, f, V, m)).im_part)


def _check_window(V: VectorField, lo: int, hi: int, what: str):
    for p in V.components:
        for a in p.terms:
            if not lo <= sum(a) <= hi:
                raise ValueError(f"{what} has a term of degree {sum(a)} outside [{lo}, {hi}]")


@dataclass
class IteratedSolution:
    """Solution of the windowed equation ``pi_Im J^{2m}[NF_m, X V] = Z``."""

    U: VectorField
    V: VectorField
    alpha: int
    residual: VectorField
    path: str
    mode: ScalarMode = EXACT

    @property
    def verified(self) -> bool:
        return all(self.mode.is_zero(c) for p in self.residual.components for c in p.terms.values())


def iterated_solve(triple: Sl2Triple, f: Poly, Z: VectorField, m: int, verify: bool = True) -> IteratedSolution:
    """Solve ``pi_Im J^{2m}([N + f N*, X V]) = Z`` by the terminating Neumann series.

    ``f`` must be a joint invariant of ``N`` and ``N*`` vanishing at the
    origin and ``Z`` must lie in ``Im box`` within degrees ``[m+1, 2m]``.
    ``alpha`` is the number of nonzero correction terms of the series.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if f.n != triple.n:
        raise ValueError("dimension mismatch")
    if not triple.mode.is_zero(f.coeff((0,) * f.n)):
        raise ValueError("f_m must vanish at the origin")
    if not is_joint_invariant(triple, f):
        raise ValueError("f_m is not a joint invariant of N and N*")
    _check_window(Z, m + 1, 2 * m, "Z")
    V0 = box_solve(triple, Z)
    V = V0
    term = V0
    alpha = 0
    limit = _window_dim(triple.n, m + 1, 2 * m) + 1
    while True:
        term = Q2(triple, f, term, m) - Q1(triple, f, term, m)
        if _is_zero_obj(triple, term):
            break
        alpha += 1
        if alpha > limit:
            raise ArithmeticError("Q1 - Q2 failed to be nilpotent")
        V = V + term
    U = apply_d0_star(triple, V)
    residual = VectorField.zero(triple.n)
    if verify:
        NF = triple.N + triple.Nstar.times_poly(f)
        lhs = project(triple, lie_bracket(NF, U, 2 * m).drop_below(m + 1)).im_part
        residual = lhs - Z
        if not _is_zero_obj(triple, residual):
            raise ArithmeticError("iterated solve residual is nonzero")
    return IteratedSolution(U=U, V=V, alpha=alpha, residual=residual, path="iterated", mode=triple.mode)


def inverse_tangent(prior: VectorField, U: VectorField, order: int) -> VectorField:
    """``J^order (I + D prior)^{-1} U`` by degree-raising fixed point."""
    if prior is None or prior.is_zero():
        return U.truncate(order)
    G = U.truncate(order)
    for _ in range(order + 1):
        nxt = (U - prior.jacobian_apply(G, order)).truncate(order)
        if nxt == G:
            return G
        G = nxt
    raise ArithmeticError("inverse tangent map did not stabilise")


def perturbed_solve(
    triple: Sl2Triple,
    NF: VectorField,
    Z: VectorField,
    lo: int,
    hi: int,
    prior: VectorField | None = None,
    verify: bool = True,
) -> IteratedSolution:
    """Solve ``pi_Im J^{hi}[NF, G(X V)] = Z`` on the window ``[lo, hi]``.

    ``G = (I + D prior)^{-1}`` (identity without ``prior``).  ``NF - N`` and
    ``G - I`` raise the degree, so with ``T = box^{-1} pi_Im (L - box)`` the
    solution is ``sum_l (-T)^l box^{-1} Z``, a finite sum.
    """
    _check_window(Z, lo, hi, "Z")

    def L(V):
        G = inverse_tangent(prior, apply_d0_star(triple, V), hi)
        return project(triple, lie_bracket(NF, G, hi).drop_below(lo)).im_part

    V0 = box_solve(triple, Z)
    V = V0
    term = V0
    alpha = 0
    limit = hi - lo + 2
    while True:
        T = box_solve(triple, L(term) - apply_box(triple, term))
        term = -T
        if _is_zero_obj(triple, term):
            break
        alpha += 1
        if alpha > limit:
            raise ArithmeticError("windowed perturbation failed to be nilpotent")
        V = V + term
    U = apply_d0_star(triple, V)
    residual = VectorField.zero(triple.n)
    if verify:
        residual = L(V) - Z
        if not _is_zero_obj(triple, residual):
            raise ArithmeticError("windowed solve residual is nonzero")
    return IteratedSolution(U=U, V=V, alpha=alpha, residual=residual, path="general", mode=triple.mode)


def _window_dim(n: int, lo: int, hi: int) -> int:
    return sum(n * math.comb(k + n - 1, n - 1) for k in range(lo, hi + 1))


# ---------------------------------------------------------------------------
# structured (A, B, C) solve on a polynomial chain


@dataclass
class StructuredSolution:
    """``A, B, C`` with ``box(A N + B N* + C H') = B' N*``.

    Coefficients are given on the unnormalized polynomial chain
    ``u_n = N^n u_0`` and on the normalized one ``w_n = u_n / s_n``,
    ``s_n^2 = a(1) ... a(n)``.
    """

    A: Poly
    B: Poly
    C: Poly
    Bprime: Poly
    coeffs_u: dict
    coeffs_w: dict
    residual: VectorField
    printed_A_matches: bool = True
    mode: ScalarMode = EXACT

    @property
    def verified(self) -> bool:
        return all(self.mode.is_zero(c) for p in self.residual.components for c in p.terms.values())


def _a(lam: int, n: int) -> int:
    return n * (lam - n + 1) if 0 <= n <= lam + 1 else 0


def structured_solve(triple: Sl2Triple, u0: Poly, lam: int, beta: dict, verify: bool = True) -> StructuredSolution:
    """Solve ``box(A N + B N* + C H') = B' N*`` for ``B' = sum_n beta_n u_n``.

    ``u0`` must be a primitive polynomial (``N* u0 = 0``) of weight ``lam``
    and ``beta_0 = beta_1 = beta_2 = 0``.  Solves the triangular system

        (D + 2) A + 2 N* C = 0,   D B - 2 N C = B',   N A - N* B + (D + 2) C = 0

    with ``D = N N*``.  The coefficients are also evaluated from the
    closed formulas in the normalized basis ``w_n`` (where square roots
    appear) and converted back; both must agree.
    """
    mode = triple.mode
    if not _is_zero_obj(triple, triple.Nstar.apply(u0)):
        raise ValueError("u0 is not primitive")
    if not _is_zero_obj(triple, triple.Hprime.apply(u0) - u0.scale(lam)):
        raise ValueError(f"u0 does not have weight {lam}")
    beta = {int(k): mode.coerce(v) if not isinstance(v, float) else v for k, v in beta.items()}
    for k, v in beta.items():
        if not 0 <= k <= lam:
            raise ValueError(f"beta index {k} outside chain range 0..{lam}")
        if k <= 2 and not mode.is_zero(v):
            raise ValueError("restriction violated: beta_0 = beta_1 = beta_2 = 0 required")
    zero = mode.zero
    b = [beta.get(k, zero) for k in range(lam + 1)]
    a = lambda k: _a(lam, k)  # noqa: E731

    gamma = [zero] * (lam + 1)
    for k in range(3, lam + 1):
        gamma[k - 1] = b[k] * Fraction(a(k - 2) + 2, a(k - 1) * a(k - 2))
    Acoef = [zero] * (lam + 1)
    for k in range(1, lam + 1):
        Acoef[k - 1] = gamma[k] * Fraction(-2 * a(k), a(k - 1) + 2)
    Bcoef = [zero] * (lam + 1)
    for k in range(1, lam + 1):
        Bcoef[k] = (b[k] + 2 * gamma[k - 1]) * Fraction(1, a(k))
    if not mode.exact:
        gamma = [float(x) for x in gamma]

    # closed formulas in the normalized basis
    s = [mode.one]
    for k in range(1, lam + 1):
        s.append(mode.sqrt(chain_norm_formula(lam, k)))
    bw = [b[k] * s[k] for k in range(lam + 1)]
    Cw = [zero] * (lam + 1)
    Aw = [zero] * (lam + 1)
    Bw = [zero] * (lam + 1)
    for k in range(3, lam + 1):
        Cw[k - 1] = bw[k] * Fraction(a(k - 2) + 2, a(k - 1) * a(k - 2)) / mode.sqrt(a(k))
        Bw[k] = bw[k] * Fraction(1, a(k)) * (1 + Fraction(2 * (a(k - 2) + 2), a(k - 1) * a(k - 2)))
    # A_{n-1} = -2 sqrt(a(n)) C_n / (a(n-1) + 2) since N* w_n = sqrt(a(n)) w_{n-1};
    # the closed form without the sqrt(a(n)) is kept for comparison
    A_printed = [zero] * (lam + 1)
    for k in range(2, lam):
        A_printed[k - 1] = bw[k + 1] * Fraction(-2, a(k - 1)) / mode.sqrt(a(k + 1))
        Aw[k - 1] = A_printed[k - 1] / mode.sqrt(a(k))
    for k in range(lam + 1):
        for name, uc, wc in (("C", gamma, Cw), ("A", Acoef, Aw), ("B", Bcoef, Bw)):
            if not mode.is_zero(wc[k] / s[k] - uc[k]):
                raise ArithmeticError(f"normalized-basis formula for {name}_{k} disagrees")
    printed_A_matches = all(mode.is_zero(A_printed[k] - Aw[k]) for k in range(lam + 1))

    chain = [u0]
    for _ in range(lam):
        chain.append(triple.N.apply(chain[-1]))

    def combo(coefs):
        out = Poly.zero(triple.n)
        for c, u in zip(coefs, chain):
            if c:
                out = out + u.scale(c)
        return out

    A, B, C, Bp = combo(Acoef), combo(Bcoef), combo(gamma), combo(b)
    residual = VectorField.zero(triple.n)
    if verify:
        W = triple.N.times_poly(A) + triple.Nstar.times_poly(B) + triple.Hprime.times_poly(C)
        residual = apply_box(triple, W) - triple.Nstar.times_poly(Bp)
        if not _is_zero_obj(triple, residual):
            raise ArithmeticError("structured solve: box(A N + B N* + C H') != B' N*")
    return StructuredSolution(
        A=A,
        B=B,
        C=C,
        Bprime=Bp,
        coeffs_u={"A": Acoef, "B": Bcoef, "C": gamma, "Bprime": b},
        coeffs_w={"A": Aw, "B": Bw, "C": Cw, "Bprime": bw, "A_printed": A_printed},
        residual=residual,
        printed_A_matches=printed_A_matches,
        mode=triple.mode,
    )


# ---------------------------------------------------------------------------
# bounds


def q1_scalar_factor(lam: int, n: int) -> float:
    """``sqrt((lam-n+2)(n-1)) sqrt((lam-n+1) n) / ((n-2)(lam-n+3))`` for ``3 <= n <= lam``."""
    if not 3 <= n <= lam:
        raise ValueError("need 3 <= n <= lam")
    return math.sqrt((lam - n + 2) * (n - 1) * (lam - n + 1) * n) / ((n - 2) * (lam - n + 3))


def q1_factor_scan(max_lambda: int = 200) -> tuple[float, tuple[int, int]]:
    """Maximum of the Q1 scalar factor over ``3 <= n <= lam <= max_lambda``, exactly compared.

    The comparison with 6 is done on squares of rationals, so no rounding
    enters the verdict; the float maximum is returned for reporting.
    """
    best = Fraction(-1)
    arg = (0, 0)
    for lam in range(3, max_lambda + 1):
        for n in range(3, lam + 1):
            sq = Fraction((lam - n + 2) * (n - 1) * (lam - n + 1) * n, ((n - 2) * (lam - n + 3)) ** 2)
            if sq > best:
                best, arg = sq, (lam, n)
    return math.sqrt(best), arg


def window_basis(triple: Sl2Triple, lo: int, hi: int, im_only: bool = True) -> list:
    """Chain vectors of ``V_lo + ... + V_hi`` as ``(degree, chain, m, vector, norm_sq)``."""
    out = []
    for k in range(lo, hi + 1):
        dec = triple.decomposition(VF, k)
        for i, ch in enumerate(dec.chains):
            for m in range(1 if im_only else 0, ch.weight + 1):
                out.append((k, i, m, ch.vectors[m], ch.norms_sq[m]))
    return out


def operator_matrix(triple: Sl2Triple, op, lo: int, hi: int, im_only: bool = True):
    """Matrix of ``op`` (a map on VectorFields) in the window chain basis.

    Returns ``(matrix, basis)`` with ``matrix[i][j]`` the coefficient of
    basis vector ``i`` in ``op(basis_j)``.
    """
    basis = window_basis(triple, lo, hi, im_only)
    index = {(k, i, m): r for r, (k, i, m, _, _) in enumerate(basis)}
    mode = triple.mode
    M = [[mode.zero] * len(basis) for _ in basis]
    for j, (k, i, m, vec, _) in enumerate(basis):
        img = op(VectorField.from_sparse(triple.n, vec))
        for deg, rows in chain_coordinates(triple, img).items():
            chains = triple.decomposition(VF, deg).chains
            for ci, row in enumerate(rows):
                for mm, c in enumerate(row):
                    if _negligible(mode, c, chains[ci].norms_sq[mm]):
                        continue
                    r = index.get((deg, ci, mm))
                    if r is None:
                        raise ValueError("operator leaves the window basis")
                    M[r][j] = c
    return M, basis


def orthonormal_operator_norm(M, basis) -> float:
    """Spectral norm of the operator after rescaling the chain basis to unit length."""
    import numpy as np

    if not basis:
        return 0.0
    sc = np.array([math.sqrt(float(b[4])) for b in basis])
    A = np.array([[float(x) for x in row] for row in M])
    A = (A * sc[:, None]) / sc[None, :]
    return float(np.linalg.norm(A, 2))


def nilpotency_index(op, vectors: list, limit: int) -> int:
    """Least ``K`` with ``op^K v = 0`` for every ``v``; raises if above ``limit``."""
    worst = 0
    for v in vectors:
        k = 0
        while not v.is_zero():
            v = op(v)
            k += 1
            if k > limit:
                raise ArithmeticError("operator is not nilpotent within the limit")
        worst = max(worst, k)
    return worst


def solver_constant_d(triple: Sl2Triple, r=1) -> float:
    """``d`` with ``|d0* V|_r <= m d |V|_r`` for ``V`` of degree ``<= 2m``, ``1/2 <= r <= 1``.

    From ``|d0* V|_r <= |V|_r |DN*|_r + |DV|_r |N*|_r`` and the Cauchy
    estimate ``|dV/dx_j|_r <= (2m/r)|V|_r <= 4m |V|_r``, so
    ``d = |DN*|_1 + 4 n |N*|_1`` works for every ``m >= 1``.
    """
    from .vfield import jacobian_rnorm

    Ns = triple.Nstar
    return jacobian_rnorm(Ns, r) + 4 * triple.n * rnorm(Ns, r).value


@dataclass
class BoundsReport:
    q1_bound: float
    q2_bound: float
    scalar_factor_max: float
    q1_norm: float
    q2_norm: float
    f_norm: float
    grad_f_norm: float
    C0_measured: float | None
    alpha: int
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def operator_bounds(triple: Sl2Triple, f: Poly, r, m: int, C0: float | None = None) -> BoundsReport:
    """Bounds for ``Q1`` and ``Q2`` on the window ``[m+1, 2m]`` plus measured norms.

    ``scalar_factor_max`` runs over the chain weights present in the window.
    Measured norms are spectral norms in the orthonormalised chain basis
    (float).  If ``C0`` is not given it is reported as the measured ratio
    ``||Q2|| / |||grad f|||``.
    """
    from .poly import norm_sq as pnorm_sq

    if not is_joint_invariant(triple, f):
        raise ValueError("f_m is not a joint invariant of N and N*")
    lo, hi = m + 1, 2 * m
    f_r = rnorm(f, r).value
    grad_r = sum(rnorm(f.derive(j), r).value for j in range(triple.n))
    lin = max(rnorm(triple.N, r).value, rnorm(triple.Nstar, r).value, rnorm(triple.Hprime, r).value)
    lams = set()
    for k in range(lo, hi + 1):
        lams.update(triple.decomposition(VF, k).weights())
    factor = 0.0
    for lam in lams:
        for n in range(3, lam + 1):
            factor = max(factor, q1_scalar_factor(lam, n))
    if f.is_zero():
        return BoundsReport(0.0, 0.0, factor, 0.0, 0.0, 0.0, 0.0, C0, 0)
    M1, basis = operator_matrix(triple, lambda V: Q1(triple, f, V, m), lo, hi)
    M2, _ = operator_matrix(triple, lambda V: Q2(triple, f, V, m), lo, hi)
    q1n = orthonormal_operator_norm(M1, basis)
    q2n = orthonormal_operator_norm(M2, basis)
    f_norm = math.sqrt(float(pnorm_sq(f)))
    grad_norm = sum(math.sqrt(float(pnorm_sq(f.derive(j)))) for j in range(triple.n))
    measured = q2n / grad_norm if grad_norm else 0.0
    c0 = C0 if C0 is not None else measured
    vecs = [VectorField.from_sparse(triple.n, b[3]) for b in basis]
    alpha = nilpotency_index(
        lambda V: Q1(triple, f, V, m) - Q2(triple, f, V, m), vecs, len(vecs) + 1
    )
    return BoundsReport(
        q1_bound=6 * f_r,
        q2_bound=c0 * grad_r * lin,
        scalar_factor_max=factor,
        q1_norm=q1n,
        q2_norm=q2n,
        f_norm=f_norm,
        grad_f_norm=grad_norm,
        C0_measured=measured,
        alpha=alpha,
    )
