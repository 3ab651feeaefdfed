"""Normalization drivers, first integrals, the ``N + f N*`` condition and radii.

Both drivers keep a single generator ``U`` with ``Phi^{-1} = id + U`` and
``U`` in ``Im d0*`` degree by degree, and always conjugate the original
field by it.  This is the unique normalizing transformation with no
component on ``Ker d0``; the degreewise driver adds one degree at a time,
the Newton driver a whole window ``[m+1, 2m]``.  Because both solve the
same triangular system, they return the same normal form.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cohom import (
    IteratedSolution,
    apply_d0_star,
    inverse_tangent,
    is_joint_invariant,
    iterated_solve,
    perturbed_solve,
    project,
    solve_homological,
    solver_constant_d,
)
from .linalg import Echelon, nullspace, solve
from .poly import Poly, monomials
from .sl2 import VF, Sl2Triple
from .vfield import (
    VectorField,
    conjugate_truncated,
    jacobian_rnorm,
    lie_bracket,
    rnorm,
)

__all__ = [
    "NormalizationResult",
    "normalize_degreewise",
    "normalize_newton",
    "NewtonStepResult",
    "newton_step",
    "NewtonSchedule",
    "build_schedule",
    "measure_constants",
    "FirstIntegralBasis",
    "first_integrals",
    "first_integrals_of_field",
    "ConditionResult",
    "check_condition",
    "shape_membership_3d",
    "kernel_d0_component",
    "RadiiReport",
    "radii_sequence",
]


def max_workers() -> int:
    """Worker cap from ``NILNF_THREADS`` (default 1, sequential)."""
    try:
        return max(1, int(os.environ.get("NILNF_THREADS", "1")))
    except ValueError:
        return 1


def _is_zero(triple: Sl2Triple, V) -> bool:
    z = triple.mode.is_zero
    if isinstance(V, VectorField):
        return all(z(c) for p in V.components for c in p.terms.values())
    return all(z(c) for c in V.terms.values())


def _check_linear_part(triple: Sl2Triple, V: VectorField):
    if V.n != triple.n:
        raise ValueError(f"field has dimension {V.n}, triple has {triple.n}")
    if not _is_zero(triple, V.homogeneous(0)):
        raise ValueError("field does not vanish at the origin")
    if not _is_zero(triple, V.homogeneous(1) - triple.N):
        raise ValueError("linear part of the field is not the triple's N")


def kernel_d0_component(triple: Sl2Triple, U: VectorField) -> VectorField:
    """Orthogonal projection of ``U`` onto ``Ker d0`` (the chain ends ``v_lam``)."""
    from .cohom import _negligible, _slices
    from .sl2 import _axpy

    acc: dict = {}
    mode = triple.mode
    for k, vec in _slices(U).items():
        dec = triple.decomposition(VF, k)
        for ch, row in zip(dec.chains, dec.coords(vec)):
            c = row[ch.weight]
            if not _negligible(mode, c, ch.norms_sq[ch.weight]):
                _axpy(acc, c, ch.vectors[ch.weight], mode)
    return VectorField.from_sparse(U.n, acc)


# ---------------------------------------------------------------------------
# results


@dataclass
class NormalizationResult:
    """Normal form ``NF`` up to ``order`` and the transformation producing it.

    ``generator`` is ``U`` with ``Phi^{-1} = id + U``; ``steps`` lists the
    increments (one per degree or per Newton window).  ``remainder`` holds
    the degree ``order + 1`` terms of the conjugated field.
    """

    NF: VectorField
    generator: VectorField
    steps: list
    order: int
    driver: str
    remainder: VectorField
    verification: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.verification.values())

    def to_json(self) -> dict:
        return {
            "driver": self.driver,
            "order": self.order,
            "normal_form": self.NF.to_json(),
            "generator": self.generator.to_json(),
            "steps": [
                {"window": list(s["window"]), "U": s["U"].to_json(), "path": s.get("path", "degreewise")}
                for s in self.steps
            ],
            "remainder": self.remainder.to_json(),
            "verification": {k: ("exact-zero" if v else "FAILED") for k, v in self.verification.items()},
        }


def _verify_result(triple: Sl2Triple, V: VectorField, res: NormalizationResult):
    full = conjugate_truncated(V, res.generator, res.order + 1)
    res.remainder = full.homogeneous(res.order + 1)
    res.verification["conjugacy"] = _is_zero(triple, full.truncate(res.order) - res.NF)
    res.verification["normal_form_in_ker_d0_star"] = _is_zero(
        triple, apply_d0_star(triple, res.NF - triple.N)
    )
    res.verification["generator_off_ker_d0"] = all(
        _is_zero(triple, kernel_d0_component(triple, s["U"])) for s in res.steps
    )


def normalize_degreewise(triple: Sl2Triple, V: VectorField, max_deg: int, verify: bool = True) -> NormalizationResult:
    """Normalize degree by degree: ``U_k = X box^{-1} pi_Im R_k``, slice ``pi_Ker R_k`` kept."""
    _check_linear_part(triple, V)
    if max_deg < 1:
        raise ValueError("max_deg must be >= 1")
    n = triple.n
    gen = VectorField.zero(n)
    NF = triple.N
    steps = []
    for k in range(2, max_deg + 1):
        R_k = conjugate_truncated(V, gen, k).homogeneous(k)
        U_k, K_k = solve_homological(triple, R_k)
        gen = gen + U_k
        NF = NF + K_k
        steps.append({"window": (k, k), "U": U_k, "path": "degreewise"})
    res = NormalizationResult(NF, gen, steps, max_deg, "degreewise", VectorField.zero(n))
    if verify:
        _verify_result(triple, V, res)
    return res


# ---------------------------------------------------------------------------
# Newton step


@dataclass
class NewtonStepResult:
    U: VectorField
    applied: VectorField
    NF: VectorField
    B_tilde: VectorField
    remainder: VectorField | None
    path: str
    alpha: int
    window: tuple
    condition: "ConditionResult | None"
    diagnostics: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)


def _new_remainder(NF_m, R, U, B_tilde, order):
    """``C~`` from ``(I + DU) C~ = NF o (id+U) - NF + R o (id+U) - B~ - DU.(NF + B~)``."""
    rhs = (
        NF_m.compose(U, order)
        - NF_m
        + R.truncate(order).compose(U, order)
        - B_tilde
        - U.jacobian_apply(NF_m + B_tilde, order)
    ).truncate(order)
    C = rhs
    for _ in range(order + 1):
        nxt = (rhs - U.jacobian_apply(C, order)).truncate(order)
        if nxt == C:
            return C
        C = nxt
    raise ArithmeticError("remainder recursion did not stabilise")


def newton_step(
    triple: Sl2Triple,
    NF_m: VectorField,
    remainder: VectorField,
    m: int,
    schedule: "NewtonSchedule | None" = None,
    prior: VectorField | None = None,
    hi: int | None = None,
    remainder_order: int | None = None,
) -> NewtonStepResult:
    """One doubling step: normalize ``NF_m + remainder`` from order ``m`` to ``2m``.

    Solves ``pi_Im J^{2m}[NF_m, U] = pi_Im J^{2m} remainder`` with ``U`` in
    ``Im d0*``.  When ``NF_m - N = f N*`` with ``f`` a joint invariant the
    ``Q1``/``Q2`` Neumann series is used; otherwise the general terminating
    series.  ``prior`` is an already applied generator: the window solve then
    accounts for ``(id + prior) o (id + G) = id + prior + U``.
    ``B~ = pi_Ker B - pi_Ker J^{2m}[NF_m, U]`` and ``NF_{2m} = NF_m + B~``.
    """
    hi = 2 * m if hi is None else hi
    if not m + 1 <= hi <= 2 * m:
        raise ValueError("window end must lie in [m+1, 2m]")
    _check_linear_part(triple, NF_m + remainder)
    if NF_m.degree() > m:
        raise ValueError(f"NF_m has terms above degree {m}")
    if not _is_zero(triple, apply_d0_star(triple, NF_m - triple.N)):
        raise ValueError("NF_m - N is not in Ker d0*")
    if remainder.order() != -1 and remainder.order() <= m:
        raise ValueError(f"remainder must have order >= {m + 1}")
    prior = prior if prior is not None and not prior.is_zero() else None
    diagnostics = {}
    if schedule is not None:
        diagnostics = schedule.diagnose(NF_m, remainder, m)

    B = remainder.window(m + 1, hi)
    split = project(triple, B)
    Z = split.im_part
    cond = check_condition(triple, NF_m) if prior is None and hi == 2 * m else None
    if cond is not None and cond.holds:
        sol: IteratedSolution = iterated_solve(triple, cond.f, Z, m)
    else:
        sol = perturbed_solve(triple, NF_m, Z, m + 1, hi, prior)
    U = sol.U
    G = inverse_tangent(prior, U, hi) if prior is not None else U
    B_tilde = split.ker_part - project(triple, lie_bracket(NF_m, G, hi).drop_below(m + 1)).ker_part
    NF_new = NF_m + B_tilde
    verification = {
        "window_equation": sol.verified,
        "B_tilde_in_ker_d0_star": _is_zero(triple, apply_d0_star(triple, B_tilde)),
        "U_off_ker_d0": _is_zero(triple, kernel_d0_component(triple, U)),
    }
    new_rem = None
    if prior is None:
        conj = conjugate_truncated(NF_m + remainder, U, hi)
        verification["conjugacy"] = _is_zero(triple, conj - NF_new)
        if remainder_order is not None and remainder_order > hi:
            new_rem = _new_remainder(NF_m, remainder, U, B_tilde, remainder_order)
            direct = conjugate_truncated(NF_m + remainder, U, remainder_order) - NF_new
            verification["remainder_formula"] = _is_zero(triple, new_rem - direct)
            verification["remainder_order"] = _is_zero(triple, new_rem.truncate(hi))
    if not all(verification.values()):
        failed = [k for k, v in verification.items() if not v]
        raise ArithmeticError(f"Newton step verification failed: {failed}")
    return NewtonStepResult(
        U=U,
        applied=G,
        NF=NF_new,
        B_tilde=B_tilde,
        remainder=new_rem,
        path=sol.path,
        alpha=sol.alpha,
        window=(m + 1, hi),
        condition=cond,
        diagnostics=diagnostics,
        verification=verification,
    )


def normalize_newton(
    triple: Sl2Triple,
    V: VectorField,
    order: int,
    schedule: "NewtonSchedule | None" = None,
    verify: bool = True,
) -> NormalizationResult:
    """Newton doubling ``1 -> 2 -> 4 -> ...`` up to ``order`` (last window clipped)."""
    _check_linear_part(triple, V)
    n = triple.n
    gen = VectorField.zero(n)
    steps = []
    m = 1
    NF = triple.N
    while m < order:
        hi = min(2 * m, order)
        W = conjugate_truncated(V, gen, hi)
        NF_m = W.truncate(m)
        rem = W.drop_below(m + 1)
        st = newton_step(triple, NF_m, rem, m, schedule=schedule, prior=gen, hi=hi)
        gen = gen + st.U
        NF = st.NF
        steps.append(
            {"window": st.window, "U": st.U, "path": st.path, "alpha": st.alpha, "diagnostics": st.diagnostics}
        )
        m = hi
    res = NormalizationResult(NF, gen, steps, order, "newton", VectorField.zero(n))
    if verify:
        _verify_result(triple, V, res)
    return res


# ---------------------------------------------------------------------------
# schedule


@dataclass
class NewtonSchedule:
    """Constants of the convergence scheme; predicates are float diagnostics only."""

    eta: float
    d: float
    C0: float
    c: float
    n: int
    r: float = 1.0
    linear_norms: tuple = ()

    def gamma(self, k: int) -> float:
        m = 2**k
        return math.exp(-math.log(2 * m * self.d) / m)

    def radii(self, k: int, r: float | None = None) -> dict:
        """``rho = m^{-2/m} r`` and ``R = gamma_k m^{-4/m} r`` for ``m = 2^k``."""
        r = self.r if r is None else r
        m = 2**k
        rho = m ** (-2 / m) * r
        R = self.gamma(k) * m ** (-4 / m) * r
        return {"m": m, "gamma": self.gamma(k), "rho": rho, "R": R, "ordered": rho < R < r}

    def m0(self, kmax: int = 40):
        """Least ``m = 2^k`` with ``rho < R < r``, or ``None`` if none up to ``2^kmax``."""
        for k in range(1, kmax + 1):
            if self.radii(k)["ordered"]:
                return 2**k
        return None

    def in_NF(self, X: VectorField, N: VectorField, m: int, r: float | None = None) -> bool:
        r = self.r if r is None else r
        D = X - N
        return max(rnorm(D, r).value, jacobian_rnorm(D, r)) < self.eta - 8 * self.n / m

    def in_B(self, X: VectorField, m: int, r: float | None = None) -> bool:
        r = self.r if r is None else r
        return (X.order() == -1 or X.order() >= m + 1) and rnorm(X, r).value < 1

    def diagnose(self, NF_m: VectorField, remainder: VectorField, m: int) -> dict:
        N = NF_m.homogeneous(1)
        D = NF_m - N
        smallness = rnorm(D, self.r).value + jacobian_rnorm(D, self.r)
        return {
            "in_NF": self.in_NF(NF_m, N, m),
            "in_B": self.in_B(remainder, m),
            "smallness": smallness,
            "smallness_below_eta": smallness < self.eta,
            "threshold": self.eta - 8 * self.n / m,
        }

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "d": self.d,
            "C0": self.C0,
            "c": self.c,
            "n": self.n,
            "r": self.r,
            "m0": self.m0(),
        }


def measure_constants(triple: Sl2Triple, samples: int = 2, m: int = 4, seed: int = 0, cap: int = 4) -> tuple[float, float]:
    """Empirical ``C0`` (``||Q2|| / |||grad f|||``) and ``c`` (derivative estimate).

    Joint invariants come from :func:`first_integrals` up to ``cap``; with
    none available both constants are reported as 0.
    """
    import random

    from .cohom import operator_bounds

    rng = random.Random(seed)
    basis = first_integrals(triple, cap).basis
    if not basis:
        return 0.0, 0.0
    C0 = 0.0
    c = 0.0
    for _ in range(samples):
        f = Poly.zero(triple.n)
        for b in basis:
            k = rng.randint(-3, 3) or 1
            f = f + b.scale(k)
        if 2 * min(b.degree() for b in basis) - 1 <= 2 * m:
            rep = operator_bounds(triple, f, 1, m)
            C0 = max(C0, rep.C0_measured or 0.0)
        D = triple.Nstar.times_poly(f)
        for r in (0.5, 1.0):
            denom = rnorm(D, r).value + jacobian_rnorm(D, r)
            for j in range(triple.n):
                c = max(c, rnorm(f.derive(j), r).value / denom)
    return C0, c


def build_schedule(triple: Sl2Triple, r: float = 1.0, C0: float | None = None, c: float | None = None) -> NewtonSchedule:
    """``eta`` = largest dyadic with ``(6 + C0 n c max(|N|_1,|N*|_1,|H|_1)) eta < 1/2``."""
    if C0 is None or c is None:
        mC0, mc = measure_constants(triple)
        C0 = mC0 if C0 is None else C0
        c = mc if c is None else c
    lin = (rnorm(triple.N, 1).value, rnorm(triple.Nstar, 1).value, rnorm(triple.Hprime, 1).value)
    K = 6 + C0 * triple.n * c * max(lin)
    eta = 1.0
    while K * eta >= 0.5:
        eta /= 2
    return NewtonSchedule(eta=eta, d=solver_constant_d(triple), C0=C0, c=c, n=triple.n, r=r, linear_norms=lin)


# ---------------------------------------------------------------------------
# first integrals


@dataclass
class FirstIntegralBasis:
    cap: int
    basis: list
    dims: dict
    convention: str

    def to_json(self) -> dict:
        return {
            "cap": self.cap,
            "dims": {str(k): v for k, v in self.dims.items()},
            "convention": self.convention,
            "basis": [b.to_json() for b in self.basis],
        }


def _normalize_leading(p: Poly, order: list) -> Poly:
    for a in order:
        c = p.terms.get(a)
        if c:
            return p.scale(1 / c if not isinstance(c, float) else 1.0 / c)
    return p


def _mono_order(n: int, lo: int, hi: int) -> list:
    out = []
    for k in range(lo, hi + 1):
        out.extend(monomials(n, k))
    return out


def first_integrals(triple: Sl2Triple, cap: int) -> FirstIntegralBasis:
    """Basis of ``Ker N cap Ker N*`` on ``P_1 + ... + P_cap`` (constants omitted)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    n = triple.n
    mode = triple.mode

    def kernel(k):
        monos = monomials(n, k)
        rows: dict = {}
        for col, a in enumerate(monos):
            for tag, F in (("N", triple._Y), ("Ns", triple._X)):
                for t, c in F.on_monomial(a).items():
                    rows.setdefault((tag, t), {})[col] = c
        null = nullspace(list(rows.values()), len(monos), one=mode.one, is_zero=mode.is_zero)
        return [_normalize_leading(Poly(n, {monos[c]: v for c, v in vec.items()}, True), list(monos)) for vec in null]

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        kernels = list(pool.map(kernel, range(1, cap + 1)))
    basis = [p for ker in kernels for p in ker]
    dims = {k: len(ker) for k, ker in zip(range(1, cap + 1), kernels)}
    return FirstIntegralBasis(cap, basis, dims, "exact kernel of N and N* on each P_k")


def first_integrals_of_field(V: VectorField, cap: int, extension: int | None = None, mode=None) -> FirstIntegralBasis:
    """Polynomials ``f`` of degree ``<= cap`` (no constant term) that are jets of first integrals.

    ``f`` is accepted when some ``F`` of degree ``<= cap + extension`` with
    ``J^cap F = f`` satisfies ``J^{cap+extension}(L_V F) = 0``.  With
    ``extension = 0`` this is the plain test ``J^cap(L_V f) = 0``, which
    cannot see obstructions that only appear above the cap.  The default
    ``extension = cap`` checks up to degree ``2 cap``.
    """
    from .scalar import EXACT

    if cap < 1:
        raise ValueError("cap must be >= 1")
    extension = cap if extension is None else extension
    if extension < 0:
        raise ValueError("extension must be >= 0")
    mode = mode or EXACT
    n = V.n
    top = cap + extension
    monos = _mono_order(n, 1, top)
    rows: dict = {}
    for col, a in enumerate(monos):
        img = V.apply(Poly.monomial(a, mode.one), top)
        for t, c in img.items():
            rows.setdefault(t, {})[col] = c
    null = nullspace(list(rows.values()), len(monos), one=mode.one, is_zero=mode.is_zero)
    low = {a: i for i, a in enumerate(monos) if sum(a) <= cap}
    ech = Echelon(len(low), mode.is_zero)
    for vec in null:
        trunc = {low[monos[c]]: v for c, v in vec.items() if monos[c] in low}
        if trunc:
            ech.add(trunc)
    low_list = sorted(low, key=lambda a: low[a])
    basis = []
    dims: dict = {}
    for piv in sorted(ech.pivots):
        row = ech.pivots[piv]
        p = Poly(n, {low_list[c]: v for c, v in row.items()}, True)
        basis.append(p)
        k = p.order()
        dims[k] = dims.get(k, 0) + 1
    conv = (
        f"jets of degree <= {cap} extendable to degree {top} with J^{top}(L_V F) = 0"
        if extension
        else f"J^{cap}(L_V f) = 0; obstructions above degree {cap} unchecked"
    )
    return FirstIntegralBasis(cap, basis, dims, conv)


# ---------------------------------------------------------------------------
# condition N + f N*


@dataclass
class ConditionResult:
    holds: bool
    f: Poly | None
    reason: str

    def to_json(self) -> dict:
        return {"holds": self.holds, "f": self.f.to_json() if self.f is not None else None, "reason": self.reason}


def check_condition(triple: Sl2Triple, NF: VectorField, cap: int | None = None) -> ConditionResult:
    """Does ``NF - N = f N*`` hold with ``N(f) = N*(f) = 0`` (up to ``cap``)?"""
    n = triple.n
    mode = triple.mode
    D = NF - triple.N
    if not _is_zero(triple, D.truncate(1)):
        raise ValueError("NF - N must have order >= 2")
    cap = D.degree() if cap is None else cap
    D = D.truncate(cap)
    f = Poly.zero(n)
    Ns = triple.matrix_Nstar
    for k in range(2, cap + 1):
        Dk = D.homogeneous(k).to_sparse()
        if not Dk:
            continue
        monos = monomials(n, k - 1)
        rows: dict = {}
        for col, a in enumerate(monos):
            for i in range(n):
                for j in range(n):
                    if mode.is_zero(Ns[i][j]):
                        continue
                    b = list(a)
                    b[j] += 1
                    rows.setdefault((tuple(b), i), {})[col] = Ns[i][j]
        if any(key not in rows for key in Dk):
            return ConditionResult(False, None, f"NF - N is not of the form f N* at degree {k}")
        keys = list(rows)
        sol = solve([rows[key] for key in keys], [[Dk.get(key, mode.zero) for key in keys]], len(monos), mode.is_zero)
        if sol is None:
            return ConditionResult(False, None, f"NF - N is not of the form f N* at degree {k}")
        f = f + Poly(n, {monos[c]: v for c, v in sol[0].items()}, True)
    if not _is_zero(triple, triple.N.apply(f)):
        return ConditionResult(False, f, "N(f) != 0: f is not a first integral of N")
    if not _is_zero(triple, triple.Nstar.apply(f)):
        return ConditionResult(False, f, "N*(f) != 0: f is not a first integral of N*")
    return ConditionResult(True, f, "NF = N + f N* with f a joint invariant")


def shape_membership_3d(triple: Sl2Triple, NF: VectorField) -> dict[int, bool]:
    """Per degree, whether ``NF - N`` lies in the span of the 3D family.

    Family: ``P1(x,h) E + P2(x,h) (x d/dy + y d/dz) + P3(x,h) d/dz`` with
    ``E`` the Euler field and ``h = xz - y^2/2``.
    """
    if tuple(triple.jordan.blocks) != (3,):
        raise ValueError("the closed normal-form shape is only available for Jordan type [3]")
    mode = triple.mode
    x = Poly.var(3, 0, mode.one)
    y = Poly.var(3, 1, mode.one)
    z = Poly.var(3, 2, mode.one)
    h = x * z - (y * y).scale(mode.coerce(1) / 2)
    E = VectorField([x, y, z])
    M = VectorField([Poly.zero(3), x, y])
    dz = VectorField([Poly.zero(3), Poly.zero(3), Poly.const(3, mode.one)])

    def xh(deg):
        out = []
        for b in range(deg // 2 + 1):
            a = deg - 2 * b
            out.append((x**a) * (h**b))
        return out

    result = {}
    D = NF - triple.N
    for k, Dk in D.slices().items():
        gens = []
        if k >= 1:
            gens += [E.times_poly(p) for p in xh(k - 1)]
            gens += [M.times_poly(p) for p in xh(k - 1)]
        gens += [dz.times_poly(p) for p in xh(k)]
        keys: dict = {}
        cols = []
        for g in gens:
            cols.append(g.to_sparse())
            for key in cols[-1]:
                keys.setdefault(key, len(keys))
        target = Dk.to_sparse()
        if any(key not in keys for key in target):
            result[k] = False
            continue
        rows = [{} for _ in keys]
        for j, col in enumerate(cols):
            for key, c in col.items():
                rows[keys[key]][j] = c
        rhs = [mode.zero] * len(keys)
        for key, c in target.items():
            rhs[keys[key]] = c
        result[k] = solve(rows, [rhs], len(cols), mode.is_zero) is not None
    return result


# ---------------------------------------------------------------------------
# radii


@dataclass
class RadiiReport:
    radii: list
    m1: int | None
    limit_estimate: float
    tail_log: float | None
    above_half: bool
    series_gaps: dict
    gaps_nonincreasing: dict

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _log_factor(i: int, d: float) -> float:
    # log of gamma_i * m^(-2/m), m = 2^i
    m = 2.0**i
    return -(math.log(2 * d) + i * math.log(2)) / m - 2 * i * math.log(2) / m


def radii_sequence(r0: float, kmax: int, d: float, detect_m1: bool = True, horizon: int = 400) -> RadiiReport:
    """``R_0 = r0``, ``R_{k+1} = gamma_k m^{-2/m} R_k`` with ``m = 2^k``, ``gamma_k = (2md)^{-1/m}``.

    ``m1`` is the least index with ``prod_{i >= m1} gamma_i (2^i)^{-2/2^i} > 1/2``
    (product over the factors still to be applied from ``R_{m1}``), so
    ``R_k > R_{m1} / 2`` for every ``k > m1``; this is checked up to ``kmax``.
    The series in ``log R`` are summed up to ``horizon`` for the limit.
    """
    if not 0.5 < r0 <= 1:
        raise ValueError("r0 must lie in (1/2, 1]")
    if not d > 0:
        raise ValueError("d must be positive")
    logs = [_log_factor(i, d) for i in range(max(kmax, horizon) + 1)]
    R = [float(r0)]
    for k in range(kmax):
        R.append(R[-1] * math.exp(logs[k]))
    limit = r0 * math.exp(math.fsum(logs))
    m1 = None
    tail = None
    above = True
    if detect_m1:
        for i0 in range(len(logs)):
            t = math.fsum(logs[i0:])
            if t > math.log(0.5):
                m1, tail = i0, t
                break
        if m1 is not None:
            above = all(R[k] > R[m1] / 2 for k in range(m1 + 1, kmax + 1)) if m1 < kmax else True
        else:
            above = False
    gaps = {
        "log_term": [math.log(2 ** (i + 1) * d) / 2**i for i in range(1, kmax + 1)],
        "geometric": [1 / 2**i for i in range(1, kmax + 1)],
        "i_over_2i": [i / 2**i for i in range(1, kmax + 1)],
    }
    mono = {k: all(abs(v[i + 1]) <= abs(v[i]) + 1e-15 for i in range(len(v) - 1)) for k, v in gaps.items()}
    return RadiiReport(R, m1, limit, tail, above, gaps, mono)
