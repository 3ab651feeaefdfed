"""Independent reference computations used by the tests.

Nothing here calls the chain decomposition or the package's sparse solver:
brackets are expanded from the derivation definition and linear systems are
solved by a plain dense Gauss-Jordan elimination.
"""

from __future__ import annotations

from nilnf import Poly, VectorField
from nilnf.poly import monomials


def bracket(V: VectorField, W: VectorField) -> VectorField:
    """``[V, W]`` with component ``i`` equal to ``V(W_i) - W(V_i)``."""
    n = V.n

    def act(F, f):
        out = Poly.zero(n)
        for j in range(n):
            out = out + F.components[j] * f.derive(j)
        return out

    return VectorField([act(V, W.components[i]) - act(W, V.components[i]) for i in range(n)])


def gauss_jordan(rows: list[list], rhs: list | None = None):
    """Row-reduce a dense matrix (optionally augmented).

    Returns ``(rank, solution)`` where ``solution`` is a particular solution
    with free variables set to 0, or ``None`` if the system is inconsistent
    (or no right-hand side was given).
    """
    m = [list(r) + ([rhs[i]] if rhs is not None else []) for i, r in enumerate(rows)]
    ncols = len(rows[0]) if rows else 0
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
        if r == len(m):
            break
    if rhs is None:
        return r, None
    for i in range(r, len(m)):
        if m[i][ncols] != 0:
            return r, None
    sol = [0] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = m[i][ncols]
    return r, sol


def field_basis(n: int, lo: int, hi: int) -> list[tuple]:
    return [(a, i) for k in range(lo, hi + 1) for a in monomials(n, k) for i in range(n)]


def field_coords(V: VectorField, keys: list[tuple]) -> list:
    sp = V.to_sparse()
    return [sp.get(k, 0) for k in keys]


def windowed_solve(triple, NF: VectorField, Z: VectorField, lo: int, hi: int) -> VectorField:
    """``U`` in ``Im d0*`` with ``pi_Im J^hi [NF, U] = Z`` on the window, by dense solve.

    Writes ``U = [N*, W]`` and imposes ``[N*, J^hi[NF, U] - Z] = 0``, which is
    equivalent to the projected equation because ``Ker d0*`` is the orthogonal
    complement of ``Im box``.
    """
    n = triple.n
    keys = field_basis(n, lo, hi)
    cols = []
    for a, i in keys:
        W = VectorField.basis_element(a, i)
        U = bracket(triple.Nstar, W)
        img = bracket(triple.Nstar, bracket(NF, U).window(lo, hi))
        cols.append(field_coords(img, keys))
    rows = [[cols[j][r] for j in range(len(keys))] for r in range(len(keys))]
    rhs = field_coords(bracket(triple.Nstar, Z), keys)
    _, sol = gauss_jordan(rows, rhs)
    if sol is None:
        raise AssertionError("oracle system is inconsistent")
    W = VectorField.from_sparse(n, {k: c for k, c in zip(keys, sol) if c != 0})
    return bracket(triple.Nstar, W)


def box_matrix(triple, k: int):
    """Matrix of ``[N, [N*, .]]`` on ``V_k`` in the monomial basis."""
    keys = field_basis(triple.n, k, k)
    cols = []
    for a, i in keys:
        img = bracket(triple.N, bracket(triple.Nstar, VectorField.basis_element(a, i)))
        cols.append(field_coords(img, keys))
    return [[cols[j][r] for j in range(len(keys))] for r in range(len(keys))]


def eigen_multiplicities_match(M: list[list], claimed: dict) -> bool:
    """For a diagonalizable ``M``: ``rank(M - mu) = dim - mult(mu)`` for each claimed eigenvalue."""
    dim = len(M)
    if sum(claimed.values()) != dim:
        return False
    for mu, mult in claimed.items():
        shifted = [[M[i][j] - (mu if i == j else 0) for j in range(dim)] for i in range(dim)]
        r, _ = gauss_jordan(shifted)
        if r != dim - mult:
            return False
    return True
