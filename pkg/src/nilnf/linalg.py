"""Sparse Gauss-Jordan elimination over an exact (or tolerant float) field.

Rows are ``dict[int, value]`` with integer column indices; values only need
``+ - * /`` and a zero test.  Pivots are chosen in increasing column order,
so the reduced basis is deterministic for a fixed column ordering.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

SparseVec = dict


def _default_is_zero(x) -> bool:
    return not x


def float_is_zero(tol: float) -> Callable[[float], bool]:
    return lambda x: abs(x) <= tol


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Columns ``>= nvars`` are treated as right-hand sides: they are carried
    along but never chosen as pivots.
    """

    def __init__(self, nvars: int, is_zero: Callable | None = None):
        self.nvars = nvars
        self.is_zero = is_zero or _default_is_zero
        self.pivots: dict[int, SparseVec] = {}
        self.inconsistent: list[SparseVec] = []

    def _clean(self, r: SparseVec) -> SparseVec:
        z = self.is_zero
        return {c: v for c, v in r.items() if not z(v)}

    def reduce(self, row: SparseVec) -> SparseVec:
        r = dict(row)
        for c in [c for c in r if c in self.pivots]:
            f = r.get(c)
            if f is None or self.is_zero(f):
                continue
            for cc, vv in self.pivots[c].items():
                nv = r.get(cc)
                r[cc] = -(f * vv) if nv is None else nv - f * vv
        return self._clean(r)

    def add(self, row: SparseVec) -> int | None:
        """Insert a row; return the new pivot column or ``None`` if dependent."""
        r = self.reduce(row)
        var_cols = [c for c in r if c < self.nvars]
        if not var_cols:
            if r:
                self.inconsistent.append(r)
            return None
        p = min(var_cols)
        inv = r[p]
        r = {c: v / inv for c, v in r.items()}
        for c, prow in self.pivots.items():
            f = prow.get(p)
            if f is None or self.is_zero(f):
                continue
            for cc, vv in r.items():
                nv = prow.get(cc)
                prow[cc] = -(f * vv) if nv is None else nv - f * vv
            self.pivots[c] = self._clean(prow)
        self.pivots[p] = r
        return p

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list[int]:
        return [c for c in range(self.nvars) if c not in self.pivots]


def echelon(rows: Iterable[SparseVec], nvars: int, is_zero=None) -> Echelon:
    e = Echelon(nvars, is_zero)
    for r in rows:
        e.add(r)
    return e


def rank(rows: Iterable[SparseVec], nvars: int, is_zero=None) -> int:
    return echelon(rows, nvars, is_zero).rank


def nullspace(rows: Iterable[SparseVec], nvars: int, one=1, is_zero=None) -> list[SparseVec]:
    """Basis of ``{x : row . x = 0 for every row}``, one vector per free column.

    Each basis vector has a ``one`` at its free column and is ordered by that
    column, so leading entries follow the column order.
    """
    e = echelon(rows, nvars, is_zero)
    basis = []
    for f in e.free_columns():
        v = {f: one}
        for p, prow in e.pivots.items():
            c = prow.get(f)
            if c is not None:
                v[p] = -c
        basis.append(v)
    return basis


def solve(
    rows: Sequence[SparseVec],
    rhs: Sequence[Sequence],
    nvars: int,
    is_zero=None,
) -> list[SparseVec] | None:
    """Solve ``A x = b`` for several right-hand sides at once.

    ``rows[i]`` is row ``i`` of ``A`` and ``rhs[j][i]`` the ``i``-th entry of the
    ``j``-th right-hand side.  Free variables are set to zero.  Returns
    ``None`` when any system is inconsistent.
    """
    nrhs = len(rhs)
    aug = []
    for i, row in enumerate(rows):
        r = dict(row)
        for j in range(nrhs):
            b = rhs[j][i]
            if b is not None and not (is_zero or _default_is_zero)(b):
                r[nvars + j] = b
        aug.append(r)
    e = echelon(aug, nvars, is_zero)
    if e.inconsistent:
        return None
    sols = []
    for j in range(nrhs):
        x = {}
        for p, prow in e.pivots.items():
            v = prow.get(nvars + j)
            if v is not None:
                x[p] = v
        sols.append(x)
    return sols


def matvec(rows: Sequence[SparseVec], x: SparseVec, zero=0) -> list:
    out = []
    for r in rows:
        s = zero
        for c, v in r.items():
            xv = x.get(c)
            if xv is not None:
                s = s + v * xv
        out.append(s)
    return out
