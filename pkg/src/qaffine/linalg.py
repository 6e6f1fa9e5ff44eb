"""Exact sparse linear algebra over QScalar.

Systems are eliminated online in reduced row-echelon form.  Pivots are
chosen among the cheapest coefficients (monomials first, then short rows),
which keeps the intermediate rational functions small.  Every system is
checked for consistency and full column rank; nothing is silently guessed.
"""

from __future__ import annotations

from .qfield import ONE, ZERO, QScalar
from .sparse import SMat


class LinearSystemError(ArithmeticError):
    pass


class InconsistentSystem(LinearSystemError):
    pass


class UnderdeterminedSystem(LinearSystemError):
    pass


def _cost(c: QScalar) -> tuple:
    return (0 if c.is_monomial() else 1, len(c.n) + len(c.d))


class EchelonSolver:
    """Accumulates equations sum_v coeff[v] * x_v = rhs in reduced echelon form."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.pivots = {}          # var -> (row dict without pivot, rhs)  meaning x_var + row = rhs
        self.residuals = 0        # number of equations that reduced to 0 = 0

    def add(self, coeffs: dict, rhs: QScalar, label=None):
        row = {v: c for v, c in coeffs.items() if not c.is_zero()}
        # eliminate existing pivots (their rows only contain free variables)
        for v in [v for v in row if v in self.pivots]:
            c = row.pop(v)
            prow, prhs = self.pivots[v]
            for u, pc in prow.items():
                nv = row.get(u, ZERO) - c * pc
                if nv.is_zero():
                    row.pop(u, None)
                else:
                    row[u] = nv
            rhs = rhs - c * prhs
        if not row:
            if not rhs.is_zero():
                raise InconsistentSystem(f"inconsistent equation {label}: 0 = {rhs}")
            self.residuals += 1
            return
        pv = min(row, key=lambda v: (_cost(row[v]), v))
        pc = row.pop(pv)
        inv = pc.inv()
        row = {u: c * inv for u, c in row.items()}
        rhs = rhs * inv
        # keep the echelon form reduced: substitute into rows mentioning pv
        for v, (prow, prhs) in self.pivots.items():
            c = prow.get(pv)
            if c is None:
                continue
            del prow[pv]
            for u, rc in row.items():
                nv = prow.get(u, ZERO) - c * rc
                if nv.is_zero():
                    prow.pop(u, None)
                else:
                    prow[u] = nv
            self.pivots[v] = (prow, prhs - c * rhs)
        self.pivots[pv] = (row, rhs)

    def rank(self) -> int:
        return len(self.pivots)

    def solution(self, what="system") -> list:
        if len(self.pivots) < self.nvars:
            free = sorted(set(range(self.nvars)) - set(self.pivots))
            raise UnderdeterminedSystem(
                f"{what}: rank {len(self.pivots)} < {self.nvars} unknowns; free {free[:8]}")
        out = [ZERO] * self.nvars
        for v, (row, rhs) in self.pivots.items():
            assert not row
            out[v] = rhs
        return out


def inverse(a: SMat) -> SMat:
    """Exact inverse of a square sparse matrix (Gauss-Jordan)."""
    if a.n != a.m:
        raise ValueError("inverse of a non-square matrix")
    n = a.n
    if a.is_diagonal() and len(a.rows) == n:
        return SMat(n, n, {i: {i: r[i].inv()} for i, r in a.rows.items()})
    # solve A X = I column-block-wise through the row-echelon solver on A^T rows
    rows = {i: dict(r) for i, r in a.rows.items()}
    inv = {i: {i: ONE} for i in range(n)}
    used = set()
    order = []
    for col in range(n):
        cands = [i for i in rows if i not in used and col in rows[i]]
        if not cands:
            raise ZeroDivisionError(f"singular matrix (column {col})")
        p = min(cands, key=lambda i: (_cost(rows[i][col]), len(rows[i])))
        used.add(p)
        order.append((col, p))
        pinv = rows[p][col].inv()
        rows[p] = {j: v * pinv for j, v in rows[p].items()}
        inv[p] = {j: v * pinv for j, v in inv[p].items()}
        for i in list(rows):
            if i == p:
                continue
            c = rows[i].get(col)
            if c is None:
                continue
            for j, v in rows[p].items():
                nv = rows[i].get(j, ZERO) - c * v
                if nv.is_zero():
                    rows[i].pop(j, None)
                else:
                    rows[i][j] = nv
            tgt = inv[i]
            for j, v in inv[p].items():
                nv = tgt.get(j, ZERO) - c * v
                if nv.is_zero():
                    tgt.pop(j, None)
                else:
                    tgt[j] = nv
    out = {}
    for col, p in order:
        if inv[p]:
            out[col] = inv[p]
    return SMat(n, n, out)
