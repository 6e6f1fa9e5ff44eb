"""Sparse matrices over QScalar (row -> column -> entry, zeros never stored)."""

from __future__ import annotations

from .qfield import ONE, ZERO, QScalar


class SMat:
    __slots__ = ("n", "m", "rows")

    def __init__(self, n: int, m: int | None = None, rows=None):
        self.n = n
        self.m = n if m is None else m
        self.rows = rows if rows is not None else {}

    # construction ---------------------------------------------------------

    @classmethod
    def from_entries(cls, n, m, entries):
        """entries: iterable of (i, j, value); repeated positions are summed."""
        rows = {}
        for i, j, v in entries:
            if not isinstance(v, QScalar):
                v = QScalar.const(v)
            if v.is_zero():
                continue
            r = rows.setdefault(i, {})
            old = r.get(j)
            nv = v if old is None else old + v
            if nv.is_zero():
                del r[j]
                if not r:
                    del rows[i]
            else:
                r[j] = nv
        return cls(n, m, rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def diag(cls, values):
        values = list(values)
        return cls.from_entries(len(values), len(values),
                                ((i, i, v) for i, v in enumerate(values)))

    @classmethod
    def unit(cls, n, i, j, value=ONE):
        return cls.from_entries(n, n, [(i, j, value)])

    # access -----------------------------------------------------------------

    def get(self, i, j) -> QScalar:
        r = self.rows.get(i)
        if r is None:
            return ZERO
        return r.get(j, ZERO)

    def entries(self):
        for i in sorted(self.rows):
            r = self.rows[i]
            for j in sorted(r):
                yield i, j, r[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def is_identity(self) -> bool:
        if self.n != self.m or len(self.rows) != self.n:
            return False
        return all(len(r) == 1 and i in r and r[i].is_one() for i, r in self.rows.items())

    def is_diagonal(self) -> bool:
        return all(len(r) == 1 and i in r for i, r in self.rows.items())

    def __eq__(self, other):
        if not isinstance(other, SMat):
            return NotImplemented
        return self.n == other.n and self.m == other.m and self.rows == other.rows

    def __hash__(self):
        raise TypeError("SMat is unhashable")

    def __repr__(self):
        return f"SMat({self.n}x{self.m}, nnz={self.nnz()})"

    # arithmetic -------------------------------------------------------------

    def _check_same(self, other):
        if (self.n, self.m) != (other.n, other.m):
            raise ValueError(f"shape mismatch {self.n}x{self.m} vs {other.n}x{other.m}")

    def __add__(self, other):
        self._check_same(other)
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            tgt = rows.get(i)
            if tgt is None:
                rows[i] = dict(r)
                continue
            for j, v in r.items():
                old = tgt.get(j)
                if old is None:
                    tgt[j] = v
                else:
                    nv = old + v
                    if nv.is_zero():
                        del tgt[j]
                    else:
                        tgt[j] = nv
            if not tgt:
                del rows[i]
        return SMat(self.n, self.m, rows)

    def __neg__(self):
        return SMat(self.n, self.m, {i: {j: -v for j, v in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SMat":
        if not isinstance(c, QScalar):
            c = QScalar.const(c)
        if c.is_zero():
            return SMat(self.n, self.m)
        if c.is_one():
            return self
        return SMat(self.n, self.m, {i: {j: c * v for j, v in r.items()} for i, r in self.rows.items()})

    def __matmul__(self, other):
        if self.m != other.n:
            raise ValueError(f"cannot multiply {self.n}x{self.m} by {other.n}x{other.m}")
        orows = other.rows
        out = {}
        for i, r in self.rows.items():
            acc = {}
            for k, a in r.items():
                rk = orows.get(k)
                if rk is None:
                    continue
                for j, b in rk.items():
                    p = a * b
                    old = acc.get(j)
                    acc[j] = p if old is None else old + p
            acc = {j: v for j, v in acc.items() if not v.is_zero()}
            if acc:
                out[i] = acc
        return SMat(self.n, other.m, out)

    def transpose(self) -> "SMat":
        rows = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return SMat(self.m, self.n, rows)

    def map(self, fn) -> "SMat":
        rows = {}
        for i, r in self.rows.items():
            nr = {}
            for j, v in r.items():
                w = fn(v)
                if not w.is_zero():
                    nr[j] = w
            if nr:
                rows[i] = nr
        return SMat(self.n, self.m, rows)

    def conj_diag(self, left, right) -> "SMat":
        """diag(left) @ self @ diag(right) for sequences of QScalars."""
        rows = {}
        for i, r in self.rows.items():
            li = left[i]
            rows[i] = {j: li * v * right[j] for j, v in r.items()}
        return SMat(self.n, self.m, rows)

    def apply(self, vec: dict) -> dict:
        """Matrix times sparse column vector {index: value}."""
        out = {}
        for i, r in self.rows.items():
            acc = None
            for j, v in r.items():
                x = vec.get(j)
                if x is not None:
                    p = v * x
                    acc = p if acc is None else acc + p
            if acc is not None and not acc.is_zero():
                out[i] = acc
        return out

    def trace(self) -> QScalar:
        out = ZERO
        for i, r in self.rows.items():
            v = r.get(i)
            if v is not None:
                out = out + v
        return out


def kron(a: SMat, b: SMat) -> SMat:
    rows = {}
    for i, ra in a.rows.items():
        for k, rb in b.rows.items():
            row = {}
            for j, va in ra.items():
                base = j * b.m
                for l, vb in rb.items():
                    row[base + l] = va * vb
            rows[i * b.n + k] = row
    return SMat(a.n * b.n, a.m * b.m, rows)


def embed(op: SMat, dims: tuple, slots: tuple) -> SMat:
    """Operator acting on the tensor factors ``slots`` of a product with ``dims``.

    ``op`` is indexed by the row-major combination of the selected factors
    in the order given by ``slots``.
    """
    k = len(dims)
    strides = [1] * k
    for p in range(k - 2, -1, -1):
        strides[p] = strides[p + 1] * dims[p + 1]
    sub_strides = [1] * len(slots)
    for p in range(len(slots) - 2, -1, -1):
        sub_strides[p] = sub_strides[p + 1] * dims[slots[p + 1]]
    total = strides[0] * dims[0]
    # decompose a sub-index into the contribution to the full index
    def full_part(sub):
        out = 0
        for p, s in enumerate(slots):
            d, sub = divmod(sub, sub_strides[p])
            out += d * strides[s]
        return out

    sub_dim = 1
    for s in slots:
        sub_dim *= dims[s]
    part = [full_part(t) for t in range(sub_dim)]
    rest = [p for p in range(k) if p not in slots]
    # enumerate the spectator indices
    spect = [0]
    for p in rest:
        spect = [base + x * strides[p] for base in spect for x in range(dims[p])]
    rows = {}
    for base in spect:
        for si, r in op.rows.items():
            rows[base + part[si]] = {base + part[sj]: v for sj, v in r.items()}
    return SMat(total, total, rows)


def block(mat: SMat, bi: int, bj: int, size: int) -> SMat:
    """Block (bi, bj) of size x size of a block matrix."""
    rows = {}
    lo, hi = bi * size, (bi + 1) * size
    clo, chi = bj * size, (bj + 1) * size
    for i, r in mat.rows.items():
        if lo <= i < hi:
            nr = {j - clo: v for j, v in r.items() if clo <= j < chi}
            if nr:
                rows[i - lo] = nr
    return SMat(size, size, rows)


def from_blocks(blocks: dict, nblocks: int, size: int) -> SMat:
    """Assemble {(bi, bj): SMat} into an (nblocks*size)-square matrix."""
    rows = {}
    for (bi, bj), b in blocks.items():
        for i, r in b.rows.items():
            tgt = rows.setdefault(bi * size + i, {})
            for j, v in r.items():
                tgt[bj * size + j] = v
    return SMat(nblocks * size, nblocks * size, {i: r for i, r in rows.items() if r})


def flip(mat: SMat, n: int) -> SMat:
    """P X P for X on V (x) V with dim V = n."""
    rows = {}
    for i, r in mat.rows.items():
        a, c = divmod(i, n)
        rows[c * n + a] = {(j % n) * n + j // n: v for j, v in r.items()}
    return SMat(mat.n, mat.m, rows)
