"""Truncated matrix-valued power series in one variable, plus a small
bivariate wrapper for the two-parameter identities.

A MatSeries stores coefficients for orders low..K; everything above K is
unknown, so products and inverses shrink K to what is actually determined.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import inverse
from .qfield import QScalar
from .sparse import SMat


class SeriesError(ValueError):
    pass


class MatSeries:
    __slots__ = ("dim", "low", "K", "coeffs")

    def __init__(self, dim: int, K: int, coeffs=None, low: int = 0):
        self.dim = dim
        self.K = K
        self.low = low
        self.coeffs = {}
        for n, c in (coeffs or {}).items():
            if n < low:
                raise SeriesError(f"order {n} below low order {low}")
            if n <= K and not c.is_zero():
                self.coeffs[n] = c

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, mat: SMat, K: int) -> "MatSeries":
        return cls(mat.n, K, {0: mat})

    @classmethod
    def identity(cls, dim: int, K: int) -> "MatSeries":
        return cls(dim, K, {0: SMat.identity(dim)})

    def __getitem__(self, n) -> SMat:
        if n > self.K:
            raise SeriesError(f"order {n} beyond truncation {self.K}")
        return self.coeffs.get(n) or SMat(self.dim, self.dim)

    def orders(self):
        return range(self.low, self.K + 1)

    def truncate(self, K: int) -> "MatSeries":
        if K > self.K:
            raise SeriesError("cannot raise the truncation order")
        return MatSeries(self.dim, K, self.coeffs, self.low)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, MatSeries):
            return NotImplemented
        K = min(self.K, other.K)
        return all(self[n] == other[n] for n in range(min(self.low, other.low), K + 1))

    def __repr__(self):
        return f"MatSeries(dim={self.dim}, low={self.low}, K={self.K}, orders={sorted(self.coeffs)})"

    # arithmetic -------------------------------------------------------------

    def _check(self, other):
        if self.dim != other.dim:
            raise SeriesError(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        K = min(self.K, other.K)
        low = min(self.low, other.low)
        out = {}
        for n in range(low, K + 1):
            a, b = self.coeffs.get(n), other.coeffs.get(n)
            if a is None and b is None:
                continue
            out[n] = b if a is None else (a if b is None else a + b)
        return MatSeries(self.dim, K, out, low)

    def __neg__(self):
        return MatSeries(self.dim, self.K, {n: -c for n, c in self.coeffs.items()}, self.low)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MatSeries":
        return MatSeries(self.dim, self.K, {n: m.scale(c) for n, m in self.coeffs.items()}, self.low)

    def __mul__(self, other):
        return mul(self, other)

    def map_coeffs(self, fn) -> "MatSeries":
        return MatSeries(self.dim, self.K, {n: fn(c) for n, c in self.coeffs.items()}, self.low)


def mul(a: MatSeries, b: MatSeries) -> MatSeries:
    a._check(b)
    low = a.low + b.low
    K = min(a.K + b.low, b.K + a.low)
    out = {}
    for i, x in a.coeffs.items():
        for j, y in b.coeffs.items():
            n = i + j
            if n > K:
                continue
            p = x @ y
            out[n] = p if n not in out else out[n] + p
    return MatSeries(a.dim, K, out, low)


def left_mul(mat: SMat, a: MatSeries) -> MatSeries:
    return MatSeries(a.dim, a.K, {n: mat @ c for n, c in a.coeffs.items()}, a.low)


def right_mul(a: MatSeries, mat: SMat) -> MatSeries:
    return MatSeries(a.dim, a.K, {n: c @ mat for n, c in a.coeffs.items()}, a.low)


def inv(a: MatSeries) -> MatSeries:
    """Series inverse; the order-0 coefficient must be invertible."""
    if a.low != 0:
        raise SeriesError("inverse needs a power series (low order 0)")
    try:
        c0inv = inverse(a[0])
    except ZeroDivisionError as exc:
        raise SeriesError(f"constant term not invertible: {exc}") from None
    out = {0: c0inv}
    for n in range(1, a.K + 1):
        acc = None
        for k in range(1, n + 1):
            ak = a.coeffs.get(k)
            bk = out.get(n - k)
            if ak is None or bk is None:
                continue
            p = ak @ bk
            acc = p if acc is None else acc + p
        if acc is not None:
            r = -(c0inv @ acc)
            if not r.is_zero():
                out[n] = r
    return MatSeries(a.dim, a.K, out)


def log_unipotent(a: MatSeries) -> MatSeries:
    """log(a) for a power series with identity constant term."""
    if a.low != 0 or not a[0].is_identity():
        raise SeriesError("log_unipotent needs constant term = identity")
    x = a - MatSeries.identity(a.dim, a.K)
    total = MatSeries(a.dim, a.K)
    power = x
    for k in range(1, a.K + 1):
        coeff = QScalar.const(Fraction((-1) ** (k + 1), k))
        total = total + power.scale(coeff)
        power = mul(power, x)
        if power.is_zero():
            break
    return total


def exp_nilpotent(x: MatSeries) -> MatSeries:
    """exp(x) for a power series with zero constant term."""
    if x.low != 0 or not x[0].is_zero():
        raise SeriesError("exp needs zero constant term")
    total = MatSeries.identity(x.dim, x.K)
    power = MatSeries.identity(x.dim, x.K)
    fact = 1
    for k in range(1, x.K + 1):
        power = mul(power, x)
        fact *= k
        if power.is_zero():
            break
        total = total + power.scale(QScalar.const(Fraction(1, fact)))
    return total


def rescale(a: MatSeries, c) -> MatSeries:
    """Substitute z -> c z (coefficient n multiplied by c^n)."""
    if not isinstance(c, QScalar):
        c = QScalar.const(c)
    if c.is_zero():
        raise SeriesError("rescale by zero")
    return MatSeries(a.dim, a.K, {n: m.scale(c ** n) for n, m in a.coeffs.items()}, a.low)


# ---------------------------------------------------------------------------
# bivariate series with total-degree truncation


class BiSeries:
    """sum_{i+j <= K} C_{ij} x^i y^j with matrix coefficients."""

    __slots__ = ("dim", "K", "coeffs")

    def __init__(self, dim, K, coeffs=None):
        self.dim = dim
        self.K = K
        self.coeffs = {k: v for k, v in (coeffs or {}).items()
                       if k[0] + k[1] <= K and not v.is_zero()}

    @classmethod
    def from_univariate(cls, s: MatSeries, kind: str, K: int) -> "BiSeries":
        """Embed s(x), s(y) or s(xy) according to kind in {'x', 'y', 'xy'}."""
        out = {}
        step = 2 if kind == "xy" else 1
        need = K // step
        if s.K < need:
            raise SeriesError(f"series known to order {s.K}, need {need}")
        for n, c in s.coeffs.items():
            if n * step > K:
                continue
            key = {"x": (n, 0), "y": (0, n), "xy": (n, n)}[kind]
            out[key] = c
        return cls(s.dim, K, out)

    def __mul__(self, other):
        K = min(self.K, other.K)
        out = {}
        for (i, j), a in self.coeffs.items():
            for (k, l), b in other.coeffs.items():
                if i + j + k + l > K:
                    continue
                key = (i + k, j + l)
                p = a @ b
                out[key] = p if key not in out else out[key] + p
        return BiSeries(self.dim, K, out)

    def __sub__(self, other):
        K = min(self.K, other.K)
        out = {k: v for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            out[k] = -v if k not in out else out[k] - v
        return BiSeries(self.dim, K, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def first_nonzero(self):
        if not self.coeffs:
            return None
        key = min(self.coeffs, key=lambda k: (k[0] + k[1], k))
        i, j, v = next(iter(self.coeffs[key].entries()))
        return key, (i, j), v
