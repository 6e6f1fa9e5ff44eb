"""Affine root data for the seven families, the invariant form and the
weights of the vector representation.

Lattice vectors live in h* with basis alpha_0, ..., alpha_l, Lambda_0 and
exact rational coordinates.  Vertices follow Kac's enumeration except for
A_{2l}^(2), which is enumerated in reverse so that a_0 = 1 in every family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

FAMILIES = ("A", "B", "C", "D", "A2even", "A2odd", "D2")
MIN_RANK = {"A": 1, "B": 3, "C": 2, "D": 4, "A2even": 1, "A2odd": 3, "D2": 2}
TWISTED = ("A2even", "A2odd", "D2")


class RootDataError(ValueError):
    pass


@dataclass(frozen=True)
class AffineType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise RootDataError(f"unknown family {self.family!r}")
        if self.rank < MIN_RANK[self.family]:
            raise RootDataError(
                f"rank {self.rank} below the minimum {MIN_RANK[self.family]} for {self.family}")

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def twisted(self) -> bool:
        return self.family in TWISTED

    def kac_name(self) -> str:
        l = self.rank
        return {
            "A": f"A_{l}^(1)", "B": f"B_{l}^(1)", "C": f"C_{l}^(1)", "D": f"D_{l}^(1)",
            "A2even": f"A_{2 * l}^(2)", "A2odd": f"A_{2 * l - 1}^(2)", "D2": f"D_{l + 1}^(2)",
        }[self.family]


def cartan_matrix(t: AffineType) -> tuple:
    """Generalized Cartan matrix (a_ij), 0 <= i, j <= l."""
    l = t.rank
    n = l + 1
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2

    def link(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    fam = t.family
    if fam == "A":
        if l == 1:
            link(0, 1, -2, -2)
        else:
            for i in range(n):
                link(i, (i + 1) % n)
    elif fam in ("B", "D", "A2odd"):
        link(0, 2)
        for i in range(1, l - 1):
            link(i, i + 1)
        if fam == "B":
            link(l - 1, l, -1, -2)      # alpha_l short
        elif fam == "A2odd":
            link(l - 1, l, -2, -1)      # alpha_l long
        else:
            a[l - 1][l] = a[l][l - 1] = 0
            link(l - 2, l)
    elif fam == "C":
        link(0, 1, -1, -2)
        for i in range(1, l - 1):
            link(i, i + 1)
        link(l - 1, l, -2, -1)
    elif fam == "A2even":
        if l == 1:
            link(0, 1, -1, -4)
        else:
            link(0, 1, -1, -2)
            for i in range(1, l - 1):
                link(i, i + 1)
            link(l - 1, l, -1, -2)
    elif fam == "D2":
        link(0, 1, -2, -1)
        for i in range(1, l - 1):
            link(i, i + 1)
        link(l - 1, l, -1, -2)
    return tuple(tuple(r) for r in a)


# ---------------------------------------------------------------------------
# exact null vectors


def _nullspace(rows):
    """Rational null space of a small matrix (list of row lists)."""
    m = [[Fraction(x) for x in r] for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fcol]
        basis.append(v)
    return basis


def _primitive_positive(v):
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if ints[0] < 0:
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise RootDataError(f"null vector not positive: {ints}")
    return tuple(ints)


def marks_from_cartan(a) -> tuple:
    """(a_i) with sum_j a_ij a_j = 0."""
    ns = _nullspace([list(r) for r in a])
    if len(ns) != 1:
        raise RootDataError("Cartan matrix is not of affine type")
    return _primitive_positive(ns[0])


def comarks_from_cartan(a) -> tuple:
    """(a_i^vee) with sum_i a_i^vee a_ij = 0."""
    at = [list(col) for col in zip(*a)]
    ns = _nullspace(at)
    if len(ns) != 1:
        raise RootDataError("Cartan matrix is not of affine type")
    return _primitive_positive(ns[0])


def symmetrizers(a) -> tuple:
    """Coprime positive d_i with d_i a_ij = d_j a_ji."""
    n = len(a)
    d = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and a[i][j] != 0:
                val = d[i] * a[i][j] / a[j][i]
                if d[j] is None:
                    d[j] = val
                    stack.append(j)
                elif d[j] != val:
                    raise RootDataError("Cartan matrix not symmetrizable")
    return _primitive_positive(d)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeVec:
    """Vector of h* in the basis alpha_0..alpha_l, Lambda_0 (rational coords)."""

    coords: tuple

    def __add__(self, other):
        return LatticeVec(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return LatticeVec(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return LatticeVec(tuple(-a for a in self.coords))

    def scale(self, k):
        return LatticeVec(tuple(Fraction(k) * a for a in self.coords))

    @property
    def alpha_coords(self):
        return self.coords[:-1]

    def is_in_Q(self) -> bool:
        return self.coords[-1] == 0 and all(c.denominator == 1 for c in self.alpha_coords)

    def is_in_Q_plus(self) -> bool:
        return self.is_in_Q() and all(c >= 0 for c in self.alpha_coords)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class RootDatum:
    atype: AffineType
    cartan: tuple
    marks: tuple
    comarks: tuple
    hvee: int
    d: tuple
    p: int
    sigma: int
    D: int = 1
    eta: tuple = field(default=())

    @property
    def l(self) -> int:
        return self.atype.rank

    @property
    def N(self) -> int:
        return len(self.eta)

    # basis vectors --------------------------------------------------------

    def zero(self) -> LatticeVec:
        return LatticeVec((Fraction(0),) * (self.l + 2))

    def alpha(self, i: int) -> LatticeVec:
        c = [Fraction(0)] * (self.l + 2)
        c[i] = Fraction(1)
        return LatticeVec(tuple(c))

    @property
    def lambda0(self) -> LatticeVec:
        c = [Fraction(0)] * (self.l + 2)
        c[-1] = Fraction(1)
        return LatticeVec(tuple(c))

    @cached_property
    def delta(self) -> LatticeVec:
        return LatticeVec(tuple(Fraction(a) for a in self.marks) + (Fraction(0),))

    @cached_property
    def gram(self):
        n = self.l + 1
        g = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            for j in range(n):
                g[i][j] = Fraction(self.d[i] * self.cartan[i][j])
        g[0][n] = g[n][0] = Fraction(self.d[0])
        return g

    def omega(self, i: int) -> LatticeVec:
        """Fundamental weight omega_i (1 <= i <= l) inside span(alpha_1..alpha_l)."""
        return _omega(self.cartan, i)

    def in_Sigma(self, x: LatticeVec) -> bool:
        return (all(c.denominator == 1 for c in x.alpha_coords)
                and (x.coords[-1] * self.d[0]).denominator == 1)

    def in_Gamma(self, x: LatticeVec) -> bool:
        pw = self.omega(1).scale(self.p)
        bound = 1
        for c in pw.coords:
            bound = bound * c.denominator // gcd(bound, c.denominator)
        return any(self.in_Sigma(x - pw.scale(k)) for k in range(bound))

    def finite_key(self, x: LatticeVec) -> tuple:
        """Coordinates on alpha_1..alpha_l of x modulo delta (Lambda_0 part dropped)."""
        c0 = x.coords[0]
        return tuple(x.coords[i] - c0 * self.marks[i] for i in range(1, self.l + 1))

    def z_order(self, mu: LatticeVec) -> Fraction:
        """(Lambda_0 | mu) / d_0, the spectral degree of a weight mu in Q."""
        return pairing(self.lambda0, mu, self) / self.d[0]

    def q_exponent(self, x: LatticeVec, y: LatticeVec) -> int:
        """D * (x|y): the exponent of s in q^{(x|y)}."""
        v = pairing(x, y, self) * self.D
        if v.denominator != 1:
            raise RootDataError(f"q^({x}|{y}) is not a power of s for D={self.D}")
        return int(v)

    def header(self) -> dict:
        return {
            "family": self.atype.family, "rank": self.l, "D": self.D, "N": self.N,
            "eta": [[str(c) for c in e.coords] for e in self.eta],
        }


@lru_cache(maxsize=None)
def _omega(cartan, i):
    l = len(cartan) - 1
    fin = [[Fraction(cartan[j][k]) for k in range(1, l + 1)] for j in range(1, l + 1)]
    rhs = [Fraction(1 if j == i else 0) for j in range(1, l + 1)]
    sol = _solve_square(fin, rhs)
    return LatticeVec((Fraction(0),) + tuple(sol) + (Fraction(0),))


def _solve_square(m, rhs):
    n = len(m)
    aug = [list(r) + [b] for r, b in zip(m, rhs)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [aug[i][n] for i in range(n)]


def pairing(x: LatticeVec, y: LatticeVec, datum: RootDatum) -> Fraction:
    g = datum.gram
    out = Fraction(0)
    for i, a in enumerate(x.coords):
        if a == 0:
            continue
        row = g[i]
        for j, b in enumerate(y.coords):
            if b != 0:
                out += a * row[j] * b
    return out


def weights(t: AffineType, datum: RootDatum | None = None) -> tuple:
    """eta_1..eta_N of the vector representation, highest first."""
    if datum is None:
        datum = _bare_datum(t)
    l = t.rank
    pw1 = datum.omega(1).scale(datum.p)
    eps = []
    acc = datum.zero()
    for i in range(1, l + 1):
        eps.append(pw1 - acc)
        acc = acc + datum.alpha(i)
    zero = datum.zero()
    fam = t.family
    if fam == "A":
        last = zero
        for e in eps:
            last = last - e
        return tuple(eps) + (last,)
    neg = tuple(-e for e in reversed(eps))
    if fam in ("B", "A2even"):
        return tuple(eps) + (zero,) + neg
    if fam in ("C", "A2odd", "D"):
        return tuple(eps) + neg
    if fam == "D2":
        return tuple(eps) + (zero,) + neg + (zero,)
    raise RootDataError(fam)


def _bare_datum(t: AffineType) -> RootDatum:
    a = cartan_matrix(t)
    marks = marks_from_cartan(a)
    comarks = comarks_from_cartan(a)
    return RootDatum(
        atype=t, cartan=a, marks=marks, comarks=comarks, hvee=sum(comarks),
        d=symmetrizers(a), p=2 if (t.family == "A2even" and t.rank == 1) else 1,
        sigma=-1 if t.family in ("A2even", "A2odd") else 1,
    )


@lru_cache(maxsize=None)
def build_datum(t: AffineType) -> RootDatum:
    """Full root datum including the weights and the substrate exponent D."""
    bare = _bare_datum(t)
    if bare.marks[0] != 1:
        raise RootDataError(f"a_0 = {bare.marks[0]} != 1 for {t.label}")
    expected_a0v = 2 if t.family == "A2even" else 1
    if bare.comarks[0] != expected_a0v:
        raise RootDataError(f"a_0^vee = {bare.comarks[0]} for {t.label}")
    eta = weights(t, bare)
    den = 1
    for x in eta:
        for y in eta:
            v = pairing(x, y, bare)
            den = den * v.denominator // gcd(den, v.denominator)
    return RootDatum(
        atype=t, cartan=bare.cartan, marks=bare.marks, comarks=bare.comarks,
        hvee=bare.hvee, d=bare.d, p=bare.p, sigma=bare.sigma, D=den, eta=eta,
    )
