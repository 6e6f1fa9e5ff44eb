"""Exact arithmetic in Q(s), where q = s**D, plus q-integers.

A QScalar is stored in the canonical form

    c * s**e * n(s) / d(s)

with c a nonzero rational (or c == 0 for the zero element), e an integer,
and n, d primitive integer polynomials with positive leading coefficient,
nonzero constant term and gcd(n, d) == 1.  Polynomials are sparse tuples
of (exponent, coefficient) pairs in ascending exponent order.

Pulling the power of s out of numerator and denominator keeps Laurent
polynomials (the overwhelmingly common case) free of gcd computations.
"""

from __future__ import annotations

from math import gcd, lcm

from gmpy2 import mpq

ONE_POLY = ((0, 1),)


class PoleError(ZeroDivisionError):
    """Raised when evaluating a QScalar at a pole of its reduced form."""


class QScalarParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer polynomial helpers (sparse tuples)


def _mul(a, b):
    if a is ONE_POLY or a == ONE_POLY:
        return b
    if b is ONE_POLY or b == ONE_POLY:
        return a
    acc = {}
    for ea, ca in a:
        for eb, cb in b:
            k = ea + eb
            acc[k] = acc.get(k, 0) + ca * cb
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def _dense(p):
    out = [0] * (p[-1][0] + 1)
    for k, v in p:
        out[k] = v
    return out


def _sparse(lst):
    return tuple((k, v) for k, v in enumerate(lst) if v)


def _normalize(p):
    """Split an integer polynomial into (unit_content, shift, primitive).

    Returns (c, e, prim) with p == c * s**e * prim, prim primitive with a
    nonzero constant term and positive leading coefficient.  p must be
    nonzero.
    """
    e = p[0][0]
    g = 0
    for _, v in p:
        g = gcd(g, v)
        if g == 1:
            break
    if p[-1][1] < 0:
        g = -g
    if e == 0 and g == 1:
        return 1, 0, p
    return g, e, tuple((k - e, v // g) for k, v in p)


def _eval_int(p, x):
    acc = 0
    last = p[-1][0]
    dense = _dense(p) if len(p) > 1 else None
    if dense is None:
        return p[0][1] * x ** p[0][0]
    for i in range(last, -1, -1):
        acc = acc * x + dense[i]
    return acc


def _exact_div(a, b):
    """Exact quotient a / b over Z, or None if b does not divide a."""
    if b == ONE_POLY:
        return a
    da = _dense(a)
    db = _dense(b)
    nb = len(db) - 1
    lb = db[-1]
    if len(da) - 1 < nb:
        return None
    quo = [0] * (len(da) - nb)
    for i in range(len(da) - 1, nb - 1, -1):
        c = da[i]
        if c == 0:
            continue
        qc, r = divmod(c, lb)
        if r:
            return None
        quo[i - nb] = qc
        for j in range(nb + 1):
            da[i - nb + j] -= qc * db[j]
    if any(da[:nb]):
        return None
    return _sparse(quo)


def _prim_dense(lst):
    g = 0
    for v in lst:
        g = gcd(g, v)
    if g == 0:
        return lst
    if lst[-1] < 0:
        g = -g
    return [v // g for v in lst]


def _trim(lst):
    while lst and lst[-1] == 0:
        lst.pop()
    return lst


def _prem(a, b):
    """Pseudo-remainder of dense integer polys."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(r) - 1 - db
    if delta < 0:
        return r
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        r = [v * lb for v in r]
        for j in range(db + 1):
            r[i - db + j] -= c * b[j]
    return _trim(r[:db] if db > 0 else [])


def subresultant_gcd(a, b):
    """Primitive gcd of two dense integer polynomials via the subresultant PRS."""
    a = _prim_dense(_trim(list(a)))
    b = _prim_dense(_trim(list(b)))
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    g = h = 1
    while True:
        delta = len(a) - len(b)
        r = _prem(a, b)
        if not r:
            return _prim_dense(b)
        if len(r) == 1:
            return [1]
        a = b
        denom = g * h ** delta
        b = [v // denom for v in r]
        g = a[-1]
        if delta:
            h = (g ** delta) // (h ** (delta - 1)) if delta > 1 else g
        else:
            h = h


def _heu_gcd(a, b):
    """Heuristic gcd by integer evaluation and balanced interpolation."""
    ma = max(abs(v) for _, v in a)
    mb = max(abs(v) for _, v in b)
    xi = 2 * min(ma, mb) + 29
    for _ in range(6):
        ha = _eval_int(a, xi)
        hb = _eval_int(b, xi)
        h = gcd(ha, hb)
        coeffs = []
        half = xi // 2
        while h:
            r = h % xi
            if r > half:
                r -= xi
            coeffs.append(r)
            h = (h - r) // xi
        if coeffs:
            cand = _sparse(_prim_dense(coeffs))
            if cand and _exact_div(a, cand) is not None and _exact_div(b, cand) is not None:
                return cand
        xi = xi * 73794 // 27011 + 1
    return None


def poly_gcd(a, b):
    """gcd of two primitive integer polynomials with nonzero constant terms."""
    if a == ONE_POLY or b == ONE_POLY:
        return ONE_POLY
    if a == b:
        return a
    if len(a) == 1 or len(b) == 1:
        # monomials with nonzero constant term are constants
        return ONE_POLY
    g = _heu_gcd(a, b)
    if g is None:
        g = _sparse(subresultant_gcd(_dense(a), _dense(b)))
    if g[-1][1] < 0:
        g = tuple((k, -v) for k, v in g)
    return g


# ---------------------------------------------------------------------------


class QScalar:
    """Immutable element of Q(s) in canonical form."""

    __slots__ = ("c", "e", "n", "d", "_hash")

    def __init__(self, c, e=0, n=ONE_POLY, d=ONE_POLY):
        # trusted constructor: caller guarantees canonical form
        self.c = c
        self.e = e
        self.n = n
        self.d = d
        self._hash = None

    # construction -------------------------------------------------------

    @staticmethod
    def const(x) -> "QScalar":
        x = mpq(x)
        if x == 0:
            return ZERO
        return QScalar(x)

    @staticmethod
    def s_power(k: int, coeff=1) -> "QScalar":
        coeff = mpq(coeff)
        if coeff == 0:
            return ZERO
        return QScalar(coeff, k)

    @staticmethod
    def from_poly(coeffs, den=None) -> "QScalar":
        """Build from {exponent: rational} maps (negative exponents allowed)."""
        num = _from_rational_map(coeffs)
        if num is None:
            return ZERO
        if den is None:
            return num
        d = _from_rational_map(den)
        if d is None:
            raise ZeroDivisionError("zero denominator")
        return num / d

    # predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.c == 0

    def __bool__(self):
        return self.c != 0

    def is_one(self) -> bool:
        return self.c == 1 and self.e == 0 and self.n == ONE_POLY and self.d == ONE_POLY

    def is_monomial(self) -> bool:
        return self.n == ONE_POLY and self.d == ONE_POLY

    def __eq__(self, other):
        if not isinstance(other, QScalar):
            try:
                other = QScalar.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self.c == other.c and self.e == other.e
                and self.n == other.n and self.d == other.d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.c, self.e, self.n, self.d))
        return self._hash

    # arithmetic ---------------------------------------------------------

    def __neg__(self):
        if self.c == 0:
            return self
        return QScalar(-self.c, self.e, self.n, self.d)

    def __add__(self, other):
        if not isinstance(other, QScalar):
            other = QScalar.const(other)
        if self.c == 0:
            return other
        if other.c == 0:
            return self
        return _add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QScalar):
            other = QScalar.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return QScalar.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, QScalar):
            other = mpq(other)
            if other == 0 or self.c == 0:
                return ZERO
            return QScalar(self.c * other, self.e, self.n, self.d)
        if self.c == 0 or other.c == 0:
            return ZERO
        n1, d1, n2, d2 = self.n, self.d, other.n, other.d
        if d1 is ONE_POLY or d1 == ONE_POLY:
            if d2 == ONE_POLY:
                n = _mul(n1, n2)
                return QScalar(self.c * other.c, self.e + other.e, n, ONE_POLY)
            g = poly_gcd(n1, d2)
            if g != ONE_POLY:
                n1 = _exact_div(n1, g)
                d2 = _exact_div(d2, g)
            return QScalar(self.c * other.c, self.e + other.e, _mul(n1, n2), d2)
        g1 = poly_gcd(n1, d2)
        if g1 != ONE_POLY:
            n1 = _exact_div(n1, g1)
            d2 = _exact_div(d2, g1)
        g2 = poly_gcd(n2, d1)
        if g2 != ONE_POLY:
            n2 = _exact_div(n2, g2)
            d1 = _exact_div(d1, g2)
        return QScalar(self.c * other.c, self.e + other.e, _mul(n1, n2), _mul(d1, d2))

    __rmul__ = __mul__

    def inv(self) -> "QScalar":
        if self.c == 0:
            raise ZeroDivisionError("QScalar division by zero")
        return QScalar(1 / self.c, -self.e, self.d, self.n)

    def __truediv__(self, other):
        if not isinstance(other, QScalar):
            other = mpq(other)
            if other == 0:
                raise ZeroDivisionError("QScalar division by zero")
            if self.c == 0:
                return ZERO
            return QScalar(self.c / other, self.e, self.n, self.d)
        return self * other.inv()

    def __rtruediv__(self, other):
        return QScalar.const(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # views ----------------------------------------------------------------

    def numerator(self) -> dict:
        """Numerator polynomial {exp: rational}, exponents >= 0."""
        if self.c == 0:
            return {}
        shift = max(self.e, 0)
        return {k + shift: self.c * v for k, v in self.n}

    def denominator(self) -> dict:
        """Primitive integer denominator {exp: int} with positive leading coefficient."""
        shift = max(-self.e, 0) if self.c != 0 else 0
        return {k + shift: v for k, v in self.d}

    def specialize(self, s0) -> mpq:
        """Evaluate at s = s0 exactly; raises PoleError at a pole."""
        s0 = mpq(s0)
        if self.c == 0:
            return mpq(0)
        den = _eval_rat(self.d, s0)
        if den == 0 or (s0 == 0 and self.e < 0):
            raise PoleError(f"pole of {self} at s={s0}")
        return self.c * s0 ** self.e * _eval_rat(self.n, s0) / den

    def __str__(self):
        return to_canonical_string(self)

    __repr__ = __str__


def _eval_rat(p, x):
    acc = mpq(0)
    for k, v in p:
        acc += v * x ** k
    return acc


def _from_rational_map(coeffs):
    items = [(int(k), mpq(v)) for k, v in dict(coeffs).items() if mpq(v) != 0]
    if not items:
        return None
    den = 1
    for _, v in items:
        den = den * v.denominator // gcd(den, int(v.denominator))
    shift = min(k for k, _ in items)
    p = tuple(sorted((k - shift, int(v * den)) for k, v in items))
    cont, e, prim = _normalize(p)
    return QScalar(mpq(cont, den), shift + e, prim, ONE_POLY)


def _add(a: QScalar, b: QScalar) -> QScalar:
    if a.n == ONE_POLY and b.n == ONE_POLY and a.d == ONE_POLY and b.d == ONE_POLY and a.e == b.e:
        c = a.c + b.c
        if c == 0:
            return ZERO
        return QScalar(c, a.e, ONE_POLY, ONE_POLY)
    e = min(a.e, b.e)
    da, db = a.d, b.d
    if da == db:
        g, fa, fb = da, ONE_POLY, ONE_POLY
    elif da == ONE_POLY:
        g, fa, fb = ONE_POLY, db, ONE_POLY
    elif db == ONE_POLY:
        g, fa, fb = ONE_POLY, ONE_POLY, da
    else:
        g = poly_gcd(da, db)
        fa = _exact_div(db, g)  # multiplies a's numerator
        fb = _exact_div(da, g)
    ca, cb = a.c, b.c
    L = ca.denominator * cb.denominator // gcd(int(ca.denominator), int(cb.denominator))
    ia = int(ca.numerator) * (L // int(ca.denominator))
    ib = int(cb.numerator) * (L // int(cb.denominator))
    acc = {}
    sa = a.e - e
    for k, v in _mul(a.n, fa):
        acc[k + sa] = acc.get(k + sa, 0) + ia * v
    sb = b.e - e
    for k, v in _mul(b.n, fb):
        acc[k + sb] = acc.get(k + sb, 0) + ib * v
    num = tuple(sorted((k, v) for k, v in acc.items() if v))
    if not num:
        return ZERO
    cont, shift, prim = _normalize(num)
    den = _mul(_mul(fa, fb), g) if g != ONE_POLY else _mul(fa, fb)
    if g != ONE_POLY and len(prim) > 1:
        h = poly_gcd(prim, g)
        if h != ONE_POLY:
            prim = _exact_div(prim, h)
            den = _exact_div(den, h)
    return QScalar(mpq(cont, L), e + shift, prim, den)


ZERO = QScalar(mpq(0))
ONE = QScalar(mpq(1))


# ---------------------------------------------------------------------------
# canonical string form


def _poly_str(terms) -> str:
    parts = [str(int(v)) if k == 0 else f"{int(v)}*s^{k}" for k, v in terms]
    return " + ".join(parts) if parts else "0"


def to_canonical_string(a: QScalar) -> str:
    """`<num>/<den>`, polynomials in s with ascending exponents.

    All coefficients are integers with overall content 1 and the leading
    denominator coefficient is positive, which makes the string unique.
    """
    if a.c == 0:
        return "0/1"
    num = sorted(a.numerator().items())
    den = sorted(a.denominator().items())
    scale = lcm(*(mpq(v).denominator for _, v in num + den))
    num = [(k, mpq(v) * scale) for k, v in num]
    den = [(k, mpq(v) * scale) for k, v in den]
    return f"{_poly_str(num)}/{_poly_str(den)}"


def _parse_poly(text: str):
    text = text.strip()
    if text == "0":
        return {}
    out = {}
    for term in text.split(" + "):
        term = term.strip()
        if "*s^" in term:
            cs, ks = term.split("*s^")
            k = int(ks)
        else:
            cs, k = term, 0
        if cs.startswith("("):
            if not cs.endswith(")"):
                raise QScalarParseError(f"bad coefficient {cs!r}")
            p, q_ = cs[1:-1].split("/")
            v = mpq(int(p), int(q_))
        else:
            v = mpq(int(cs))
        out[k] = out.get(k, 0) + v
    return out


def parse_qscalar(text: str) -> QScalar:
    depth = 0
    cut = -1
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            cut = i
    if cut < 0:
        raise QScalarParseError(f"missing '/' in {text!r}")
    try:
        num = _parse_poly(text[:cut])
        den = _parse_poly(text[cut + 1:])
    except (ValueError, ZeroDivisionError) as exc:
        raise QScalarParseError(str(exc)) from exc
    if not den:
        raise QScalarParseError("zero denominator")
    return QScalar.from_poly(num, den)


# ---------------------------------------------------------------------------
# module-level operations


def arith(a: QScalar, b: QScalar, op: str) -> QScalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("QScalar division by zero")
        return a / b
    raise ValueError(f"unknown op {op!r}")


def specialize(a: QScalar, s0) -> mpq:
    return a.specialize(s0)


def qpow(k, D: int) -> QScalar:
    """q**k as an element of Q(s), q = s**D; k may be a rational with D*k integral."""
    ek = mpq(k) * D
    if ek.denominator != 1:
        raise ValueError(f"q^{k} is not a power of s for D={D}")
    return QScalar(mpq(1), int(ek))


def qint_base(n: int, step: int) -> QScalar:
    """[n] with respect to the base t = s**step: (t^n - t^-n)/(t - t^-1)."""
    if n == 0:
        return ZERO
    if n < 0:
        return -qint_base(-n, step)
    # t^{-(n-1)} + t^{-(n-3)} + ... + t^{n-1}
    return QScalar.from_poly({step * (n - 1 - 2 * j): 1 for j in range(n)})


def qint(n: int, i: int, datum) -> QScalar:
    """[n]_i for node i of the root datum (q_i = q**d_i)."""
    return qint_base(n, datum.D * datum.d[i])


def qfact(n: int, i: int, datum) -> QScalar:
    if n < 0:
        raise ValueError("negative factorial")
    out = ONE
    for k in range(1, n + 1):
        out = out * qint(k, i, datum)
    return out


def qbinom(n: int, k: int, i: int, datum) -> QScalar:
    if not 0 <= k <= n:
        raise ValueError(f"q-binomial out of range: n={n}, k={k}")
    return qfact(n, i, datum) / (qfact(k, i, datum) * qfact(n - k, i, datum))


def qfact_qbinom(n: int, k: int, i: int, datum):
    """Return ([n]_i!, [n choose k]_i)."""
    return qfact(n, i, datum), qbinom(n, k, i, datum)
