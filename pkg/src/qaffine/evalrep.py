"""Level-zero evaluation representations, the spectral twist and the
invariant vector w of the M-fold tensor product."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import permutations

from .qfield import ONE, QScalar, qint, qpow
from .report import FAIL, PASS, CheckResult
from .rootdata import AffineType, LatticeVec, RootDatum, build_datum, pairing
from .sparse import SMat, embed


@dataclass(frozen=True)
class EvalRep:
    datum: RootDatum
    e: tuple
    f: tuple
    # (letter, node, sign) -> SMat for the split generators ('e', i, +1) etc.
    pieces: dict = field(default_factory=dict, compare=False)
    G: SMat | None = None
    twist_param: QScalar = ONE

    @property
    def N(self) -> int:
        return self.datum.N

    def k_diag(self, lam: LatticeVec) -> list:
        """Eigenvalues q^{(lam|eta_j)} of k_lam, as QScalars."""
        return [qpow(pairing(lam, eta, self.datum), self.datum.D) for eta in self.datum.eta]

    def k(self, lam: LatticeVec) -> SMat:
        return SMat.diag(self.k_diag(lam))

    def k_node(self, i: int, power: int = 1) -> SMat:
        return self.k(self.datum.alpha(i).scale(power))

    def q_node(self, i: int) -> QScalar:
        return qpow(self.datum.d[i], self.datum.D)


def _E(N, entries):
    """Matrix from 1-based (i, j, coeff) triples."""
    return SMat.from_entries(N, N, ((i - 1, j - 1, c) for i, j, c in entries))


def _b_type_generators(l, N, y):
    """e_i, f_i (1 <= i <= l) of the B_l vector representation of size N
    (N = 2l + 1, or the first 2l + 1 coordinates of a larger space)."""
    Nb = 2 * l + 1
    e, f, pieces = {}, {}, {}
    for i in range(1, l):
        ep = _E(N, [(i, i + 1, 1)])
        em = _E(N, [(Nb - i, Nb + 1 - i, -1)])
        pieces[("e", i, 1)], pieces[("e", i, -1)] = ep, em
        pieces[("f", i, 1)], pieces[("f", i, -1)] = ep.transpose(), em.transpose()
    ep = _E(N, [(l, l + 1, 1)])
    em = _E(N, [(l + 1, l + 2, -1)])
    pieces[("e", l, 1)], pieces[("e", l, -1)] = ep, em
    pieces[("f", l, 1)] = ep.transpose().scale(y)
    pieces[("f", l, -1)] = em.transpose().scale(y)
    for i in range(1, l + 1):
        e[i] = pieces[("e", i, 1)] + pieces[("e", i, -1)]
        f[i] = pieces[("f", i, 1)] + pieces[("f", i, -1)]
    return e, f, pieces


def _cd_type_generators(l, N, last):
    """Nodes 1..l for C_l ('C') or D_l ('D') in dimension N = 2l."""
    e, f, pieces = {}, {}, {}
    for i in range(1, l):
        ep = _E(N, [(i, i + 1, 1)])
        em = _E(N, [(N - i, N + 1 - i, -1)])
        pieces[("e", i, 1)], pieces[("e", i, -1)] = ep, em
        pieces[("f", i, 1)], pieces[("f", i, -1)] = ep.transpose(), em.transpose()
        e[i] = ep + em
        f[i] = e[i].transpose()
    if last == "C":
        e[l] = _E(N, [(l, l + 1, 1)])
    else:
        e[l] = _E(N, [(l - 1, l + 1, 1), (l, l + 2, -1)])
    f[l] = e[l].transpose()
    return e, f, pieces


def _conj_sign(mat: SMat, signs) -> SMat:
    return mat.conj_diag(signs, signs)      # signs are +-1, self-inverse


def build_rep(t: AffineType) -> EvalRep:
    datum = build_datum(t)
    l, N, fam = t.rank, datum.N, t.family
    pieces = {}
    G = None
    if fam == "A":
        e = {i: _E(N, [(i, i + 1, 1)]) for i in range(1, l + 1)}
        e[0] = _E(N, [(N, 1, 1)])
        f = {i: m.transpose() for i, m in e.items()}
        for i in range(1, l + 1):
            pieces[("e", i, 1)], pieces[("f", i, 1)] = e[i], f[i]
    elif fam == "B":
        e, f, pieces = _b_type_generators(l, N, qint(2, l, datum))
        e[0] = _E(N, [(N - 1, 1, 1), (N, 2, -1)])
        f[0] = e[0].transpose()
    elif fam in ("C", "D"):
        e, f, pieces = _cd_type_generators(l, N, fam)
        e[0] = _E(N, [(N, 1, 1)]) if fam == "C" else _E(N, [(N - 1, 1, 1), (N, 2, -1)])
        f[0] = e[0].transpose()
    elif fam == "A2even":
        eb, fb, _ = _b_type_generators(l, N, qint(2, l, datum))
        signs = [ONE] * (l + 1) + [QScalar.const((-1) ** k) for k in range(1, l + 1)]
        e = {i: _conj_sign(m, signs) for i, m in eb.items()}
        f = {i: _conj_sign(m, signs) for i, m in fb.items()}
        e[0] = _E(N, [(N, 1, 1)])
        f[0] = e[0].transpose()
    elif fam == "A2odd":
        ec, fc, _ = _cd_type_generators(l, N, "C")
        signs = [ONE] * (l + 1) + [QScalar.const((-1) ** k) for k in range(1, l)]
        e = {i: _conj_sign(m, signs) for i, m in ec.items()}
        f = {i: _conj_sign(m, signs) for i, m in fc.items()}
        e[0] = _E(N, [(N - 1, 1, 1), (N, 2, 1)])
        f[0] = e[0].transpose()
    elif fam == "D2":
        e, f, pieces = _b_type_generators(l, N, qint(2, l, datum))
        e[0] = _E(N, [(N, 1, 1), (N - 1, N, 1)])
        f[0] = e[0].transpose().scale(qint(2, 0, datum))
        G = SMat.diag([ONE] * (N - 1) + [QScalar.const(-1)])
    else:  # pragma: no cover
        raise ValueError(fam)
    return EvalRep(datum=datum, e=tuple(e[i] for i in range(l + 1)),
                   f=tuple(f[i] for i in range(l + 1)), pieces=pieces, G=G)


def twist(rep: EvalRep, a) -> EvalRep:
    """rho o tau_a: e_0 -> a e_0, f_0 -> a^{-1} f_0."""
    if not isinstance(a, QScalar):
        a = QScalar.const(a)
    if a.is_zero():
        raise ValueError("twist parameter must be nonzero")
    e = (rep.e[0].scale(a),) + rep.e[1:]
    f = (rep.f[0].scale(a.inv()),) + rep.f[1:]
    return replace(rep, e=e, f=f, twist_param=rep.twist_param * a)


# ---------------------------------------------------------------------------
# invariant vector


@dataclass(frozen=True)
class InvariantVec:
    M: int
    points: tuple          # evaluation points a_1..a_M
    w: dict                # index in V^{(x)M} (row-major) -> QScalar
    J: SMat | None = None


def _inversions(perm) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


def u_list(t: AffineType, datum: RootDatum) -> list:
    """The coefficient list (u_1..u_N) of w for M = 2 types."""
    l, fam = t.rank, t.family
    D = datum.D

    def q(k, sign=1):
        return qpow(k, D) * sign

    if fam == "B":
        return ([q(-(2 * (l - i) - 1)) for i in range(l)] + [q(1)]
                + [q(2 * j - 1) for j in range(1, l + 1)])
    if fam == "C":
        return [q(-(l - i), -1) for i in range(l)] + [q(j) for j in range(1, l + 1)]
    if fam == "D":
        return [q(-(l - 1 - i)) for i in range(l)] + [q(j) for j in range(l)]
    if fam == "A2even":
        return ([q(-(2 * k - 1), (-1) ** k) for k in range(l, 0, -1)] + [q(1)]
                + [q(2 * j - 1, (-1) ** j) for j in range(1, l + 1)])
    if fam == "A2odd":
        return ([q(-k, (-1) ** k) for k in range(l, 0, -1)]
                + [q(j, (-1) ** (j - 1)) for j in range(1, l + 1)])
    if fam == "D2":
        return ([q(-(2 * (l - i) - 1)) for i in range(l)] + [q(1)]
                + [q(2 * j - 1) for j in range(1, l + 1)] + [q(1, -1)])
    raise ValueError(f"no u-list for {fam}")


def evaluation_points(t: AffineType, datum: RootDatum | None = None) -> tuple:
    datum = datum or build_datum(t)
    if t.family == "A":
        return tuple(qpow(-2 * i, datum.D) for i in range(t.rank + 1))
    # a_2 = sigma * q_0^{-h/a_0^vee}
    from fractions import Fraction
    expo = -Fraction(datum.d[0] * datum.hvee, datum.comarks[0])
    return (ONE, qpow(expo, datum.D) * datum.sigma)


def invariant_vector(t: AffineType) -> InvariantVec:
    datum = build_datum(t)
    N = datum.N
    pts = evaluation_points(t, datum)
    if t.family == "A":
        M = N
        mq = qpow(1, datum.D) * (-1)
        w = {}
        for perm in permutations(range(M)):
            idx = 0
            for p in perm:
                idx = idx * N + p
            w[idx] = mq ** _inversions(perm)
        return InvariantVec(M, pts, w)
    u = u_list(t, datum)
    entries = []
    if t.family == "D2":
        for i in range(1, N):
            entries.append((i - 1, N - i - 1, u[i - 1]))
        entries.append((N - 1, N - 1, u[N - 1]))
    else:
        for i in range(1, N + 1):
            entries.append((i - 1, N - i, u[i - 1]))
    J = SMat.from_entries(N, N, entries)
    w = {i * N + j: v for i, j, v in J.entries()}
    return InvariantVec(2, pts, w, J)


# ---------------------------------------------------------------------------
# self-checks


def _commutator(a: SMat, b: SMat) -> SMat:
    return a @ b - b @ a


def _serre(x_i: SMat, x_j: SMat, aij: int, i: int, datum) -> SMat:
    """sum_r (-1)^r x_i^(r) x_j x_i^(1-a_ij-r)."""
    from .qfield import qfact
    n = 1 - aij
    N = x_i.n
    powers = [SMat.identity(N)]
    for _ in range(n):
        powers.append(powers[-1] @ x_i)
    total = SMat(N, N)
    for r in range(n + 1):
        coeff = (qfact(r, i, datum) * qfact(n - r, i, datum)).inv()
        if r % 2:
            coeff = -coeff
        total = total + (powers[r] @ x_j @ powers[n - r]).scale(coeff)
    return total


def _coproduct_action(reps: list, gen: str, i: int) -> SMat:
    """Iterated coproduct of e_i or f_i on V^{(x)M}, factor j in rep reps[j]."""
    M = len(reps)
    N = reps[0].N
    dims = (N,) * M
    total = SMat(N ** M, N ** M)
    for j in range(M):
        ops = []
        for p in range(M):
            rp = reps[p]
            if p == j:
                ops.append(rp.e[i] if gen == "e" else rp.f[i])
            elif gen == "e" and p < j:
                ops.append(rp.k_node(i))
            elif gen == "f" and p > j:
                ops.append(rp.k_node(i, -1))
            else:
                ops.append(None)
        term = None
        for p, op in enumerate(ops):
            if op is None:
                continue
            emb = embed(op, dims, (p,))
            term = emb if term is None else term @ emb
        total = total + term
    return total


def selfcheck(rep: EvalRep, inv: InvariantVec | None = None) -> list:
    """Exact representation checks; returns a list of CheckResult, one per relation family."""
    datum = rep.datum
    l, N = datum.l, rep.N
    results = []

    def record(name, failures):
        if failures:
            results.append(CheckResult(name, FAIL, 0, "; ".join(failures[:3])))
        else:
            results.append(CheckResult(name, PASS, 0))

    # weight relations k_lam e_i k_-lam = q^{(lam|alpha_i)} e_i
    fails = []
    lams = [datum.alpha(j) for j in range(l + 1)] + [datum.eta[0]]
    for lam in lams:
        kd = rep.k_diag(lam)
        kinv = [x.inv() for x in kd]
        for i in range(l + 1):
            c = qpow(pairing(lam, datum.alpha(i), datum), datum.D)
            if rep.e[i].conj_diag(kd, kinv) != rep.e[i].scale(c):
                fails.append(f"e_{i} lam={lam}")
            if rep.f[i].conj_diag(kd, kinv) != rep.f[i].scale(c.inv()):
                fails.append(f"f_{i} lam={lam}")
    record("weight", fails)

    # [e_i, f_j] = delta_ij (k_i - k_i^-1)/(q_i - q_i^-1)
    fails = []
    for i in range(l + 1):
        qi = rep.q_node(i)
        for j in range(l + 1):
            lhs = _commutator(rep.e[i], rep.f[j])
            if i == j:
                rhs = (rep.k_node(i) - rep.k_node(i, -1)).scale((qi - qi.inv()).inv())
            else:
                rhs = SMat(N, N)
            if lhs != rhs:
                fails.append(f"(i,j)=({i},{j})")
    record("ef", fails)

    for gen, mats in (("e", rep.e), ("f", rep.f)):
        fails = []
        for i in range(l + 1):
            for j in range(l + 1):
                if i != j and not _serre(mats[i], mats[j], datum.cartan[i][j], i, datum).is_zero():
                    fails.append(f"(i,j)=({i},{j})")
        record(f"serre_{gen}", fails)

    record("k_delta", [] if rep.k(datum.delta).is_identity() else ["k_delta != 1"])

    if datum.atype.family == "D2":
        fails = []
        vN = {N - 1: ONE}
        for i in range(1, l + 1):
            if rep.e[i].apply(vN) or rep.f[i].apply(vN):
                fails.append(f"node {i} moves v_N")
        if rep.G is None or not (rep.G @ rep.G).is_identity():
            fails.append("G missing")
        record("trivial_summand", fails)

    if inv is not None:
        reps = [twist(rep, a) for a in inv.points]
        fails = []
        for i in range(l + 1):
            for gen in ("e", "f"):
                img = _coproduct_action(reps, gen, i).apply(inv.w)
                if img:
                    fails.append(f"{gen}_{i} w != 0")
        M = inv.M
        for j in range(l + 1):
            kd = rep.k_diag(datum.alpha(j))
            for idx, _ in inv.w.items():
                val = ONE
                rest = idx
                for _ in range(M):
                    rest, d = divmod(rest, N)
                    val = val * kd[d]
                if not val.is_one():
                    fails.append(f"k_{j} w != w")
                    break
        record("w_invariant", fails)
    return results


def transpose_pattern(rep: EvalRep) -> dict:
    """For each generator, the scalar c with f_i = c * e_i^T (None if not proportional)."""
    out = {}
    for i, (e, f) in enumerate(zip(rep.e, rep.f)):
        et = e.transpose()
        i0, j0, v0 = next(iter(et.entries()))
        c = f.get(i0, j0) / v0
        out[i] = c if f == et.scale(c) else None
    return out
