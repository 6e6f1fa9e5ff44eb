"""Order-by-order construction of the evaluated quasi-universal R matrix.

For a weight mu in Q_+ the image X_mu of Theta_mu on V (x) V satisfies,
for every node i,

    [1 (x) e_i, X_mu] = X_{mu-a_i} (e_i (x) k_i^-1) - (e_i (x) k_i) X_{mu-a_i}
    [f_i (x) 1, X_mu] = X_{mu-a_i} (k_i (x) f_i) - (k_i^-1 (x) f_i) X_{mu-a_i}

with unknowns restricted to weight-compatible matrix units.  At mu = n delta
these equations leave a one-dimensional kernel (the identity), i.e. the
evaluated solution is determined only up to a scalar series g(z).  That
scalar is fixed by one component of the w-relation

    L_1(a_1 z) ... L_M(a_M z) (w (x) v) = w (x) v,   L(z) = R(z) K^-1,

where K = sum q^{(eta_i|eta_j)} E_ii (x) E_jj.  The remaining components
of that relation stay available as an independent check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .evalrep import EvalRep, InvariantVec, invariant_vector
from .linalg import EchelonSolver, LinearSystemError
from .matseries import BiSeries, MatSeries
from .qfield import ONE, ZERO, PoleError, QScalar, qpow
from .report import FAIL, PASS, CheckResult
from .rootdata import RootDatum, pairing
from .sparse import SMat, embed, kron

CONVENTIONS = ("k-inverse", "k-direct")


class SolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# weights


def finite_keys(datum: RootDatum) -> list:
    return [tuple(datum.finite_key(eta)) for eta in datum.eta]


def enumerate_weights(datum: RootDatum, K: int) -> list:
    """All mu = n delta + (eta_a - eta_b) in Q_+ \\ {0} with n <= K, by height."""
    fk = finite_keys(datum)
    diffs = {tuple(x - y for x, y in zip(a, b)) for a in fk for b in fk}
    out = set()
    for n in range(K + 1):
        for nu in diffs:
            coords = (Fraction(n),) + tuple(n * datum.marks[i + 1] + nu[i] for i in range(len(nu)))
            if any(c.denominator != 1 or c < 0 for c in coords):
                continue
            key = tuple(int(c) for c in coords)
            if any(key):
                out.add(key)
    return sorted(out, key=lambda k: (sum(k), k))


def finite_part(datum: RootDatum, key: tuple) -> tuple:
    n = key[0]
    return tuple(Fraction(key[i]) - n * datum.marks[i] for i in range(1, len(key)))


def key_str(key: tuple) -> str:
    return "(" + ",".join(str(k) for k in key) + ")"


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


# ---------------------------------------------------------------------------


@dataclass
class RArtifact:
    datum: RootDatum
    K: int
    theta: dict                      # weight key -> SMat (N^2 x N^2); zero images omitted
    convention: str = "k-inverse"
    ybe_variant: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.datum.N

    def pair_exponent_diag(self, sign: int, shift: bool) -> list:
        """q^{sign((eta_i|eta_j) - shift*(eta_1|eta_1))} on V (x) V."""
        d = self.datum
        base = pairing(d.eta[0], d.eta[0], d) if shift else Fraction(0)
        out = []
        for a in d.eta:
            for b in d.eta:
                out.append(qpow(sign * (pairing(a, b, d) - base), d.D))
        return out

    def K_diag(self, sign: int = 1) -> list:
        return self.pair_exponent_diag(sign, False)

    def T_diag(self, sign: int = 1) -> list:
        return self.pair_exponent_diag(sign, True)

    def script_R(self) -> MatSeries:
        N2 = self.N ** 2
        coeffs = {}
        for key, X in self.theta.items():
            n = key[0]
            coeffs[n] = X if n not in coeffs else coeffs[n] + X
        coeffs[0] = SMat.identity(N2) + coeffs[0] if 0 in coeffs else SMat.identity(N2)
        return MatSeries(N2, self.K, coeffs)


def assemble_R(art: RArtifact) -> MatSeries:
    """R(z) = script_R(z) T^-1, with a check that only integral powers of q survive."""
    tinv = art.T_diag(-1)
    ones = [ONE] * len(tinv)
    R = art.script_R().map_coeffs(lambda m: m.conj_diag(ones, tinv))
    D = art.datum.D
    if D > 1:
        for n, m in R.coeffs.items():
            for i, j, v in m.entries():
                if not _integral_q_power(v, D):
                    raise SolverError(f"fractional power of q in R[{n}] at ({i},{j}): {v}")
    return R


def _integral_q_power(v: QScalar, D: int) -> bool:
    return (v.e % D == 0 and all(e % D == 0 for e, _ in v.n)
            and all(e % D == 0 for e, _ in v.d))


# ---------------------------------------------------------------------------
# the solver


class _Context:
    def __init__(self, rep: EvalRep, inv: InvariantVec, convention: str, rng=None):
        self.rep = rep
        self.rng = rng
        self.datum = d = rep.datum
        self.N = N = rep.N
        self.inv = inv
        self.fk = finite_keys(d)
        self.pairs_by_diff = {}
        for a in range(N):
            for b in range(N):
                diff = tuple(x - y for x, y in zip(self.fk[a], self.fk[b]))
                self.pairs_by_diff.setdefault(diff, []).append((a, b))
        direct = convention == "k-direct"
        self.ops = []
        for i in range(d.l + 1):
            k, kinv = rep.k_node(i), rep.k_node(i, -1)
            if direct:
                k, kinv = kinv, k
            e, f = rep.e[i], rep.f[i]
            self.ops.append({
                "e": e, "f": f, "eT": e.transpose(), "fT": f.transpose(),
                "e_kinv": kron(e, kinv), "e_k": kron(e, k),
                "k_f": kron(k, f), "kinv_f": kron(kinv, f),
            })
        sign = 1 if direct else -1
        self.kpair = [[qpow(sign * pairing(a, b, d), d.D) for b in d.eta] for a in d.eta]
        self.alpha_keys = [tuple(1 if j == i else 0 for j in range(d.l + 1)) for i in range(d.l + 1)]

    def unknowns(self, nu):
        neg = tuple(-x for x in nu)
        return [(a, c, b, dd) for (a, b) in self.pairs_by_diff.get(nu, [])
                for (c, dd) in self.pairs_by_diff.get(neg, [])]


def _intertwiner_equations(ctx: _Context, key, unknowns, solved, solver: EchelonSolver):
    N = ctx.N
    index = {u: n for n, u in enumerate(unknowns)}
    eqs = {}          # (gen, i, row, col) -> {var: coeff}

    def add(tag, r, c, var, coeff):
        slot = eqs.setdefault((tag, r, c), {})
        slot[var] = slot.get(var, ZERO) + coeff

    for i, op in enumerate(ctx.ops):
        eT, fT = op["eT"], op["fT"]
        e, f = op["e"], op["f"]
        for (a, c, b, d), var in index.items():
            r, col = a * N + c, b * N + d
            # [1 (x) e_i, X]
            for c2, v in eT.rows.get(c, {}).items():
                add(("E", i), a * N + c2, col, var, v)
            for d2, v in e.rows.get(d, {}).items():
                add(("E", i), r, b * N + d2, var, -v)
            # [f_i (x) 1, X]
            for a2, v in fT.rows.get(a, {}).items():
                add(("F", i), a2 * N + c, col, var, v)
            for b2, v in f.rows.get(b, {}).items():
                add(("F", i), r, b2 * N + d, var, -v)
    rhs = {}
    for i, op in enumerate(ctx.ops):
        prev = _sub(key, ctx.alpha_keys[i])
        if min(prev) < 0:
            continue
        Xp = SMat.identity(N * N) if not any(prev) else solved.get(prev)
        if Xp is None:
            continue
        mE = Xp @ op["e_kinv"] - op["e_k"] @ Xp
        mF = Xp @ op["k_f"] - op["kinv_f"] @ Xp
        for tag, m in ((("E", i), mE), (("F", i), mF)):
            for r, c, v in m.entries():
                rhs[(tag, r, c)] = v
    positions = sorted(set(eqs) | set(rhs), key=lambda p: (p[0][0], p[0][1], p[1], p[2]))
    if ctx.rng is not None:
        ctx.rng.shuffle(positions)
    for pos in positions:
        solver.add(eqs.get(pos, {}), rhs.get(pos, ZERO), label=(key_str(key),) + pos)


def _w_vectors(ctx: _Context):
    """w (x) v_k for each k, as sparse dicts on V^{(x)M} (x) V."""
    N = ctx.N
    out = []
    for k in range(N):
        out.append({idx * N + k: v for idx, v in ctx.inv.w.items()})
    return out


def _digits(idx, base, count):
    out = [0] * count
    for p in range(count - 1, -1, -1):
        idx, out[p] = divmod(idx, base)
    return out


def _apply_site(ctx, X: SMat, j: int, vec: dict, M: int) -> dict:
    """(X)_{j,q} on V^{(x)M} (x) V_q; X indexed by (site, quantum)."""
    N = ctx.N
    XT_cols = X.transpose().rows
    out = {}
    for idx, val in vec.items():
        dig = _digits(idx, N, M + 1)
        col = dig[j] * N + dig[M]
        for row, x in XT_cols.get(col, {}).items():
            a, c = divmod(row, N)
            dig2 = list(dig)
            dig2[j], dig2[M] = a, c
            nidx = 0
            for dd in dig2:
                nidx = nidx * N + dd
            p = x * val
            old = out.get(nidx)
            out[nidx] = p if old is None else old + p
    return {k: v for k, v in out.items() if not v.is_zero()}


def _apply_kinv(ctx, j: int, vec: dict, M: int) -> dict:
    N = ctx.N
    out = {}
    for idx, val in vec.items():
        dig = _digits(idx, N, M + 1)
        out[idx] = val * ctx.kpair[dig[j]][dig[M]]
    return out


def _compositions(key, parts: int, pool: list):
    """Ordered tuples of weights (each 0 or in pool) summing to key."""
    zero = tuple(0 for _ in key)
    if parts == 1:
        yield (key,)
        return
    for first in [zero] + pool:
        rest = _sub(key, first)
        if min(rest) < 0:
            continue
        for tail in _compositions(rest, parts - 1, pool):
            yield (first,) + tail


def w_relation_terms(ctx: _Context, key, solved: dict, include_unknown_slot=True):
    """Known part of the weight-key component of the w-relation, per quantum vector."""
    M = ctx.inv.M
    pts = ctx.inv.points
    zero = tuple(0 for _ in key)
    pool = [k for k in solved if all(x <= y for x, y in zip(k, key))]
    totals = [dict() for _ in range(ctx.N)]
    for comp in _compositions(key, M, pool):
        nonzero = [c for c in comp if c != zero]
        if len(nonzero) < 2 and include_unknown_slot:
            continue          # terms linear in X_key itself
        if any(c != zero and c not in solved for c in comp):
            continue
        scal = ONE
        for j, c in enumerate(comp):
            if c[0]:
                scal = scal * pts[j] ** c[0]
        for k, vec in enumerate(_w_vectors(ctx)):
            v = vec
            for j in range(M - 1, -1, -1):
                v = _apply_kinv(ctx, j, v, M)
                if comp[j] != zero:
                    v = _apply_site(ctx, solved[comp[j]], j, v, M)
                if not v:
                    break
            for idx, val in v.items():
                t = totals[k]
                t[idx] = t.get(idx, ZERO) + scal * val
    return totals


def _w_scalar_equation(ctx: _Context, key, unknowns, solved, solver: EchelonSolver):
    """Add one component of the w-relation at key = n delta (pins the scalar)."""
    N, M = ctx.N, ctx.inv.M
    pts = ctx.inv.points
    n = key[0]
    index = {u: v for v, u in enumerate(unknowns)}
    k = 0
    target_idx = min(ctx.inv.w) * N + k
    coeffs = {}
    for j in range(M):
        # K^-1 factors to the right of site j, then X at site j, then K^-1 on the left sites
        vec = {idx * N + k: v for idx, v in ctx.inv.w.items()}
        for jj in range(M - 1, j - 1, -1):
            vec = _apply_kinv(ctx, jj, vec, M)
        aj = pts[j] ** n
        for idx, val in vec.items():
            dig = _digits(idx, N, M + 1)
            b, d = dig[j], dig[M]
            for (ua, uc, ub, ud), var in index.items():
                if ub != b or ud != d:
                    continue
                dig2 = list(dig)
                dig2[j], dig2[M] = ua, uc
                nidx = 0
                for dd in dig2:
                    nidx = nidx * N + dd
                if nidx != target_idx:
                    continue
                left = ONE
                for jj in range(j):
                    left = left * ctx.kpair[dig2[jj]][dig2[M]]
                coeffs[var] = coeffs.get(var, ZERO) + aj * val * left
    known = w_relation_terms(ctx, key, solved)[k].get(target_idx, ZERO)
    solver.add(coeffs, -known, label=(key_str(key), "w"))


def solve_theta(rep: EvalRep, K: int, convention: str | None = None,
                inv: InvariantVec | None = None, log=None, rng=None) -> RArtifact:
    """Solve for the images of Theta_mu, z-order <= K.

    Without an explicit convention the k-inverse twist is tried first and the
    first-order anchor -(q_i - q_i^-1) e_i (x) f_i decides; the alternative is
    used only if the anchor fails.  ``rng`` (a random.Random) shuffles the
    order in which equations enter the elimination; the result must not change.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if rep.twist_param != ONE:
        raise ValueError("solve_theta expects an untwisted representation")
    inv = inv or invariant_vector(rep.datum.atype)
    conventions = [convention] if convention else list(CONVENTIONS)
    errors = []
    for conv in conventions:
        try:
            art = _solve(rep, K, conv, inv, log, rng)
        except SolverError as exc:
            errors.append(f"{conv}: {exc}")
            continue
        bad = anchor_mismatches(art, rep)
        if not bad:
            return art
        errors.append(f"{conv}: anchor mismatch at nodes {bad}")
    raise SolverError("; ".join(errors))


def anchor_mismatches(art: RArtifact, rep: EvalRep) -> list:
    d = art.datum
    bad = []
    for i in range(d.l + 1):
        key = tuple(1 if j == i else 0 for j in range(d.l + 1))
        qi = rep.q_node(i)
        expect = kron(rep.e[i], rep.f[i]).scale(-(qi - qi.inv()))
        if art.theta.get(key, SMat(art.N ** 2)) != expect:
            bad.append(i)
    return bad


def _solve(rep, K, conv, inv, log, rng=None) -> RArtifact:
    ctx = _Context(rep, inv, conv, rng)
    d = ctx.datum
    solved = {}
    stats = {"weights": 0, "unknowns": 0}
    t0 = time.time()
    for key in enumerate_weights(d, K):
        nu = finite_part(d, key)
        unknowns = ctx.unknowns(nu)
        if not unknowns:
            continue
        solver = EchelonSolver(len(unknowns))
        try:
            _intertwiner_equations(ctx, key, unknowns, solved, solver)
            if solver.rank() < len(unknowns) and not any(nu):
                _w_scalar_equation(ctx, key, unknowns, solved, solver)
            values = solver.solution(what=f"weight {key_str(key)}")
        except LinearSystemError as exc:
            raise SolverError(f"weight {key_str(key)}: {exc}") from None
        N = ctx.N
        X = SMat.from_entries(N * N, N * N, ((a * N + c, b * N + dd, v)
                                             for (a, c, b, dd), v in zip(unknowns, values)))
        stats["weights"] += 1
        stats["unknowns"] += len(unknowns)
        if not X.is_zero():
            solved[key] = X
        if log:
            log(f"weight {key_str(key)}: {len(unknowns)} unknowns, nnz {X.nnz()}")
    stats["seconds"] = round(time.time() - t0, 3)
    return RArtifact(datum=d, K=K, theta=solved, convention=conv, meta=stats)


# ---------------------------------------------------------------------------
# structure checks


def check_structure(art: RArtifact, R: MatSeries | None = None) -> list:
    R = R if R is not None else assemble_R(art)
    d = art.datum
    N = art.N
    eta = d.eta
    tri, weight = [], []
    for n in range(R.K + 1):
        for row, col, _ in R[n].entries():
            i1, j1 = divmod(row, N)
            i2, j2 = divmod(col, N)
            if n == 0 and not (i1 <= i2 and j1 >= j2):
                tri.append(f"R[0] ({i1 + 1}{j1 + 1},{i2 + 1}{j2 + 1})")
            if (eta[i1] + eta[j1]) != (eta[i2] + eta[j2]) or ((i1 == i2) != (j1 == j2)):
                weight.append(f"R[{n}] ({i1 + 1}{j1 + 1},{i2 + 1}{j2 + 1})")
    out = [
        CheckResult("triangular", FAIL if tri else PASS, R.K if not tri else 0, "; ".join(tri[:3])),
        CheckResult("weight_conservation", FAIL if weight else PASS, R.K if not weight else 0,
                    "; ".join(weight[:3])),
    ]
    return out


# ---------------------------------------------------------------------------
# classical oracle (independent: plain Fractions, dense elimination)


@dataclass
class ClassicalR:
    N: int
    K: int
    r: dict          # weight key -> {(row, col): Fraction}
    r0: dict         # (row, row) -> Fraction
    normalization: str


def _frac_matrix(m: SMat) -> dict:
    out = {}
    for i, j, v in m.entries():
        x = v.specialize(1)
        out[(i, j)] = Fraction(int(x.numerator), int(x.denominator))
    return out


def _fmul(a: dict, b: dict) -> dict:
    brow = {}
    for (k, j), v in b.items():
        brow.setdefault(k, []).append((j, v))
    out = {}
    for (i, k), v in a.items():
        for j, w in brow.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + v * w
    return {k: v for k, v in out.items() if v != 0}


def _fkron(a: dict, b: dict, nb: int) -> dict:
    return {(i * nb + k, j * nb + l): v * w for (i, j), v in a.items() for (k, l), w in b.items()}


def _fident(n):
    return {(i, i): Fraction(1) for i in range(n)}


def _fsub(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v != 0}


def _dense_solve(rows: list, rhs: list, nvars: int, what: str) -> list:
    """Gauss-Jordan over Fractions with consistency and rank checks."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(nvars):
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
        piv_cols.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][nvars] != 0:
            raise SolverError(f"classical recursion inconsistent at {what}")
    if r < nvars:
        raise SolverError(f"classical recursion underdetermined at {what} (rank {r} < {nvars})")
    out = [Fraction(0)] * nvars
    for i, c in enumerate(piv_cols):
        out[c] = m[i][nvars]
    return out


def classical_oracle(rep: EvalRep, K: int, inv: InvariantVec | None = None) -> ClassicalR:
    d = rep.datum
    N = rep.N
    l = d.l
    t = d.atype
    inv = inv or invariant_vector(t)
    E = [_frac_matrix(m) for m in rep.e]
    F = [_frac_matrix(m) for m in rep.f]
    I = _fident(N)
    # weights as plain tuples of Fractions (finite parts)
    wt = [tuple(d.finite_key(eta)) for eta in d.eta]
    use_trace = t.twisted
    wdot = {}
    for idx, v in inv.w.items():
        x = v.specialize(1)
        wdot[idx] = Fraction(int(x.numerator), int(x.denominator))
    M = inv.M
    r = {}
    for key in enumerate_weights(d, K):
        nu = finite_part(d, key)
        cols = [(a, b) for a in range(N) for b in range(N)
                if tuple(x - y for x, y in zip(wt[a], wt[b])) == nu]
        negs = [(c, dd) for c in range(N) for dd in range(N)
                if tuple(y - x for x, y in zip(wt[c], wt[dd])) == nu]
        unknowns = [(a * N + c, b * N + dd) for (a, b) in cols for (c, dd) in negs]
        if not unknowns:
            continue
        simple = [i for i in range(l + 1) if key == tuple(1 if j == i else 0 for j in range(l + 1))]
        if simple:
            i = simple[0]
            m = {k: v * d.d[i] for k, v in _fkron(E[i], F[i], N).items()}
            r[key] = m
            continue
        idx = {u: n for n, u in enumerate(unknowns)}
        eq_rows, eq_rhs = [], []

        def emit(lin: dict, const: dict):
            # lin: position -> {var: coeff}; const: position -> value; equation lin = -const
            for pos in set(lin) | set(const):
                row = [Fraction(0)] * len(unknowns)
                for var, c in lin.get(pos, {}).items():
                    row[var] += c
                eq_rows.append(row)
                eq_rhs.append(-const.get(pos, Fraction(0)))

        for i in range(l + 1):
            prev = _sub(key, tuple(1 if j == i else 0 for j in range(l + 1)))
            rp = r.get(prev, {}) if min(prev) >= 0 and any(prev) else {}
            for A, B, Bp in ((_fkron(I, E[i], N), _fkron(E[i], I, N), None),
                             (_fkron(F[i], I, N), _fkron(I, F[i], N), None)):
                # [A, r_mu] + [B, r_prev] = 0
                lin = {}
                for (ur, uc), var in idx.items():
                    for (p, q_), v in A.items():
                        if q_ == ur:
                            lin.setdefault((p, uc), {}).setdefault(var, 0)
                            lin[(p, uc)][var] += v
                        if p == uc:
                            lin.setdefault((ur, q_), {}).setdefault(var, 0)
                            lin[(ur, q_)][var] -= v
                const = _fsub(_fmul(B, rp), _fmul(rp, B)) if rp else {}
                emit(lin, const)
        # normalization
        if use_trace:
            lin = {}
            for (ur, uc), var in idx.items():
                a, c = divmod(ur, N)
                b, dd = divmod(uc, N)
                if a == b:
                    lin.setdefault((c, dd), {})[var] = lin.get((c, dd), {}).get(var, 0) + 1
            emit(lin, {})
        else:
            lin = {}
            for kq in range(N):
                for widx, wv in wdot.items():
                    dig = _digits(widx, N, M)
                    for j in range(M):
                        for (ur, uc), var in idx.items():
                            a, c = divmod(ur, N)
                            b, dd = divmod(uc, N)
                            if b != dig[j] or dd != kq:
                                continue
                            dig2 = list(dig)
                            dig2[j] = a
                            out = 0
                            for x in dig2:
                                out = out * N + x
                            pos = (out, c, kq)
                            lin.setdefault(pos, {})
                            lin[pos][var] = lin[pos].get(var, 0) + wv
            emit(lin, {})
        vals = _dense_solve(eq_rows, eq_rhs, len(unknowns), key_str(key))
        m = {u: v for u, v in zip(unknowns, vals) if v != 0}
        if m:
            r[key] = m
    r0 = {}
    for a in range(N):
        for b in range(N):
            v = pairing(d.eta[a], d.eta[b], d) / 2
            if v:
                r0[(a * N + b, a * N + b)] = v
    return ClassicalR(N, K, r, r0, "trace" if use_trace else "w")


def check_classical_limit(art: RArtifact, cls: ClassicalR) -> CheckResult:
    """(1 - script_R)/(q - q^-1) at q = 1 against r(z) - r_0, weight by weight."""
    D = art.datum.D
    qq = qpow(1, D) - qpow(-1, D)
    keys = sorted(set(art.theta) | set(cls.r), key=lambda k: (sum(k), k))
    K = min(art.K, cls.K)
    for key in keys:
        if key[0] > K:
            continue
        X = art.theta.get(key, SMat(art.N ** 2))
        got = {}
        for i, j, v in X.entries():
            quo = -v / qq
            try:
                x = quo.specialize(1)
            except PoleError:
                return CheckResult("classical_limit", FAIL, max(key[0] - 1, 0),
                                   f"entry ({i},{j}) of weight {key_str(key)} not divisible by q-q^-1")
            got[(i, j)] = Fraction(int(x.numerator), int(x.denominator))
        got = {k: v for k, v in got.items() if v != 0}
        want = cls.r.get(key, {})
        if got != want:
            diff = sorted(set(got.items()) ^ set(want.items()))[:1]
            return CheckResult("classical_limit", FAIL, max(key[0] - 1, 0),
                               f"weight {key_str(key)} mismatch {diff} normalization={cls.normalization}")
    return CheckResult("classical_limit", PASS, K, f"normalization={cls.normalization}")


# ---------------------------------------------------------------------------
# Yang-Baxter


def _three_site(series: MatSeries, N: int, slots, kind, K) -> BiSeries:
    emb = series.map_coeffs(lambda m: embed(m, (N, N, N), slots))
    return BiSeries.from_univariate(emb, kind, K)


def ybe_residual(R: MatSeries, N: int, K: int, conj: list | None = None) -> BiSeries:
    """R12(x) R13(xy) R23(y) - R23(y) R13(xy) R12(x) to total order K.

    With conj (a diagonal on V (x) V) the middle factor is replaced by its
    conjugate under conj_12, i.e. the cocycle form Theta_12 Psi_12(Theta_13) Theta_23.
    """
    R12 = _three_site(R, N, (0, 1), "x", K)
    R13 = _three_site(R, N, (0, 2), "xy", K)
    R23 = _three_site(R, N, (1, 2), "y", K)
    if conj is None:
        return R12 * R13 * R23 - R23 * R13 * R12
    c12 = embed(SMat.diag(conj), (N, N, N), (0, 1))
    c12i = embed(SMat.diag([x.inv() for x in conj]), (N, N, N), (0, 1))
    c23 = embed(SMat.diag(conj), (N, N, N), (1, 2))
    c23i = embed(SMat.diag([x.inv() for x in conj]), (N, N, N), (1, 2))
    P12 = BiSeries(R12.dim, K, {k: c12i @ v @ c12 for k, v in R13.coeffs.items()})
    P23 = BiSeries(R12.dim, K, {k: c23i @ v @ c23 for k, v in R13.coeffs.items()})
    return R12 * P12 * R23 - R23 * P23 * R12


def check_ybe(art: RArtifact, K: int) -> CheckResult:
    R = assemble_R(art)
    N = art.N
    if K > art.K:
        raise ValueError("YBE order beyond the solved truncation")
    res = ybe_residual(R, N, K)
    if res.is_zero():
        art.ybe_variant = "untwisted"
        return CheckResult("ybe", PASS, K, "variant=untwisted")
    first = res.first_nonzero()
    res2 = ybe_residual(art.script_R(), N, K, conj=art.K_diag(-1))
    if res2.is_zero():
        art.ybe_variant = "conjugated"
        return CheckResult("ybe", PASS, K, f"variant=conjugated untwisted_first_residual={first[0]}")
    return CheckResult("ybe", FAIL, max(first[0][0] + first[0][1] - 1, 0),
                       f"first residual at order {first[0]} entry {first[1]}")
