import random
from fractions import Fraction

import pytest
import sympy as sp

from qaffine.qfield import ONE, QScalar, qpow, to_canonical_string
from qaffine.rsolver import (RArtifact, SolverError, anchor_mismatches, assemble_R, check_classical_limit,
                             check_structure, check_ybe, classical_oracle, enumerate_weights, solve_theta,
                             ybe_residual)
from qaffine.sparse import SMat, kron

from conftest import MINIMAL, R_of, artifact, inv_of, rep_of

S, Z = sp.symbols("s z")


def to_sympy(x: QScalar):
    num, den = to_canonical_string(x).split("/")
    return sp.sympify(num.replace("^", "**"), locals={"s": S}) / sp.sympify(den.replace("^", "**"),
                                                                              locals={"s": S})


def unit(N, i, j):
    return SMat.from_entries(N, N, [(i, j, ONE)])


# -- independent oracle: the A1 intertwiner computed with sympy -----------------

def a1_intertwiner():
    """Y on V_z (x) V with Y Delta(x) = Delta^op(x) Y, normalised Y[0,0] = 1."""
    q = S ** 2
    E12 = sp.Matrix([[0, 1], [0, 0]])
    E21 = E12.T
    I2 = sp.eye(2)
    k = sp.diag(q, 1 / q)
    kp = sp.kronecker_product
    gens = {  # node -> (e, f, k) on (first factor at z, second factor at 1)
        1: ((E12, E12), (E21, E21), (k, k)),
        0: ((Z * E21, E21), (E12 / Z, E12), (k.inv(), k.inv())),
    }
    ys = sp.symbols("y0:16")
    Y = sp.Matrix(4, 4, ys)
    eqs = []
    for (e1, e2), (f1, f2), (k1, k2) in gens.values():
        d_e = kp(e1, I2) + kp(k1, e2)
        d_f = kp(f1, k2.inv()) + kp(I2, f2)
        op_e = kp(I2, e2) + kp(e1, k2)
        op_f = kp(k1.inv(), f2) + kp(f1, I2)
        for lhs in (Y * d_e - op_e * Y, Y * d_f - op_f * Y, Y * kp(k1, k2) - kp(k1, k2) * Y):
            eqs.extend(sp.together(x) for x in lhs)
    eqs.append(ys[0] - 1)
    sol = sp.solve([sp.numer(x) for x in eqs], ys, dict=True)
    assert len(sol) == 1 and len(sol[0]) == 16
    return Y.subs(sol[0]).applyfunc(sp.factor)


def test_a1_intertwiner_matches_sympy_oracle():
    K = 3
    R = R_of("A", 1, K)
    Y = a1_intertwiner()
    q = S ** 2
    assert sp.simplify(Y[1, 2] - (q ** 2 - 1) / (q ** 2 * Z - 1)) == 0
    Yser = Y.applyfunc(lambda x: sp.series(x, Z, 0, K + 1).removeO())
    r00 = sum(to_sympy(R[n].get(0, 0)) * Z ** n for n in range(K + 1))
    for i in range(4):
        for j in range(4):
            want = sp.expand(sp.series(r00 * Yser[i, j], Z, 0, K + 1).removeO())
            for n in range(K + 1):
                got = to_sympy(R[n].get(i, j))
                assert sp.simplify(got - want.coeff(Z, n)) == 0, (i, j, n)


# -- anchors and hand-checkable values --------------------------------------------

def test_a1_anchors():
    art = artifact("A", 1, 3)
    q = qpow(1, 2)
    qq = q - q.inv()
    assert art.theta[(1, 0)] == kron(unit(2, 1, 0), unit(2, 0, 1)).scale(-qq)   # e0 (x) f0
    assert art.theta[(0, 1)] == kron(unit(2, 0, 1), unit(2, 1, 0)).scale(-qq)   # e1 (x) f1
    assert anchor_mismatches(art, rep_of("A", 1)) == []


def test_a1_imaginary_weight_support():
    art = artifact("A", 1, 3)
    # E_ab (x) E_cd sits at (a*2 + c, b*2 + d)
    pairs = [((0, 0), (1, 1)), ((1, 1), (0, 0)), ((0, 1), (1, 0)), ((1, 0), (0, 1)),
             ((0, 0), (0, 0)), ((1, 1), (1, 1))]
    allowed = {(a * 2 + c, b * 2 + d) for (a, b), (c, d) in pairs}
    for n in (1, 2, 3):
        X = art.theta[(n, n)]
        assert {(i, j) for i, j, _ in X.entries()} <= allowed


def test_a1_T_diagonal():
    q = qpow(1, 2)
    assert artifact("A", 1, 1).T_diag() == [ONE, q.inv(), q.inv(), ONE]


def test_a1_constant_term():
    R0 = R_of("A", 1, 1)[0]
    q = qpow(1, 2)
    want = SMat.from_entries(4, 4, [(0, 0, ONE), (1, 1, q), (2, 2, q), (3, 3, ONE), (1, 2, ONE - q * q)])
    assert R0 == want


def test_weight_enumeration_a1():
    keys = enumerate_weights(rep_of("A", 1).datum, 1)
    # n delta + (eta_a - eta_b) with n <= 1; the key counts alpha_0 then alpha_1
    assert keys == [(0, 1), (1, 0), (1, 1), (1, 2)]


@pytest.mark.parametrize("fam", list(MINIMAL))
def test_structure_all_types(fam):
    r = MINIMAL[fam]
    K = 1 if fam in ("B", "D", "A2odd") else 2
    art = artifact(fam, r, K)
    assert anchor_mismatches(art, rep_of(fam, r)) == []
    res = check_structure(art)
    assert all(x.ok for x in res), [x.line(fam, K) for x in res]
    assert art.convention == "k-inverse"


@pytest.mark.parametrize("fam", list(MINIMAL))
def test_classical_limit_all_types(fam):
    r = MINIMAL[fam]
    K = 1 if fam in ("B", "D", "A2odd") else 2
    res = check_classical_limit(artifact(fam, r, K), classical_oracle(rep_of(fam, r), K, inv_of(fam, r)))
    assert res.ok, res.detail


def test_classical_values_a1():
    cls = classical_oracle(rep_of("A", 1), 1)
    assert cls.r[(0, 1)] == {(1, 2): Fraction(1)}            # E12 (x) E21
    assert set(cls.r0.values()) == {Fraction(1, 4), Fraction(-1, 4)}


# -- Yang-Baxter --------------------------------------------------------------------

@pytest.mark.parametrize("K", [0, 2])
def test_ybe_a1(K):
    res = check_ybe(artifact("A", 1, 3), K)
    assert res.ok and res.detail == "variant=untwisted"


def test_ybe_c2_order_one():
    assert check_ybe(artifact("C", 2, 2), 1).ok


def test_ybe_negative_control():
    art = artifact("A", 1, 2)
    bad = dict(art.theta)
    bad[(1, 1)] = bad[(1, 1)] + kron(unit(2, 0, 0), unit(2, 1, 1)).scale(qpow(1, 2))
    broken = RArtifact(datum=art.datum, K=art.K, theta=bad)
    R = assemble_R(broken)
    assert not ybe_residual(R, 2, 2).is_zero()
    assert not check_ybe(broken, 2).ok


# -- determinism and errors ----------------------------------------------------------

def test_equation_order_does_not_matter():
    base = artifact("C", 2, 2)
    for seed in (1, 7):
        shuffled = solve_theta(rep_of("C", 2), 2, rng=random.Random(seed))
        assert shuffled.theta == base.theta


def test_solver_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_theta(rep_of("A", 1), -1)
    with pytest.raises(SolverError):
        solve_theta(rep_of("A", 1), 1, convention="k-direct")


def test_r_constant_term_is_upper_triangular_in_block_order():
    R0 = R_of("C", 2, 2)[0]
    N = 4
    for row, col, _ in R0.entries():
        i1, j1 = divmod(row, N)
        i2, j2 = divmod(col, N)
        assert i1 <= i2 and j1 >= j2
