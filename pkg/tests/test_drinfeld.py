from dataclasses import replace

import pytest

from qaffine.drinfeld import (Currents, OutOfScope, check_congruence, check_drinfeld_relations, check_gauss,
                              extract_h, extraction_table, gauss_decompose, recompose, udl)
from qaffine.matseries import MatSeries, inv
from qaffine.qfield import ONE, QScalar, qint, qpow
from qaffine.sparse import SMat

from conftest import L_of, currents, rep_of


def sc(*coeffs, K=3):
    """1x1 series from scalar coefficients."""
    return MatSeries(1, K, {n: SMat.diag([QScalar.const(c) if not isinstance(c, QScalar) else c])
                            for n, c in enumerate(coeffs) if c != 0})


def unit(N, i, j):
    return SMat.from_entries(N, N, [(i, j, ONE)])


# -- block Gauss decomposition --------------------------------------------------

def test_udl_upper_triangular_input():
    a, b, d = sc(2, 1), sc(0, 3), sc(1, 0, 5)
    zero = MatSeries(1, 3)
    U, D, Lo = udl([[a, b], [zero, d]])
    assert D[1] == d and D[0] == a
    assert U[0][1] == b * inv(d)
    assert Lo[1][0].is_zero()


def test_udl_general_2x2():
    a, b, c, d = sc(1, 1), sc(0, 2), sc(3), sc(1, 0, 1)
    U, D, Lo = udl([[a, b], [c, d]])
    di = inv(d)
    assert D[0] == a - b * di * c
    assert Lo[1][0] == di * c
    got = recompose(U, D, Lo)
    assert got[0][0] == a and got[0][1] == b and got[1][0] == c and got[1][1] == d


def test_udl_identity():
    one, zero = MatSeries.identity(2, 2), MatSeries(2, 2)
    U, D, Lo = udl([[one, zero], [zero, one]])
    assert all(x == one for x in D)
    assert U[0][1].is_zero() and Lo[1][0].is_zero()


@pytest.mark.parametrize("fam,r,K", [("A", 1, 3), ("C", 2, 2), ("D2", 2, 2), ("A2even", 1, 2)])
def test_gauss_all(fam, r, K):
    L = L_of(fam, r, K)
    assert check_gauss(L, gauss_decompose(L)).ok


# -- currents -----------------------------------------------------------------

def test_a1_constant_currents():
    _, cur = currents("A", 1, 3)
    q = qpow(1, 2)
    assert cur.phim[(1, 0)] == SMat.diag([q, q.inv()])
    assert cur.phip[(1, 0)] == SMat.diag([q.inv(), q])
    assert cur.xp[(1, 0)] == unit(2, 0, 1)
    assert cur.xm[(1, 0)] == unit(2, 1, 0)


def test_a1_relation_c_at_zero():
    _, cur = currents("A", 1, 3)
    q = qpow(1, 2)
    lhs = cur.xp[(1, 0)] @ cur.xm[(1, 0)] - cur.xm[(1, 0)] @ cur.xp[(1, 0)]
    assert lhs == (cur.phim[(1, 0)] - cur.phip[(1, 0)]).scale((q - q.inv()).inv())


def test_c2_relation_b_uses_q_integer():
    _, cur = currents("C", 2, 2)
    rep = rep_of("C", 2)
    h, x = cur.h[(1, 1)], cur.xp[(1, 0)]
    assert h @ x - x @ h == cur.xp[(1, 1)].scale(qint(2, 1, rep.datum))


def test_d4_double_ratio_readings_agree():
    rep = rep_of("D", 4)
    rows = extraction_table(rep)[4]
    assert [ex.tag for ex in rows] == ["D1", "D2"]
    g, _ = currents("D", 4, 1)
    D = g.diag[1]
    (a1, b1, _), (a2, b2, _) = rows[0].ratio, rows[1].ratio
    assert D[a1] * inv(D[b1]) == D[a2] * inv(D[b2])


def test_h_from_scalar_phi():
    rep = rep_of("A", 1)
    q = qpow(1, 2)
    qq = q - q.inv()
    k, kinv = rep.k_node(1), rep.k_node(1, -1)
    c = QScalar.const(3)
    cur = Currents(rep.datum, 3)
    cur.phip = {(1, 0): kinv, (1, -1): kinv.scale(c)}
    cur.phip.update({(1, -m): SMat(2, 2) for m in (2, 3)})
    cur.phim = {(1, 0): k}
    cur.phim.update({(1, m): SMat(2, 2) for m in (1, 2, 3)})
    extract_h(cur, rep)
    ident = SMat.identity(2)
    # log(1 + c z) = c z - c^2 z^2 / 2 + c^3 z^3 / 3
    assert cur.h[(1, -1)] == ident.scale(-c / qq)
    assert cur.h[(1, -2)] == ident.scale(c * c / QScalar.const(2) / qq)
    assert cur.h[(1, -3)] == ident.scale(-c * c * c / QScalar.const(3) / qq)
    assert all(cur.h[(1, r)].is_zero() for r in (1, 2, 3))


@pytest.mark.parametrize("fam,r,K", [("A", 1, 3), ("A", 2, 2), ("C", 2, 2), ("B", 3, 1), ("D", 4, 1)])
def test_relations_and_congruence(fam, r, K):
    g, cur = currents(fam, r, K)
    rep = rep_of(fam, r)
    res = check_drinfeld_relations(cur, rep, K)
    assert [x.name for x in res] == [f"drinfeld.{c}" for c in "abcde"]
    assert all(x.ok for x in res), [x.detail for x in res if not x.ok]
    assert check_congruence(g, cur, rep, K).ok


def test_congruence_reports_free_entries_for_a2():
    g, cur = currents("A", 2, 2)
    res = check_congruence(g, cur, rep_of("A", 2), 2)
    assert res.detail.startswith("4 entries")


def test_wrong_shift_breaks_relations():
    _, cur = currents("A", 2, 2)
    q = qpow(1, 3)
    bad = replace(cur, xm={(i, m): X.scale(q ** m) for (i, m), X in cur.xm.items()})
    res = check_drinfeld_relations(bad, rep_of("A", 2), 2)
    assert not all(x.ok for x in res)


@pytest.mark.parametrize("fam,r", [("A2even", 1), ("A2odd", 3), ("D2", 2)])
def test_twisted_types_out_of_scope(fam, r):
    with pytest.raises(OutOfScope, match="^out of scope"):
        extraction_table(rep_of(fam, r))
