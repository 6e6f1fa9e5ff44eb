from dataclasses import replace

import pytest

from qaffine.evalrep import (evaluation_points, invariant_vector, selfcheck,
                             transpose_pattern, twist)
from qaffine.qfield import ONE, QScalar, qint, qpow
from qaffine.rootdata import AffineType
from qaffine.sparse import SMat

from conftest import MINIMAL, inv_of, rep_of


def E(N, *entries):
    return SMat.from_entries(N, N, [(i - 1, j - 1, QScalar.const(1) if c == 1 else c)
                                    for i, j, c in entries])


def m1():
    return QScalar.const(-1)


def test_a1_matrices():
    rep = rep_of("A", 1)
    assert rep.e[1] == E(2, (1, 2, 1)) and rep.f[1] == E(2, (2, 1, 1))
    assert rep.e[0] == E(2, (2, 1, 1)) and rep.f[0] == E(2, (1, 2, 1))


def test_c2_matrices():
    rep = rep_of("C", 2)
    assert rep.e[2] == E(4, (2, 3, 1))
    assert rep.e[0] == E(4, (4, 1, 1))
    assert rep.e[1] == E(4, (1, 2, 1), (3, 4, m1()))


def test_b3_node_three_split():
    # x = 1, y = [2]_3: the e-pieces carry no [2], the f-pieces carry all of it
    rep = rep_of("B", 3)
    two = qint(2, 3, rep.datum)
    assert rep.e[3] == E(7, (3, 4, 1), (4, 5, m1()))
    assert rep.f[3] == E(7, (4, 3, two), (5, 4, -two))
    assert rep.pieces[("e", 3, 1)] + rep.pieces[("e", 3, -1)] == rep.e[3]


@pytest.mark.parametrize("fam", list(MINIMAL))
def test_transpose_duality(fam):
    rep = rep_of(fam, MINIMAL[fam])
    pat = transpose_pattern(rep)
    two = {0: qint(2, 0, rep.datum)}
    for i, c in pat.items():
        if fam in ("B", "A2even", "D2") and i == rep.datum.l:
            assert c == qint(2, i, rep.datum)
        elif fam == "D2" and i == 0:
            assert c == two[0]
        else:
            assert c == ONE


def test_twist():
    rep = rep_of("A", 1)
    assert twist(rep, 1) == rep
    q = qpow(1, rep.datum.D)
    t = twist(rep, q.inv() * q.inv())
    assert t.e[0] == rep.e[0].scale(q.inv() * q.inv())
    assert t.e[1] == rep.e[1] and t.f[1] == rep.f[1]
    assert twist(twist(rep, q), q.inv()) == rep
    with pytest.raises(ValueError):
        twist(rep, 0)


def test_a1_invariant_vector():
    inv = inv_of("A", 1)
    q = qpow(1, 2)
    assert inv.M == 2
    assert inv.w == {0 * 2 + 1: ONE, 1 * 2 + 0: -q}
    assert inv.points == (ONE, q.inv() * q.inv())


def test_c2_u_list():
    inv = inv_of("C", 2)
    q = qpow(1, 1)
    u = [inv.J.get(i, 3 - i) for i in range(4)]
    assert u == [-q.inv() * q.inv(), -q.inv(), q, q * q]


def test_evaluation_points_second_node():
    def a2(fam):
        t = AffineType(fam, MINIMAL[fam])
        return evaluation_points(t)[1], rep_of(fam, MINIMAL[fam]).datum.D

    for fam, sign, exp in [("B", 1, -10), ("C", 1, -6), ("D", 1, -6),
                           ("A2even", -1, -6), ("A2odd", -1, -6), ("D2", 1, -4)]:
        val, D = a2(fam)
        assert val == qpow(exp, D) * QScalar.const(sign), fam


@pytest.mark.parametrize("fam", list(MINIMAL))
def test_selfcheck_all_types(fam):
    rep, inv = rep_of(fam, MINIMAL[fam]), inv_of(fam, MINIMAL[fam])
    res = selfcheck(rep, inv)
    assert all(r.ok for r in res), [r.line(fam, 0) for r in res if not r.ok]
    names = {r.name for r in res}
    assert {"weight", "ef", "serre_e", "serre_f", "k_delta", "w_invariant"} <= names
    if fam == "D2":
        assert "trivial_summand" in names


def test_type_a2_uses_three_fold_product():
    inv = invariant_vector(AffineType("A", 2))
    assert inv.M == 3 and len(inv.w) == 6
    assert all(r.ok for r in selfcheck(rep_of("A", 2), inv))


def test_corrupted_e0_breaks_serre():
    rep = rep_of("A", 1)
    bad = replace(rep, e=(rep.e[0] + E(2, (1, 2, 1)),) + rep.e[1:])
    res = {r.name: r for r in selfcheck(bad)}
    assert not res["serre_e"].ok
    assert "(i,j)=(0,1)" in res["serre_e"].detail
