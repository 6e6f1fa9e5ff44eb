from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qaffine.linalg import EchelonSolver, InconsistentSystem, UnderdeterminedSystem, inverse
from qaffine.matseries import (BiSeries, MatSeries, SeriesError, exp_nilpotent, inv, log_unipotent,
                               mul, rescale)
from qaffine.qfield import ONE, ZERO, QScalar, qpow
from qaffine.sparse import SMat, block, embed, flip, from_blocks, kron


def c(x):
    return QScalar.const(x)


def unit(n, i, j, v=1):
    return SMat.from_entries(n, n, [(i, j, c(v))])


s = QScalar.s_power(1)
scalars = st.sampled_from([c(1), c(-1), c(2), c(Fraction(1, 3)), s, s.inv(), s + ONE, (s - c(2)).inv()])


@st.composite
def smats(draw, n=3, max_nnz=4):
    ents = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), scalars),
                         max_size=max_nnz))
    return SMat.from_entries(n, n, ents)


@st.composite
def series(draw, n=3, K=3):
    return MatSeries(n, K, {k: draw(smats(n)) for k in range(K + 1)})


@st.composite
def unit_series(draw, n=3, K=3):
    x = draw(series(n, K))
    x.coeffs.pop(0, None)
    return MatSeries.identity(n, K) + x


# -- examples ---------------------------------------------------------------

def test_mul_examples():
    A = unit(2, 0, 1)
    one = MatSeries.identity(2, 3)
    a = one + MatSeries(2, 3, {1: A})
    b = one - MatSeries(2, 3, {1: A})
    assert a * b == one - MatSeries(2, 3, {2: A @ A})
    X = MatSeries(2, 3, {0: A, 2: unit(2, 1, 1)})
    assert one * X == X
    p = MatSeries(2, 3, {1: unit(2, 0, 1)}) * MatSeries(2, 3, {1: unit(2, 1, 0)})
    assert p == MatSeries(2, 3, {2: unit(2, 0, 0)})


def test_mul_dimension_mismatch():
    with pytest.raises(SeriesError):
        MatSeries.identity(2, 1) * MatSeries.identity(3, 1)


def test_inv_examples():
    A = SMat.from_entries(2, 2, [(0, 1, c(1)), (1, 0, c(2)), (1, 1, c(1))])
    a = MatSeries.identity(2, 4) - MatSeries(2, 4, {1: A})
    want = MatSeries(2, 4, {0: SMat.identity(2), 1: A, 2: A @ A, 3: A @ A @ A, 4: A @ A @ A @ A})
    assert inv(a) == want
    assert inv(MatSeries.identity(3, 2)) == MatSeries.identity(3, 2)
    D = SMat.diag([c(2), s, c(-3)])
    Nil = SMat.from_entries(3, 3, [(0, 1, s), (1, 2, c(5))])
    x = MatSeries(3, 4, {0: D, 1: Nil})
    assert x * inv(x) == MatSeries.identity(3, 4)
    with pytest.raises(SeriesError):
        inv(MatSeries(2, 2, {0: unit(2, 0, 0)}))


def test_log_examples():
    cz = c(Fraction(3, 2))
    a = MatSeries.identity(2, 4) + MatSeries(2, 4, {1: SMat.identity(2).scale(cz)})
    lg = log_unipotent(a)
    for k in range(1, 5):
        assert lg[k] == SMat.identity(2).scale(cz ** k * c(Fraction((-1) ** (k + 1), k)))
    assert log_unipotent(MatSeries.identity(2, 3)).is_zero()
    with pytest.raises(SeriesError):
        log_unipotent(MatSeries(2, 2, {0: SMat.identity(2).scale(c(2))}))


def test_rescale_examples():
    q2 = qpow(2, 1)
    a = MatSeries(1, 2, {0: SMat.identity(1), 1: SMat.identity(1)})
    assert rescale(a, q2) == MatSeries(1, 2, {0: SMat.identity(1), 1: SMat.identity(1).scale(q2)})
    assert rescale(a, 1) == a
    assert rescale(rescale(a, q2), q2.inv()) == a
    with pytest.raises(SeriesError):
        rescale(a, 0)


def test_bivariate_embedding():
    A = unit(2, 0, 1)
    sr = MatSeries(2, 2, {1: A})
    bx = BiSeries.from_univariate(sr, "x", 2)
    by = BiSeries.from_univariate(sr, "y", 2)
    bxy = BiSeries.from_univariate(sr, "xy", 2)
    assert set(bx.coeffs) == {(1, 0)} and set(by.coeffs) == {(0, 1)} and set(bxy.coeffs) == {(1, 1)}
    assert (bx * by - by * bx).is_zero()


# -- properties --------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, x):
    assert (a * b) * x == a * (b * x)
    assert a * (b + x) == a * b + a * x
    assert (a + b) * x == a * x + b * x
    one = MatSeries.identity(3, 3)
    assert one * a == a and a * one == a


@settings(max_examples=60, deadline=None)
@given(unit_series())
def test_inverse_round_trip(a):
    ai = inv(a)
    assert a * ai == MatSeries.identity(3, 3)
    assert ai * a == MatSeries.identity(3, 3)


@settings(max_examples=40, deadline=None)
@given(unit_series(K=4))
def test_exp_log_round_trip(a):
    assert exp_nilpotent(log_unipotent(a)) == a


@settings(max_examples=40, deadline=None)
@given(series(), series())
def test_truncation_monotonicity(a, b):
    assert (a * b).truncate(1) == a.truncate(1) * b.truncate(1)


def test_product_tracks_truncation():
    a = MatSeries.identity(2, 3)
    b = MatSeries.identity(2, 1)
    assert mul(a, b).K == 1


# -- sparse and linear algebra -------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(smats(), smats(), smats())
def test_sparse_algebra(a, b, x):
    assert (a @ b) @ x == a @ (b @ x)
    assert (a + b).transpose() == a.transpose() + b.transpose()
    assert (a @ b).transpose() == b.transpose() @ a.transpose()


@settings(max_examples=40, deadline=None)
@given(smats(n=2), smats(n=2))
def test_kron_embed_flip(a, b):
    ab = kron(a, b)
    assert embed(ab, (2, 2), (0, 1)) == ab
    assert embed(a, (2, 2), (0,)) == kron(a, SMat.identity(2))
    assert flip(ab, 2) == kron(b, a)
    assert embed(a, (2, 2, 2), (1,)) == kron(kron(SMat.identity(2), a), SMat.identity(2))
    assert block(ab, 1, 0, 2) == b.scale(a.get(1, 0))
    blocks = {(i, j): block(ab, i, j, 2) for i in range(2) for j in range(2)}
    assert from_blocks(blocks, 2, 2) == ab


@settings(max_examples=60, deadline=None)
@given(smats())
def test_inverse_matrix(a):
    m = a + SMat.identity(3).scale(s * s + c(7))
    assert m @ inverse(m) == SMat.identity(3)


def test_echelon_solver():
    sol = EchelonSolver(2)
    sol.add({0: ONE, 1: ONE}, c(3))
    sol.add({0: ONE, 1: -ONE}, c(1))
    sol.add({0: c(2)}, c(4))
    assert sol.solution() == [c(2), c(1)]
    bad = EchelonSolver(1)
    bad.add({0: ONE}, ONE)
    with pytest.raises(InconsistentSystem):
        bad.add({0: c(2)}, c(3))
    under = EchelonSolver(2)
    under.add({0: ONE, 1: ONE}, ZERO)
    with pytest.raises(UnderdeterminedSystem):
        under.solution()
