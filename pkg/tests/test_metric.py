import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from uscobound.metric import (
    EMPTY,
    Box,
    BoxUnion,
    Euclidean,
    FinSupportSeq,
    InexactDistance,
    OracleSet,
    ProbeSequence,
    SpaceMismatch,
    SparseSeq,
    distance,
    distance_bracket,
    finite_support_subspace,
    interval,
    point_from_json,
    point_to_json,
    set_distance,
    total_boundedness_probe,
)

reals = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = st.tuples(reals, reals, reals)
sparse = st.dictionaries(st.integers(1, 30), st.floats(-10, 10, allow_nan=False),
                         max_size=6).map(SparseSeq)


def test_distance_examples():
    assert distance(Euclidean(1), 0.9, 1.0) == pytest.approx(0.1)
    assert distance(FinSupportSeq(), SparseSeq.basis(1), SparseSeq.basis(2)) == math.sqrt(2)
    assert distance(Euclidean(1), Fraction(9, 10), Fraction(1)) == Fraction(1, 10)
    assert distance(Euclidean(2), (1.0, 2.0), (1.0, 2.0)) == 0


def test_distance_rejects_foreign_points():
    with pytest.raises(SpaceMismatch):
        distance(Euclidean(2), (0.0, 0.0), 1.0)
    with pytest.raises(SpaceMismatch):
        distance(FinSupportSeq(), SparseSeq(), 0.0)


@given(vec3, vec3, vec3)
def test_euclidean_metric_axioms(p, q, r):
    e = Euclidean(3)
    assert e.distance(p, q) == e.distance(q, p)
    assert e.distance(p, p) == 0
    assert e.distance(p, r) <= e.distance(p, q) + e.distance(q, r) + 1e-9


@given(sparse, sparse, sparse)
def test_sequence_metric_axioms(p, q, r):
    s = FinSupportSeq()
    assert s.distance(p, q) == pytest.approx(s.distance(q, p))
    assert s.distance(p, p) == 0
    assert s.distance(p, r) <= s.distance(p, q) + s.distance(q, r) + 1e-9


@given(sparse, sparse, st.floats(-3, 3, allow_nan=False))
def test_sparse_arithmetic(p, q, t):
    s = p + q
    for i in set(p.support) | set(q.support):
        assert s[i] == pytest.approx(p[i] + q[i])
    assert all(v != 0 for _, v in (t * p).items)
    assert list((p - p).items) == []


def test_sparse_canonical_form():
    a = SparseSeq([(3, 1.0), (1, 2.0), (3, -1.0)])
    assert a.items == ((1, 2.0),)
    assert a == SparseSeq.basis(1, 2.0)
    assert hash(a) == hash(SparseSeq({1: 2.0}))
    assert a[2] == 0
    with pytest.raises(ValueError):
        SparseSeq([(0, 1.0)])


def test_set_distance_examples():
    assert set_distance(interval(1, 2), 0.9) == pytest.approx(0.1)
    assert set_distance(EMPTY, 123.0) == math.inf
    assert set_distance(BoxUnion.intervals((-1, 0), (1, 2)), 0.5) == 0.5


@given(st.lists(st.tuples(reals, st.floats(0, 50)), min_size=1, max_size=4), reals, reals)
def test_set_distance_is_1_lipschitz(spans, p, q):
    s = BoxUnion.intervals(*((a, a + w) for a, w in spans))
    assert abs(s.distance(p) - s.distance(q)) <= abs(p - q) + 1e-9


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3), st.floats(0.1, 3)),
                min_size=1, max_size=3),
       st.tuples(st.floats(-8, 8), st.floats(-8, 8)))
def test_set_distance_2d_lipschitz_and_zero_inside(boxes, p):
    s = BoxUnion(tuple(Box((x, y), (x + w, y + h)) for x, y, w, h in boxes))
    d = s.distance(p)
    assert (d == 0) == s.contains(p)
    q = (p[0] + 0.3, p[1] - 0.4)
    assert abs(s.distance(q) - d) <= 0.5 + 1e-9


@given(st.tuples(st.floats(-3, 3), st.floats(0.1, 3), st.booleans(), st.booleans()),
       st.tuples(st.floats(-3, 3), st.floats(0.1, 3), st.booleans(), st.booleans()),
       st.lists(st.floats(-7, 7), min_size=1, max_size=40))
def test_box_difference_partitions(a, b, pts):
    A = Box((a[0],), (a[0] + a[1],), (a[2],), (a[3],))
    B = Box((b[0],), (b[0] + b[1],), (b[2],), (b[3],))
    parts = A.difference(B)
    probe = list(pts) + [A.lo[0], A.hi[0], B.lo[0], B.hi[0]]
    for x in probe:
        inside = sum(p.contains(x) for p in parts)
        assert inside <= 1
        assert inside == (A.contains(x) and not B.contains(x))


def test_box_notation_and_flags():
    b = Box((0,), (1,), (True,), (False,))
    assert str(b) == "[0,1)"
    assert b.contains(0) and not b.contains(1)
    assert not b.is_closed() and b.closure().is_closed()
    assert Box((1,), (1,), (True,), (False,)).is_empty()
    assert not Box((-math.inf,), (0,)).is_bounded()


def test_net_examples():
    basis = [SparseSeq.basis(i) for i in range(1, 51)]
    res = total_boundedness_probe(basis, 0.7)
    assert not res.found and len(res.witness) == 50
    assert total_boundedness_probe([0.0] * 20, 0.1).net == (0.0,)
    harmonic = [1 / k for k in range(1, 51)]
    assert total_boundedness_probe(harmonic, 0.1).found


@given(st.lists(reals, min_size=1, max_size=60), st.floats(0.01, 100))
def test_net_centers_cover_and_separate(points, eps):
    res = total_boundedness_probe(points, eps)
    for p in points:
        assert min(abs(p - c) for c in res.centers) <= eps
    cs = res.centers
    for i in range(len(cs)):
        for j in range(i):
            assert abs(cs[i] - cs[j]) > eps


def test_finite_support_subspace_membership():
    c00 = finite_support_subspace()
    assert not c00.closed and not c00.complete
    ys, acc = [], SparseSeq()
    for k in range(1, 200):
        acc = acc + SparseSeq.basis(k, 2.0 ** -k)
        ys.append(acc)
    assert c00.limit_in_space(ys[100:], 2.0 ** -25) is False
    const = [SparseSeq.basis(1)] * 50
    assert c00.limit_in_space(const, 2.0 ** -25) is True


def test_oracle_set_reports_inexact_distances():
    s = OracleSet(lambda p: (abs(p) - 0.1, abs(p) + 0.1), lambda p: p == 0)
    with pytest.raises(InexactDistance) as err:
        s.distance(1.0)
    assert err.value.width == pytest.approx(0.2)
    assert distance_bracket(s, 1.0).width == pytest.approx(0.2)


def test_probe_sequence_explicit():
    seq = ProbeSequence.explicit([1.0, 0.5, 0.25], 0.0, Euclidean(1))
    assert seq.points(3) == [1.0, 0.5, 0.25]
    assert seq.radii(3) == [1.0, 0.5, 0.25]
    assert seq.usable(10) == 3


@given(st.one_of(reals, vec3, sparse))
def test_point_json_round_trip(p):
    q = point_from_json(point_to_json(p))
    if isinstance(p, SparseSeq):
        assert q == SparseSeq([(i, float(v)) for i, v in p.items])
    else:
        assert q == p
