import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uscobound import textformat
from uscobound.fixtures import cauchy_point, get_fixture, harmonic_partition, step_function
from uscobound.metric import Box, BoxUnion, Euclidean, SparseSeq, finite_support_subspace
from uscobound.setvalued import Outcome, ProbePlan, Verdict, check_usco_bounded
from uscobound.simplefn import (
    BaireOneTarget,
    NoApproximationScheme,
    PartitionError,
    Piece,
    SimpleFunction,
    active_pieces,
    box_stage,
    eval_simple,
    refine_cover,
    simple_from_baire_one,
    simple_from_continuous,
)

GRID = [float(v) for v in np.linspace(-2, 2, 10_001)]


def all_simple_fixtures():
    out = [step_function(), get_fixture("infdim").member().func]
    nc = get_fixture("noncomplete")
    out += [nc.member(f"f{n}").func for n in (1, 5, 20)] + [nc.member("f").func]
    return out


def test_eval_examples():
    f = step_function()
    assert eval_simple(f, -0.5) == 0
    assert eval_simple(f, 0.5) == 1
    assert eval_simple(f, 0) == 0
    nc = get_fixture("noncomplete").member("f3").func
    assert nc(0.4) == cauchy_point(2)
    assert nc(0.1) == cauchy_point(3)


def test_active_pieces_examples():
    f = step_function()
    assert f.piece(1).stage(1) == BoxUnion.intervals((1, 1))
    assert [p.label for p in active_pieces(f, Box.closed(-1.0, 1.0), 1)] == ["A", "B"]
    assert [p.label for p in active_pieces(f, Box.closed(5.0, 6.0), 1)] == []
    assert [p.label for p in active_pieces(f, Box.closed(5.0, 6.0), 6)] == ["B"]
    infdim = get_fixture("infdim").member().func
    labels = {p.label for p in active_pieces(infdim, Box.closed(0.4, 0.6), 50)}
    assert labels == {1, 2}
    with pytest.raises(ValueError):
        active_pieces(f, Box((0.0,), (math.inf,)), 1)


def test_box_stage_shapes():
    right = Box((Fraction(0),), (math.inf,), (False,), (False,))
    assert box_stage(right, 2) == Box((Fraction(1, 2),), (Fraction(2),))
    left = Box((-math.inf,), (0,), (False,), (True,))
    assert box_stage(left, 3) == Box((-3,), (0,))
    half_open = Box((0.0,), (1.0,), (True,), (False,))
    assert box_stage(half_open, 3) == Box((0.0,), (0.75,))


@pytest.mark.parametrize("f", all_simple_fixtures(), ids=lambda f: f.label)
def test_partition_totality_and_disjointness(f):
    for x in GRID:
        hits = [i for i in f.candidates(x) if f.piece(i).member(x)]
        assert len(hits) == 1
        if f.finite:
            assert sum(p.member(x) for p in f.pieces) == 1


@pytest.mark.parametrize("f", all_simple_fixtures(), ids=lambda f: f.label)
def test_stage_monotonicity_and_containment(f):
    rng = np.random.default_rng(1)
    for x in rng.uniform(-3, 3, 400):
        i = f.piece_index(x)
        for j in set(f.candidates(x)) | {0, i}:
            prev = False
            for n in range(1, 40):
                now = f.piece(j).stage(n).contains(x)
                assert now or not prev
                prev = now
            if prev:
                assert j == i


@pytest.mark.parametrize("f", all_simple_fixtures(), ids=lambda f: f.label)
def test_stages_are_discrete(f):
    # around each sampled point a small box meets at most one n-th stage
    rng = np.random.default_rng(2)
    for x in rng.uniform(-2, 2, 200):
        for n in (1, 4, 16):
            r = 1.0
            while len(f.locate_pieces(Box.around(float(x), r), n)) > 1 and r > 1e-9:
                r /= 2
            assert len(f.locate_pieces(Box.around(float(x), r), n)) <= 1


def test_fixtures_match_their_formulas():
    rng = np.random.default_rng(3)
    infdim = get_fixture("infdim").member().func
    nc = get_fixture("noncomplete")
    f7, flim = nc.member("f7").func, nc.member("f").func
    for x in rng.uniform(-1.5, 1.5, 1000):
        x = float(x)
        outside = x <= 0 or x > 1
        k = None if outside else next(k for k in range(1, 10**6) if 1 / (k + 1) < x <= 1 / k)
        assert infdim(x) == (SparseSeq() if outside else SparseSeq.basis(k))
        assert flim(x) == (SparseSeq() if outside else cauchy_point(k))
        want7 = SparseSeq() if outside else cauchy_point(min(k, 7))
        assert f7(x) == want7


def test_partition_errors_are_reported():
    gap = SimpleFunction(pieces=(Piece.from_boxes(0, 0.0, [Box.closed(0.0, 1.0)]),))
    with pytest.raises(PartitionError):
        gap(2.0)
    with pytest.raises(ValueError):
        SimpleFunction(pieces=(Piece.from_boxes(0, SparseSeq(), [Box.closed(0.0, 1.0)]),))


def test_refine_cover_is_a_disjoint_cover():
    cover = [Box((a - 0.1,), (a + 0.35,), (False,), (False,)) for a in np.arange(0, 1, 0.25)]
    region = Box.closed(0.0, 1.0)
    cells = refine_cover(cover, region)
    for x in np.linspace(0, 1, 1001):
        assert sum(b.contains(float(x)) for c in cells for b in c) == 1


def test_simple_from_continuous_examples():
    s = simple_from_continuous(math.sin, 0.1, Box.closed(0.0, 10.0), lipschitz=1)
    assert s.count <= 200
    fine = np.linspace(0, 10, 10 * 10_000)
    assert max(abs(s(float(x)) - math.sin(x)) for x in fine[::7]) < 0.1
    const = simple_from_continuous(lambda x: 2.0, 0.1, Box.closed(0.0, 1.0), lipschitz=0)
    assert const.count == 1 and all(const(float(x)) == 2.0 for x in np.linspace(0, 1, 50))
    ident = simple_from_continuous(lambda x: x, 0.25, Box.closed(0.0, 1.0), lipschitz=1)
    assert ident.count <= 5
    assert max(abs(ident(float(x)) - x) for x in np.linspace(0, 1, 1001)) < 0.25


def test_simple_from_continuous_with_modulus_and_2d():
    s = simple_from_continuous(math.sqrt, 0.2, Box.closed(0.0, 1.0), modulus=math.sqrt)
    assert max(abs(s(float(x)) - math.sqrt(x)) for x in np.linspace(0, 1, 2001)) < 0.2
    g = lambda p: p[0] * p[1]
    s2 = simple_from_continuous(g, 0.3, Box.closed((0.0, 0.0), (1.0, 1.0)), lipschitz=math.sqrt(2),
                                y_space=Euclidean(1))
    pts = [(float(a), float(b)) for a in np.linspace(0, 1, 41) for b in np.linspace(0, 1, 41)]
    assert max(abs(s2(p) - g(p)) for p in pts) < 0.3


def test_simple_from_continuous_is_usco_bounded():
    s = simple_from_continuous(math.cos, 0.05, Box.closed(-3.0, 3.0), lipschitz=1)
    assert s.verdict.certified
    plan = ProbePlan(targets=s.boundary[:20], domain=s.domain)
    assert check_usco_bounded(s, plan).certified


def test_baire_one_routes():
    nc = get_fixture("noncomplete").member("f").func
    assert simple_from_baire_one(nc, 0.1) is nc
    sin_t = BaireOneTarget(math.sin, lipschitz=1, region=Box.closed(0.0, 10.0))
    s = simple_from_baire_one(sin_t, 0.1)
    assert s.approx_error < 0.1
    with pytest.raises(NoApproximationScheme):
        simple_from_baire_one(BaireOneTarget(lambda x: float(x > 0)), 0.1)


def test_baire_one_transfer_adds_epsilon():
    cert = Verdict(Outcome.CERTIFIED, {"bound": 1.0}, None, {})
    t = BaireOneTarget(math.sin, lipschitz=1, region=Box.closed(0.0, 10.0), verdict=cert)
    assert simple_from_baire_one(t, 0.5).verdict.bound == 1.5


def test_scheme_route_is_verified():
    step = step_function()
    t = BaireOneTarget(lambda x: 0 if x <= 0 else 1, scheme=lambda eps: step,
                       region=Box.closed(-1.0, 1.0))
    assert simple_from_baire_one(t, 0.1).approx_error == 0
    bad = BaireOneTarget(lambda x: 5.0, scheme=lambda eps: step, region=Box.closed(-1.0, 1.0))
    with pytest.raises(ValueError):
        simple_from_baire_one(bad, 0.1)


# text format


def test_text_round_trip_of_fixtures():
    for f in all_simple_fixtures():
        kw = {} if f.finite else {"max_pieces": 12}
        text = textformat.dumps(f, horizon=6, **kw)
        g = textformat.loads(text)
        assert textformat.dumps(g, horizon=6) == text.replace("truncated 12\n", "")
        for x in np.linspace(-2, 2, 401):
            x = float(x)
            if f.finite or x <= 0 or x > 1 / 12:
                assert g(x) == f(x)
        for i in range(g.count):
            for n in range(1, 7):
                assert g.piece(i).stage(n) == f.piece(i).stage(n)
            assert g.piece(i).stage(50) == f.piece(i).stage(6)


@given(st.lists(st.fractions(-5, 5, max_denominator=20), min_size=1, max_size=6, unique=True),
       st.lists(st.integers(-9, 9), min_size=7, max_size=7))
def test_text_round_trip_random_partitions(cuts, values):
    cuts = sorted(cuts)
    edges = [-math.inf] + cuts + [math.inf]
    pieces = []
    for k, (a, b) in enumerate(zip(edges, edges[1:])):
        box = Box((a,), (b,), (False,), (math.isfinite(b),))
        pieces.append(Piece.from_boxes(k, values[k], [box]))
    f = SimpleFunction(pieces=tuple(pieces), boundary=tuple(cuts))
    text = textformat.dumps(f, horizon=4)
    assert textformat.dumps(textformat.loads(text), horizon=4) == text
    g = textformat.loads(text)
    for x in list(cuts) + [c + Fraction(1, 100) for c in cuts]:
        assert g(x) == f(x)


def test_text_format_errors():
    with pytest.raises(textformat.FormatError):
        textformat.loads("not a simple function\n")
    with pytest.raises(textformat.FormatError):
        textformat.dumps(get_fixture("infdim").member().func)
    text = textformat.dumps(step_function(), horizon=2).replace("stage 2 [-2/1,0/1]\n", "")
    with pytest.raises(textformat.FormatError):
        textformat.loads(text)


def test_sparse_values_survive_the_text_format():
    f = harmonic_partition(cauchy_point, SparseSeq(), finite_support_subspace(), "g", last=4)
    g = textformat.loads(textformat.dumps(f, horizon=3))
    assert g(0.1) == cauchy_point(4)
    assert g.y_space.name == "c00"
