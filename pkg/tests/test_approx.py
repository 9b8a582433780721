import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uscobound.approx import (
    DiagonalGlue,
    FunctionSequence,
    GluingError,
    GluingScheme,
    PipelineConfig,
    approximate_pipeline,
    blend_geometry,
    bound_compliance,
    continuous_sequence,
    continuous_stage,
    convergence_rows,
    diagonal_glue,
    reindex,
)
from uscobound.cli import _noncomplete_scheme
from uscobound.fixtures import get_fixture, step_function
from uscobound.metric import Box, Euclidean
from uscobound.setvalued import PreconditionError
from uscobound.simplefn import BaireOneTarget, Piece, SimpleFunction, simple_from_continuous


def const_seq(c):
    return FunctionSequence(lambda n: (lambda x: c), limit=lambda x: c)


def test_blend_geometry_exact_example():
    geo = blend_geometry(step_function(), 1, Fraction(9, 10))
    assert (geo.d, geo.e, geo.coefficient) == (Fraction(1, 10), Fraction(9, 10), Fraction(3, 5))
    assert geo.gamma == "B" and geo.in_g


def test_blend_geometry_outside_and_inside():
    f = step_function()
    mid = blend_geometry(f, 1, 0.5)
    assert not mid.in_g and mid.index is None and mid.coefficient is None
    assert blend_geometry(f, 1, 1.0).coefficient == 1
    assert blend_geometry(f, 4, -3.0).gamma == "A"
    far = blend_geometry(f, 1, -3.0)
    assert (far.d, far.e, far.in_g) == (2.0, 4.0, False)


def test_continuous_stage_examples():
    f1 = continuous_stage(step_function(), 1)
    assert f1(0.9) == pytest.approx(0.6)
    assert f1(0.5) == 0
    assert f1(0.0) == 0
    assert all(continuous_stage(step_function(), n)(0.9) == 1 for n in range(2, 10))
    with pytest.raises(ValueError):
        continuous_stage(step_function(), 0)


def test_single_piece_gives_a_constant():
    f = SimpleFunction(pieces=(Piece.from_boxes(0, 7.0, [Box((-math.inf,), (math.inf,))]),))
    for n in (1, 5):
        assert all(continuous_stage(f, n)(float(x)) == 7.0 for x in np.linspace(-50, 50, 101))


@given(st.sampled_from([1, 2, 3, 8, 40]), st.floats(-3, 3))
def test_coefficient_formula(n, x):
    geo = blend_geometry(step_function(), n, x)
    if geo.in_g and geo.d > 0 and geo.e != math.inf:
        assert 0 < geo.coefficient <= 1
        assert geo.coefficient == pytest.approx(1 - 4 * geo.d / (geo.d + geo.e), abs=1e-12)
    if not geo.in_g:
        assert geo.e <= 3 * geo.d


@pytest.mark.parametrize("n", [1, 2, 5, 20])
def test_stage_is_lipschitz(n):
    # a gap of width 1/n between the step stages bounds the slope by 4n
    fn = continuous_stage(step_function(), n)
    xs = np.linspace(-2, 2, 4001)
    ys = np.array([fn(float(x)) for x in xs])
    slopes = np.abs(np.diff(ys)) / np.diff(xs)
    assert slopes.max() <= 4 * n * (1 + 1e-9)


def test_blended_values_stay_in_range():
    nc = get_fixture("noncomplete").member("f5").func
    seq = continuous_sequence(nc, check=False)
    for n in (1, 3, 9):
        for x in np.linspace(-0.5, 1.5, 301):
            y = seq(n, float(x))
            assert nc.y_space.contains(y)
            assert all(0 <= v <= 0.5 for _, v in y.items)


def test_continuous_sequence_converges_exactly():
    f = step_function()
    seq = continuous_sequence(f, check=False)
    for x in np.linspace(-2, 2, 201):
        x = float(x)
        n0 = next(n for n in range(1, 400) if f.piece(f.piece_index(x)).stage(n).contains(x))
        assert all(seq(n, x) == f(x) for n in range(n0, n0 + 10))


def test_continuous_sequence_verdict():
    assert continuous_sequence(step_function()).verdict.certified


# gluing


def test_constant_scheme():
    scheme = GluingScheme(lambda m: (const_seq(2.0 ** (-m - 1)), 2.0 ** (-m - 1)), 30)
    h = diagonal_glue(scheme, limit=lambda x: 0.0)
    assert [h(n, 0.3) for n in (1, 2, 5)] == [0.25, 0.125, 2.0 ** -6]


def test_clamped_step():
    scheme = GluingScheme.from_levels([(const_seq(0.0), 0.1), (const_seq(5.0), 0.1)])
    glue = DiagonalGlue(scheme)
    assert glue(1, 0.0) == 0.0
    assert glue(2, 0.0) == 1.0
    assert glue(9, 0.0) == 1.0


def test_gluing_rejects_large_bounds():
    scheme = GluingScheme.from_levels([(const_seq(0.0), 0.4), (const_seq(0.0), 0.3)])
    with pytest.raises(GluingError):
        diagonal_glue(scheme, reindex_first=False)
    with pytest.raises(GluingError):
        reindex(GluingScheme.from_levels([(const_seq(0.0), 0.9)]))


def test_reindex_picks_increasing_levels():
    bounds = [0.9, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01]
    scheme = GluingScheme.from_levels([(const_seq(b), b) for b in bounds])
    r = reindex(scheme)
    picked = [r.level(k)[1] for k in range(1, r.max_level + 1)]
    assert picked == [0.4, 0.2, 0.1, 0.05, 0.01]
    assert all(b < 2.0 ** -k for k, b in enumerate(picked, 1))


def test_glue_steps_stay_within_threshold():
    fx = get_fixture("noncomplete")
    h = diagonal_glue(_noncomplete_scheme(fx, 20), limit=fx.member("f").func)
    glue, ys = h.meta["glue"], h.y_space
    for x in np.linspace(-0.2, 1.2, 57):
        for n in (1, 4, 12, 30):
            chain = glue.chain(n, float(x))
            for m in range(1, len(chain)):
                assert ys.distance(chain[m], chain[m - 1]) <= 2.0 ** (-m + 1)


def test_noncomplete_glue_compliance():
    fx = get_fixture("noncomplete")
    h = diagonal_glue(_noncomplete_scheme(fx, 20), limit=fx.member("f").func)
    grid = [float(v) for v in np.linspace(-0.5, 1.5, 81)]
    report = bound_compliance(h, grid, 40, 6)
    assert report["failures"] == [] and report["checked"] > 0


# pipeline


def test_pipeline_refuses_reciprocal():
    target = BaireOneTarget(lambda x: 0.0 if x == 0 else 1 / x, boundary=(0.0,), label="recip")
    with pytest.raises(PreconditionError) as err:
        approximate_pipeline(target, PipelineConfig(horizon=8))
    assert err.value.verdict.falsified


def test_pipeline_on_sin_converges():
    target = BaireOneTarget(math.sin, lipschitz=1, region=Box.closed(0.0, 10.0),
                            boundary=(0.0, 5.0), label="sin")
    h = approximate_pipeline(target, PipelineConfig(horizon=8))
    assert h.verdict.certified
    for x in np.linspace(0.5, 9.5, 13):
        # levels stop at the horizon, so the tail sits within 2^-8 of sin
        errs = [abs(h(n, float(x)) - math.sin(x)) for n in (64, 128)]
        assert max(errs) < 2.0 ** -7


def test_pipeline_on_step_is_exact_eventually():
    f = step_function()
    target = BaireOneTarget(f, simple=f, boundary=(0,), label="step")
    h = approximate_pipeline(target, PipelineConfig(horizon=16))
    rows = convergence_rows(h, [-1.0, 0.0, 0.25, 1.5], 16)
    assert {r["error"] for r in rows if r["n"] >= 8} == {0.0}
    assert set(rows[0]) == {"n", "x", "error", "gamma", "inG", "coefficient"}


def test_pipeline_needs_closed_euclidean_range():
    nc = get_fixture("noncomplete")
    target = BaireOneTarget(nc.member("f3").func, y_space=nc.y_space, label="f3")
    with pytest.raises(PreconditionError):
        approximate_pipeline(target)


def test_simple_approximation_then_blend():
    s = simple_from_continuous(math.cos, 0.1, Box.closed(0.0, 3.0), lipschitz=1)
    seq = continuous_sequence(s, check=False)
    for x in np.linspace(0.1, 2.9, 29):
        assert seq(200, float(x)) == s(float(x))
