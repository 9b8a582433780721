"""Continuous approximation of simple and Baire-one functions.

Three constructions live here:

* :func:`continuous_stage` / :func:`continuous_sequence` blend the values of
  a simple function with distance functions to the stage sets,
  ``f_n = anchor + c * (y - anchor)`` with ``c = 1 - 4d/(d+e)`` on the guard
  region ``d < e/3`` and ``f_n = anchor`` elsewhere;
* :func:`diagonal_glue` glues a doubly indexed family f_{m,n} into
  h_n = g_{n,n}, moving by at most 2^(1-m) per level;
* :func:`approximate_pipeline` chains simple approximation, blending and
  gluing for usco-bounded Baire-one functions into R^d.
"""

from __future__ import annotations

import dataclasses
import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .metric import Box, Euclidean, Space, point_to_json
from .setvalued import (
    PreconditionError,
    ProbePlan,
    Verdict,
    check_sequence_usco_bounded,
    check_usco_bounded,
)
from .simplefn import BaireOneTarget, SimpleFunction, simple_from_baire_one

__all__ = [
    "LocatorError",
    "GluingError",
    "BlendGeometry",
    "blend_geometry",
    "continuous_stage",
    "continuous_sequence",
    "FunctionSequence",
    "GluingScheme",
    "reindex",
    "DiagonalGlue",
    "diagonal_glue",
    "PipelineConfig",
    "approximate_pipeline",
    "default_plan",
    "convergence_rows",
    "bound_compliance",
]

MAX_EXPANSIONS = 200
FULL_SCAN_LIMIT = 64


class LocatorError(RuntimeError):
    """The expanding search could not settle the distance to other pieces."""


class GluingError(ValueError):
    """Level bounds do not satisfy sup|f_m - f| < 2^-m."""


@dataclass(frozen=True)
class BlendGeometry:
    """Where x sits relative to the n-th stages; ``index`` is None off every guard region."""

    n: int
    index: Optional[int]
    gamma: Any
    d: float
    e: float
    in_g: bool
    coefficient: Optional[float]


def _nearest_two(f: SimpleFunction, n: int, x):
    """(d1, i1), (d2, i2) for the two pieces with nearest n-th stage."""
    if f.finite and f.count <= FULL_SCAN_LIMIT:
        ds = sorted((f.piece(i).stage(n).distance(x), i) for i in range(f.count))
        ds = [t for t in ds if t[0] != math.inf]
        return ds[:2]
    ext = f.stage_extent(n)
    if ext is None:
        return []
    r = f.search_radius
    for _ in range(MAX_EXPANSIONS):
        region = Box.around(x, r)
        ids = f.locate_pieces(region, n)
        ds = sorted((f.piece(i).stage(n).distance(x), i) for i in ids)
        covered = all(a <= b for a, b in zip(region.lo, ext.lo)) and all(
            a >= b for a, b in zip(region.hi, ext.hi))
        if covered:
            return [t for t in ds if t[0] != math.inf][:2]
        # only pieces within distance r are guaranteed to be seen
        near = [t for t in ds if t[0] <= r]
        if len(near) >= 2:
            return near[:2]
        r *= 2
    if f.finite:
        ds = sorted((f.piece(i).stage(n).distance(x), i) for i in range(f.count))
        return [t for t in ds if t[0] != math.inf][:2]
    raise LocatorError(f"no second piece found around {x!r} at stage {n}")


def blend_geometry(f: SimpleFunction, n: int, x) -> BlendGeometry:
    """Guard-region geometry at ``x`` for stage ``n``.

    The only piece whose guard region can contain x is the one with the
    nearest stage; e is the distance to the union of all other stages.
    """
    near = _nearest_two(f, n, x)
    if not near:
        return BlendGeometry(n, None, None, math.inf, math.inf, False, None)
    d, i = near[0]
    e = near[1][0] if len(near) > 1 else math.inf
    gamma = f.piece(i).label
    if d == 0 or e == math.inf:
        return BlendGeometry(n, i, gamma, d, e, True, 1)
    # e - 3d > 0 is d < e/3; the numerator form keeps c in (0, 1] in floats
    num = e - 3 * d
    if num > 0:
        return BlendGeometry(n, i, gamma, d, e, True, num / (d + e))
    # outside every guard region; d and e still describe the nearest piece
    return BlendGeometry(n, None, None, d, e, False, None)


def _blend_value(f: SimpleFunction, geo: BlendGeometry):
    if geo.index is None or not geo.in_g:
        return f.anchor
    y = f.piece(geo.index).value
    c = geo.coefficient
    if c == 1:
        return y
    return f.y_space.lincomb((1 - c, f.anchor), (c, y))


def continuous_stage(f: SimpleFunction, n: int) -> Callable:
    """The n-th continuous function of the blended sequence."""
    if n < 1:
        raise ValueError("stages start at 1")

    def fn(x):
        return _blend_value(f, blend_geometry(f, n, x))

    fn.stage = n
    return fn


@dataclass(frozen=True, eq=False)
class FunctionSequence:
    """n -> continuous function, with optional limit, bounds and verdict."""

    stage_fn: Callable[[int], Callable]
    y_space: Space = field(default_factory=Euclidean)
    limit: Optional[Callable] = None
    error_bound: Optional[Callable[[int], float]] = None
    verdict: Optional[Verdict] = None
    label: str = "f_n"
    meta: dict = field(default_factory=dict)

    def __getitem__(self, n: int) -> Callable:
        return self.stage_fn(n)

    def __call__(self, n: int, x):
        return self.stage_fn(n)(x)

    def with_verdict(self, verdict: Verdict) -> "FunctionSequence":
        return dataclasses.replace(self, verdict=verdict)


def default_plan(f: SimpleFunction, **overrides) -> ProbePlan:
    targets = tuple(f.boundary[:20])
    kw = dict(targets=targets, domain=f.domain)
    kw.update(overrides)
    return ProbePlan(**kw)


def continuous_sequence(f: SimpleFunction, plan: ProbePlan = None, check: bool = True) -> FunctionSequence:
    """Blended continuous sequence converging pointwise to ``f``.

    Every x lies in some stage F^N, after which f_n(x) equals f(x) exactly.
    With ``check`` the family is probed and the verdict attached.
    """
    if f.verdict is None or not f.verdict.certified:
        warnings.warn(f"{f.label}: no Certified usco-bounded verdict; constructing anyway",
                      stacklevel=2)
    stage = functools.lru_cache(maxsize=None)(lambda n: continuous_stage(f, n))
    seq = FunctionSequence(
        stage_fn=stage,
        y_space=f.y_space,
        limit=f,
        label=f"{f.label}_n",
        meta={"simple": f, "geometry": lambda n, x: blend_geometry(f, n, x)},
    )
    if check:
        seq = seq.with_verdict(check_sequence_usco_bounded(
            stage, plan or default_plan(f), f.y_space, x_dim=_xdim(f)))
    return seq


def _xdim(f: SimpleFunction) -> int:
    return f.domain.dim if f.domain is not None else getattr(f.x_space, "dim", 1)


# ---------------------------------------------------------------------------
# diagonal gluing


@dataclass(frozen=True, eq=False)
class GluingScheme:
    """Levels m = 1, 2, ...: a sequence converging to f_m and a bound on sup|f_m - f|."""

    level_fn: Callable[[int], tuple]
    max_level: int
    y_space: Space = field(default_factory=Euclidean)

    def __post_init__(self):
        if self.max_level < 1:
            raise ValueError("need at least one level")
        object.__setattr__(self, "level_fn", functools.lru_cache(maxsize=None)(self.level_fn))

    @classmethod
    def from_levels(cls, levels: Sequence[tuple], y_space: Space = None) -> "GluingScheme":
        levels = tuple(levels)
        return cls(lambda m: levels[m - 1], len(levels), y_space or Euclidean(1))

    def level(self, m: int) -> tuple:
        if not 1 <= m <= self.max_level:
            raise IndexError(f"level {m} outside 1..{self.max_level}")
        return self.level_fn(m)


def reindex(scheme: GluingScheme) -> GluingScheme:
    """Subsequence m_1 < m_2 < ... with bound(m_k) < 2^-k."""
    chosen = []
    m = 1
    for k in range(1, scheme.max_level + 1):
        while m <= scheme.max_level and not scheme.level(m)[1] < 2.0 ** -k:
            m += 1
        if m > scheme.max_level:
            break
        chosen.append(m)
        m += 1
    if not chosen:
        raise GluingError("no level has bound below 1/2")
    picks = tuple(chosen)
    return GluingScheme(lambda k: scheme.level(picks[k - 1]), len(picks), scheme.y_space)


class DiagonalGlue:
    """h_n = g_{n,n}: level by level, move toward f_{m+1,n} by at most 2^(1-m).

    Levels past ``scheme.max_level`` are not available; there h_n = g_{L,n}
    with L the last level.
    """

    def __init__(self, scheme: GluingScheme):
        self.scheme = scheme
        self.y_space = scheme.y_space

    def _level(self, m: int):
        seq, bound = self.scheme.level(m)
        if not bound < 2.0 ** -m:
            raise GluingError(f"level {m}: bound {bound} is not below 2^-{m}")
        return seq

    def chain(self, n: int, x) -> list:
        """[g_{1,n}(x), ..., g_{min(n,L),n}(x)]."""
        ys = self.y_space
        top = min(n, self.scheme.max_level)
        memo = {}

        def f_at(m):
            seq = self._level(m)
            key = id(seq)
            if key not in memo:
                memo[key] = seq(n, x)
            return memo[key]

        g = f_at(1)
        out = [g]
        for m in range(1, top):
            target = f_at(m + 1)
            diff = ys.lincomb((1, target), (-1, g))
            size = ys.norm(diff)
            thr = 2.0 ** (-m + 1)
            if size <= thr:
                g = target
            else:
                g = _clamped_move(ys, g, diff, size, thr)
            out.append(g)
        return out

    def __call__(self, n: int, x):
        return self.chain(n, x)[-1]

    def sequence(self, limit: Callable = None) -> FunctionSequence:
        stage = functools.lru_cache(maxsize=None)(lambda n: (lambda x: self(n, x)))
        return FunctionSequence(stage, self.y_space, limit=limit, label="h_n",
                                meta={"glue": self})


def _clamped_move(ys: Space, g, diff, size, thr):
    """g + thr * diff/size, nudged so the step never exceeds thr in floats."""
    t = thr / size
    shrink = 2.0 ** -50
    for _ in range(64):
        g_new = ys.lincomb((1, g), (t, diff))
        step = ys.distance(g_new, g)
        if step <= thr:
            return g_new
        # rounding in g + t*diff can be large relative to a short step
        t *= min(thr / step, 1.0) * (1 - shrink)
        shrink *= 2
    raise ArithmeticError("could not keep the gluing step within its bound")


def diagonal_glue(scheme: GluingScheme, reindex_first: bool = True, limit: Callable = None) -> FunctionSequence:
    """Glue a scheme into the diagonal sequence h_n = g_{n,n}."""
    if reindex_first:
        scheme = reindex(scheme)
    glue = DiagonalGlue(scheme)
    for m in range(1, scheme.max_level + 1):
        glue._level(m)
    return glue.sequence(limit)


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class PipelineConfig:
    horizon: int = 64
    max_level: Optional[int] = None
    plan: Optional[ProbePlan] = None
    check_levels: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")


def approximate_pipeline(target: BaireOneTarget, config: PipelineConfig = None) -> FunctionSequence:
    """Usco-bounded continuous sequence converging pointwise to ``target``.

    Level m is the blended sequence of a simple function within 2^-m of the
    target; the levels are glued diagonally. Requires a closed convex
    Euclidean range and a Certified usco-bounded verdict for the target.
    """
    config = config or PipelineConfig()
    ys = target.y_space
    if not ys.finite_dimensional or not ys.closed or not getattr(ys, "convex", True):
        raise PreconditionError(f"pipeline needs a closed convex subset of R^d, got {ys}")
    plan = config.plan or ProbePlan(targets=tuple(target.boundary[:20]), domain=target.region)
    verdict = target.verdict
    if verdict is None:
        verdict = check_usco_bounded(target.func, plan, ys)
    if not verdict.certified:
        raise PreconditionError(f"{target.label} is not certified usco-bounded "
                                f"({verdict.outcome.value})", verdict)
    target = dataclasses.replace(target, verdict=verdict)
    max_level = config.max_level or config.horizon
    # an already simple target is its own approximant at every level
    fixed = target.simple is not None

    def expand(s: SimpleFunction) -> FunctionSequence:
        return continuous_sequence(s, default_plan(s) if config.check_levels else None,
                                   check=config.check_levels)

    shared = []

    def level(m: int):
        if fixed and shared:
            return shared[0]
        s = simple_from_baire_one(target, 2.0 ** -m)
        err = s.approx_error if s.approx_error is not None else 2.0 ** -m
        out = (expand(s), err)
        if fixed:
            shared.append(out)
        return out

    scheme = GluingScheme(level, max_level, ys)
    h = diagonal_glue(scheme, reindex_first=True, limit=target.func)
    glue = h.meta["glue"]

    def geometry(n, x):
        seq, _ = glue.scheme.level(min(n, glue.scheme.max_level))
        geo = seq.meta.get("geometry")
        return geo(n, x) if geo else None

    h = dataclasses.replace(h, meta={**h.meta, "geometry": geometry, "target": target})
    seq_plan = dataclasses.replace(plan, horizon=config.horizon)
    return h.with_verdict(check_sequence_usco_bounded(h.stage_fn, seq_plan, ys))


# ---------------------------------------------------------------------------
# diagnostics


def convergence_rows(seq: FunctionSequence, grid: Sequence, horizon: int,
                     limit: Callable = None) -> list[dict]:
    """One row per (n, x): error to the limit and blend geometry."""
    limit = limit or seq.limit
    ys = seq.y_space
    geo_fn = seq.meta.get("geometry")
    rows = []
    for n in range(1, horizon + 1):
        fn = seq[n]
        for x in grid:
            geo = geo_fn(n, x) if geo_fn else None
            rows.append({
                "n": n,
                "x": x,
                "error": float(ys.distance(fn(x), limit(x))),
                "gamma": "" if geo is None or geo.gamma is None else geo.gamma,
                "inG": bool(geo.in_g) if geo is not None else "",
                "coefficient": "" if geo is None or geo.coefficient is None else float(geo.coefficient),
            })
    return rows


def bound_compliance(h: FunctionSequence, grid: Sequence, horizon: int, m_max: int) -> dict:
    """Check sup-estimate |h_n(x) - f(x)| < 2^(4-m) for n from n0(x, m) to the horizon.

    n0(x, m) is the first n >= m after which, up to the horizon, the chain
    keeps g_{m,n}(x) = f_{m,n}(x) and |f_{m,n}(x) - f_m(x)| < 2^(3-m). Pairs
    (x, m) whose n0 lies beyond the horizon are counted as unreached.
    """
    glue: DiagonalGlue = h.meta["glue"]
    f = h.limit
    ys = h.y_space
    scheme = glue.scheme
    checked = passed = unreached = 0
    failures = []
    for x in grid:
        chains = {n: glue.chain(n, x) for n in range(1, horizon + 1)}
        fx = f(x)
        h_err = {n: float(ys.distance(chains[n][-1], fx)) for n in chains}
        for m in range(1, min(m_max, scheme.max_level) + 1):
            seq_m, _ = scheme.level(m)
            f_m = seq_m.limit
            fmx = f_m(x) if f_m is not None else fx
            good = [
                n >= m
                and chains[n][m - 1] == seq_m(n, x)
                and ys.distance(seq_m(n, x), fmx) < 2.0 ** (3 - m)
                for n in range(1, horizon + 1)
            ]
            n0 = None
            for n in range(horizon, 0, -1):
                if not good[n - 1]:
                    break
                n0 = n
            if n0 is None:
                unreached += 1
                continue
            checked += 1
            bad = [n for n in range(n0, horizon + 1) if not h_err[n] < 2.0 ** (4 - m)]
            if bad:
                failures.append({"x": point_to_json(x), "m": m, "n0": n0, "n": bad[0]})
            else:
                passed += 1
    return {
        "checked": checked,
        "passed": passed,
        "unreached": unreached,
        "compliance": passed / checked if checked else 1.0,
        "failures": failures[:20],
    }
