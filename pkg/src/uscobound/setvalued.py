"""Set-valued maps, the graph-closure hull and sequential usco checkers.

Whether a sequence has a convergent subsequence cannot be decided from a
finite sample, so every checker returns a three-valued :class:`Verdict`
and records the probe plan it used.

Conventions (also written into every certificate):

* a sample with more than half of its points pairwise farther than eps
  apart is evidence of *no* convergent subsequence at resolution eps;
* norms that exceed ``growth_cap``, or grow like ``r**-growth_exponent``
  as the probe radius ``r`` halves, count as unbounded;
* a bounded sample living in a fixed finite-dimensional subspace is
  relatively compact (closed bounded sets in R^d are compact);
* in a range that is not closed, a value repeated along the tail gives a
  constant subsequence, otherwise the tail must settle within
  ``cluster_tol`` and its limit must pass the membership test of Y.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .metric import (
    Box,
    BoxUnion,
    ClosedSet,
    Euclidean,
    FinitePointSet,
    ProbeSequence,
    Space,
    SparseSeq,
    _as_coords,
    point_from_json,
    point_to_json,
    space_of,
    total_boundedness_probe,
)

__all__ = [
    "Outcome",
    "Witness",
    "Verdict",
    "ProbePlan",
    "ProbeError",
    "PreconditionError",
    "SetValuedMap",
    "sample_graph",
    "graph_closure_hull",
    "check_usco",
    "check_usco_bounded",
    "check_sequence_usco_bounded",
    "transfer_bounded_perturbation",
    "replay_witness",
    "HULL_SLACK",
]

CONVENTION = (
    "majority rule: >half of sample pairwise eps-separated => no convergent "
    "subsequence at eps; bounded samples in finite-dimensional spans are "
    "relatively compact"
)

# relative slack on the hull neighbourhood radius, keeps grid neighbours
# at distance "exactly" one resolution unit inside despite float rounding
HULL_SLACK = 1e-9
# growth test: the later log-log slope must keep this share of the earlier one
SLOPE_KEEP = 0.85


class Outcome(str, Enum):
    CERTIFIED = "Certified"
    FALSIFIED = "Falsified"
    INCONCLUSIVE = "Inconclusive"


class ProbeError(ValueError):
    """A probe sequence leaves the domain or cannot be evaluated."""


class PreconditionError(ValueError):
    """A construction was asked to run on inputs violating its hypotheses."""

    def __init__(self, message, verdict: "Verdict" = None):
        super().__init__(message)
        self.verdict = verdict


@dataclass(frozen=True)
class Witness:
    points: tuple
    values: tuple
    limit: Any
    reason: str
    indices: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {
            "sequence": [point_to_json(p) for p in self.points],
            "values": [point_to_json(v) for v in self.values],
            "limit": point_to_json(self.limit),
            "reason": self.reason,
        }
        if self.indices is not None:
            out["indices"] = list(self.indices)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Witness":
        idx = obj.get("indices")
        return cls(
            points=tuple(point_from_json(p) for p in obj["sequence"]),
            values=tuple(point_from_json(v) for v in obj["values"]),
            limit=point_from_json(obj["limit"]),
            reason=obj.get("reason", ""),
            indices=tuple(idx) if idx is not None else None,
        )


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    certificate: Optional[dict] = None
    witness: Optional[Witness] = None
    resolution: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "outcome", Outcome(self.outcome))
        if self.outcome is Outcome.FALSIFIED and self.witness is None:
            raise ValueError("a Falsified verdict needs a witness")
        if self.outcome is Outcome.CERTIFIED and self.certificate is None:
            raise ValueError("a Certified verdict needs a certificate")

    @property
    def certified(self) -> bool:
        return self.outcome is Outcome.CERTIFIED

    @property
    def falsified(self) -> bool:
        return self.outcome is Outcome.FALSIFIED

    @property
    def bound(self) -> Optional[float]:
        return (self.certificate or {}).get("bound")

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "certificate": self.certificate,
            "witness": self.witness.to_json() if self.witness else None,
            "resolution": self.resolution,
        }

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    @classmethod
    def from_json(cls, obj: dict) -> "Verdict":
        w = obj.get("witness")
        return cls(
            outcome=Outcome(obj["outcome"]),
            certificate=obj.get("certificate"),
            witness=Witness.from_json(w) if w else None,
            resolution=obj.get("resolution") or {},
        )


def _default_schedule():
    return tuple(2.0 ** -k for k in range(11))


@dataclass(frozen=True)
class ProbePlan:
    """Parameters of a probing run.

    ``targets`` are accumulation points to approach (partition boundaries
    are the interesting ones); when empty, targets are drawn uniformly from
    ``domain``. The first probe toward each target is harmonic (radius 1/j),
    the others halve their radius at every step.
    """

    n_sequences: int = 20
    prefix: int = 200
    eps_schedule: tuple = field(default_factory=_default_schedule)
    targets: tuple = ()
    domain: Optional[Box] = None
    seed: int = 0
    scale: float = 1.0
    horizon: int = 64
    growth_cap: float = 1e6
    growth_exponent: float = 0.5
    cluster_tol: float = 2.0 ** -25
    grid_resolution: float = 1e-3

    def __post_init__(self):
        if self.n_sequences < 1 or self.prefix < 4 or self.horizon < 1:
            raise ValueError("probe counts must be positive (prefix >= 4)")
        if not self.eps_schedule or any(e <= 0 for e in self.eps_schedule):
            raise ValueError("eps schedule must be nonempty and positive")
        if any(a <= b for a, b in zip(self.eps_schedule, self.eps_schedule[1:])):
            raise ValueError("eps schedule must be strictly decreasing")
        if self.scale <= 0 or self.grid_resolution <= 0:
            raise ValueError("scale and resolution must be positive")
        object.__setattr__(self, "eps_schedule", tuple(self.eps_schedule))
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def final_eps(self) -> float:
        return self.eps_schedule[-1]

    def describe(self) -> dict:
        return {
            "n_sequences": self.n_sequences,
            "prefix": self.prefix,
            "eps_schedule": list(self.eps_schedule),
            "targets": [point_to_json(t) for t in self.targets],
            "seed": self.seed,
            "horizon": self.horizon,
            "growth_cap": self.growth_cap,
            "growth_exponent": self.growth_exponent,
            "cluster_tol": self.cluster_tol,
            "convention": CONVENTION,
        }

    def sequences(self, dim: int = 1, family: bool = False) -> list[ProbeSequence]:
        """Deterministic probe sequences for a domain of dimension ``dim``.

        With ``family=True`` each probe also carries an index sequence:
        even probes use increasing indices, odd probes a constant index.
        """
        rng = np.random.default_rng(self.seed)
        targets = list(self.targets)
        if not targets:
            if self.domain is None or not self.domain.is_bounded():
                raise ProbeError("no targets and no bounded domain to draw them from")
            lo, hi = np.array(self.domain.lo, float), np.array(self.domain.hi, float)
            for _ in range(self.n_sequences):
                t = tuple(float(v) for v in lo + (hi - lo) * rng.random(dim))
                targets.append(t[0] if dim == 1 else t)
        out = []
        for i in range(self.n_sequences):
            t = targets[i % len(targets)]
            first = i < len(self.targets)
            if first:
                u = np.zeros(dim)
                u[0] = 1.0
                r0 = self.scale
            else:
                u = rng.normal(size=dim)
                u /= np.linalg.norm(u)
                r0 = self.scale * float(rng.uniform(0.05, 1.0))
            u, r0 = self._fit(t, u, r0, dim)
            offset = int(rng.integers(0, 4))
            const = int(rng.integers(1, self.horizon + 1))
            seq = _ray_probe(t, u, r0, harmonic=first, dim=dim, label=f"probe{i}")
            if family:
                if i % 2 == 0:
                    idx = lambda j, o=offset: j + o
                else:
                    idx = lambda j, c=const: c
                seq = dataclasses.replace(seq, indices=idx)
            out.append(seq)
        return out

    def _fit(self, t, u, r0, dim):
        if self.domain is None:
            return u, r0
        c = np.array(_as_coords(t), float)
        if not self.domain.closure().contains(t if dim > 1 else float(c[0])):
            raise ProbeError(f"target {t!r} lies outside the domain {self.domain}")
        for direction in (u, -u):
            room = _room(c, direction, self.domain)
            if room > 0:
                end = c + r0 * direction
                end = float(end[0]) if dim == 1 else tuple(float(v) for v in end)
                return direction, r0 if self.domain.contains(end) else 0.9 * room
        raise ProbeError(f"no room to approach {t!r} inside {self.domain}")


def _room(c, u, box: Box) -> float:
    room = math.inf
    for k in range(len(c)):
        if u[k] > 0:
            room = min(room, (box.hi[k] - c[k]) / u[k])
        elif u[k] < 0:
            room = min(room, (box.lo[k] - c[k]) / u[k])
    return room


def _ray_probe(t, u, r0, harmonic, dim, label) -> ProbeSequence:
    rate = (lambda j: r0 / j) if harmonic else (lambda j: r0 * 2.0 ** -(j - 1))
    if dim == 1:
        s = float(u[0])
        gen = lambda j: t + s * rate(j)
    else:
        tc = tuple(t)
        uu = tuple(float(v) for v in u)
        gen = lambda j: tuple(a + b * rate(j) for a, b in zip(tc, uu))
    return ProbeSequence(gen, t, rate, label + ("/harmonic" if harmonic else "/geometric"))


# ---------------------------------------------------------------------------
# per-probe assessment


@dataclass(frozen=True)
class _ProbeResult:
    outcome: Outcome
    reason: str
    bound: float
    points: tuple
    values: tuple
    limit: Any
    indices: Optional[tuple] = None
    eps: Optional[float] = None

    def witness(self) -> Witness:
        return Witness(self.points, self.values, self.limit, self.reason, self.indices)


def _unbounded(norms, radii, plan: ProbePlan) -> Optional[str]:
    for v in norms:
        if not math.isfinite(v) or v > plan.growth_cap:
            return f"unbounded: norm {v:.4g} exceeds cap {plan.growth_cap:.4g}"
    n = len(norms)
    a, mid, b = n // 2, (3 * n) // 4, n - 1
    tail = norms[a:]
    if any(y < x for x, y in zip(tail, tail[1:])):
        return None
    ra, rm, rb = radii[a], radii[mid], radii[b]
    # subnormal norms are rounding noise, not growth
    if rb <= 0 or ra / rb < 1.5 or norms[a] < sys.float_info.min or not a < mid < b:
        return None

    def slope(i, j, ri, rj):
        if rj >= ri or norms[i] <= 0:
            return 0.0
        return math.log(norms[j] / norms[i]) / math.log(ri / rj)

    # power-law blow-up keeps its log-log slope; a norm creeping up to a
    # finite limit has a slope that decays with the radius
    s1, s2 = slope(a, mid, ra, rm), slope(mid, b, rm, rb)
    p = plan.growth_exponent
    if s1 >= p and s2 >= p and s2 >= SLOPE_KEEP * s1:
        return (
            f"unbounded: norm grows from {norms[a]:.4g} to {norms[b]:.4g} while "
            f"radius shrinks {ra / rb:.4g}x"
        )
    return None


def _finite_dim_sample(values, space: Space) -> bool:
    if space.finite_dimensional:
        return True
    if all(isinstance(v, SparseSeq) for v in values):
        half = len(values) // 2
        head = set()
        for v in values[:half]:
            head.update(v.support)
        return all(set(v.support) <= head for v in values[half:])
    return False


def _most_common(values) -> int:
    try:
        return Counter(values).most_common(1)[0][1]
    except TypeError:  # unhashable points
        return 1


def _assess_values(points, values, radii, limit, y_space: Space, plan: ProbePlan,
                   indices=None) -> _ProbeResult:
    """Decide whether a value sample has a convergent subsequence in Y."""
    norms = [float(y_space.norm(v)) for v in values]
    pts, vals = tuple(points), tuple(values)
    idx = tuple(indices) if indices is not None else None
    why = _unbounded(norms, radii, plan)
    if why:
        return _ProbeResult(Outcome.FALSIFIED, why, max(norms), pts, vals, limit, idx)
    bound = max(norms)
    if not _finite_dim_sample(values, y_space):
        for eps in plan.eps_schedule:
            net = total_boundedness_probe(list(values), eps, y_space.ambient)
            if not net.found:
                why = (
                    f"no eps-net at eps={eps:g}: {len(net.centers)} of {len(values)} "
                    f"values pairwise separated"
                )
                return _ProbeResult(Outcome.FALSIFIED, why, bound, pts, vals, limit, idx, eps)
    if y_space.closed:
        return _ProbeResult(Outcome.CERTIFIED, "bounded, totally bounded sample", bound,
                            pts, vals, limit, idx)
    tail = list(values[len(values) // 2:])
    # a value of Y hit again and again along the tail gives a constant subsequence
    top = _most_common(tail)
    if top >= max(3, len(tail) // 8):
        return _ProbeResult(Outcome.CERTIFIED, f"a value recurs {top} times along the tail",
                            bound, pts, vals, limit, idx)
    spread = max(y_space.distance(v, tail[-1]) for v in tail)
    if spread > plan.cluster_tol:
        return _ProbeResult(Outcome.INCONCLUSIVE,
                            f"tail spread {spread:.3g} above cluster tolerance",
                            bound, pts, vals, limit, idx)
    inside = y_space.limit_in_space(tail, plan.cluster_tol)
    if inside is False:
        return _ProbeResult(Outcome.FALSIFIED,
                            "the only cluster point fails the membership predicate of Y",
                            bound, pts, vals, limit, idx)
    if inside is None:
        return _ProbeResult(Outcome.INCONCLUSIVE, "cluster membership undecided",
                            bound, pts, vals, limit, idx)
    return _ProbeResult(Outcome.CERTIFIED, "cluster point lies in Y", bound,
                        pts, vals, limit, idx)


def _aggregate(results: Sequence[_ProbeResult], plan: ProbePlan, extra=None) -> Verdict:
    resolution = plan.describe()
    resolution["probes_run"] = len(results)
    falsified = [r for r in results if r.outcome is Outcome.FALSIFIED]
    if falsified:
        first = falsified[0]
        return Verdict(Outcome.FALSIFIED, None, first.witness(), resolution)
    if all(r.outcome is Outcome.CERTIFIED for r in results):
        cert = {"bound": max(r.bound for r in results), "convention": CONVENTION,
                "probes": len(results)}
        if extra:
            cert.update(extra)
        return Verdict(Outcome.CERTIFIED, cert, None, resolution)
    reasons = sorted({r.reason for r in results if r.outcome is Outcome.INCONCLUSIVE})
    resolution["inconclusive"] = reasons
    return Verdict(Outcome.INCONCLUSIVE, None, None, resolution)


def _run(func, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


def _domain_dim(plan: ProbePlan, x_dim):
    if x_dim is not None:
        return x_dim
    if plan.domain is not None:
        return plan.domain.dim
    if plan.targets:
        return len(_as_coords(plan.targets[0]))
    return 1


# ---------------------------------------------------------------------------
# point-valued checks


def check_usco_bounded(f: Callable, plan: ProbePlan = None, y_space: Space = None, *,
                       bound: float = None, x_dim: int = None, probes=None,
                       workers: int = 1) -> Verdict:
    """Is the graph of ``f`` contained in the graph of some usco map?

    Sequential criterion: along every probe x_j -> x the values f(x_j) need a
    convergent subsequence (with limit in Y). A declared global ``bound`` on a
    Euclidean range certifies directly; samples are still checked against it.
    """
    plan = plan or ProbePlan()
    seqs = probes if probes is not None else plan.sequences(_domain_dim(plan, x_dim))

    def one(seq: ProbeSequence) -> _ProbeResult:
        pts = seq.points(seq.usable(plan.prefix))
        try:
            vals = [f(x) for x in pts]
        except Exception as exc:  # evaluation failure at a probe point
            raise ProbeError(f"evaluation failed along {seq.label}: {exc}") from exc
        ys = y_space or space_of(vals[0])
        return _assess_values(pts, vals, seq.radii(len(pts)), seq.limit, ys, plan)

    results = _run(one, seqs, workers)
    verdict = _aggregate(results, plan)
    if bound is not None and verdict.outcome is not Outcome.FALSIFIED:
        ys = y_space or Euclidean(1)
        if not (ys.finite_dimensional and ys.closed):
            raise PreconditionError("a declared bound certifies only closed Euclidean ranges")
        seen = max(r.bound for r in results)
        if seen > bound:
            raise ValueError(f"declared bound {bound} violated by sampled norm {seen}")
        cert = {"bound": bound, "source": "declared bound; closed bounded sets are compact",
                "sampled_max": seen, "convention": CONVENTION, "probes": len(results)}
        return Verdict(Outcome.CERTIFIED, cert, None, verdict.resolution)
    return verdict


def check_sequence_usco_bounded(seq_fn: Callable[[int], Callable], plan: ProbePlan = None,
                                y_space: Space = None, *, x_dim: int = None, probes=None,
                                workers: int = 1) -> Verdict:
    """Usco-boundedness of a family n -> f_n.

    Probes pair points x_j -> x with indices k_j (constant or increasing);
    the values f_{k_j}(x_j) need a convergent subsequence.
    """
    plan = plan or ProbePlan()
    seqs = probes if probes is not None else plan.sequences(_domain_dim(plan, x_dim), family=True)

    def one(seq: ProbeSequence) -> _ProbeResult:
        n = seq.usable(plan.prefix)
        pts = seq.points(n)
        ks = seq.index_list(n) or [1] * n
        cache = {}
        vals = []
        for k, x in zip(ks, pts):
            if k not in cache:
                cache[k] = seq_fn(k)
            vals.append(cache[k](x))
        ys = y_space or space_of(vals[0])
        return _assess_values(pts, vals, seq.radii(n), seq.limit, ys, plan, ks)

    return _aggregate(_run(one, seqs, workers), plan, {"family": True})


def transfer_bounded_perturbation(verdict_f: Verdict, bound: float, y_space: Space = None) -> Verdict:
    """If f is usco-bounded with bound M and sup|f - g| <= K then g is, with M + K.

    Only for Euclidean ranges, where closed bounded sets are compact.
    """
    y_space = y_space or Euclidean(1)
    if not verdict_f.certified:
        raise PreconditionError(f"need a Certified verdict for f, got {verdict_f.outcome.value}",
                                verdict_f)
    if not y_space.finite_dimensional:
        raise PreconditionError(f"bounded perturbation needs a Euclidean range, not {y_space}")
    if not math.isfinite(bound) or bound < 0:
        raise ValueError("perturbation bound must be finite and nonnegative")
    m = verdict_f.bound
    if m is None:
        raise PreconditionError("certificate of f carries no bound")
    cert = {"bound": m + bound, "source": "bounded perturbation", "base_bound": m,
            "perturbation": bound}
    return Verdict(Outcome.CERTIFIED, cert, None, dict(verdict_f.resolution))


def replay_witness(f: Callable, verdict: Verdict, plan: ProbePlan = None, y_space: Space = None,
                   family: bool = False) -> Verdict:
    """Re-run a checker on the stored witness sequence only."""
    if verdict.witness is None:
        raise ValueError("verdict has no witness")
    w = verdict.witness
    plan = plan or ProbePlan()
    ys = y_space or space_of(w.values[0])
    probe = ProbeSequence.explicit(w.points, w.limit, space_of(w.limit), indices=w.indices)
    plan = ProbePlan(n_sequences=1, prefix=max(len(w.points), 4), eps_schedule=plan.eps_schedule,
                     growth_cap=plan.growth_cap, growth_exponent=plan.growth_exponent,
                     cluster_tol=plan.cluster_tol, seed=plan.seed)
    if family:
        return check_sequence_usco_bounded(f, plan, ys, probes=[probe])
    return check_usco_bounded(f, plan, ys, probes=[probe])


# ---------------------------------------------------------------------------
# set-valued maps


@dataclass(frozen=True, eq=False)
class SetValuedMap:
    """Nonempty compact-valued map given by an image function.

    Images are :class:`BoxUnion` (Euclidean range) or
    :class:`FinitePointSet` instances.
    """

    image: Callable[[Any], ClosedSet]
    domain: Optional[Box] = None
    y_space: Space = field(default_factory=Euclidean)
    graph: Optional[tuple] = None
    resolution: Optional[float] = None

    def __call__(self, x) -> ClosedSet:
        if self.domain is not None and not self.domain.contains(x):
            raise ProbeError(f"{x!r} lies outside the domain {self.domain}")
        img = self.image(x)
        if img.is_empty():
            raise ValueError(f"empty image at {x!r}")
        return img


def sample_graph(f: Callable, grid: Sequence) -> list[tuple]:
    return [(x, f(x)) for x in grid]


def _merge_values(values: Sequence, resolution: float, y_dim: int) -> BoxUnion:
    """Merge y-values into boxes; values closer than ``resolution`` share a box."""
    if y_dim == 1:
        vs = sorted(values)
        boxes = []
        lo = hi = vs[0]
        for v in vs[1:]:
            if v - hi <= resolution:
                hi = v
            else:
                boxes.append(Box((lo,), (hi,)))
                lo = hi = v
        boxes.append(Box((lo,), (hi,)))
        return BoxUnion(tuple(boxes))
    arr = np.array([_as_coords(v) for v in values], float)
    parent = list(range(len(arr)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = cKDTree(arr)
    for a, b in tree.query_pairs(resolution, p=np.inf):
        parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for k in range(len(arr)):
        groups.setdefault(find(k), []).append(k)
    boxes = []
    for members in groups.values():
        sub = arr[members]
        boxes.append(Box(tuple(sub.min(axis=0)), tuple(sub.max(axis=0))))
    return BoxUnion(tuple(boxes))


def graph_closure_hull(graph, resolution: float, domain: Box = None) -> SetValuedMap:
    """Grid-scale closure of a sampled graph.

    The image at x collects the y-values of all samples (x', y') with
    |x' - x| <= resolution and merges them into boxes. ``graph`` is a list of
    ``(x, y)`` pairs or a :class:`SetValuedMap` carrying a graph store; the
    returned map stores the same sample pairs, so taking the hull twice at
    the same resolution changes nothing.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if isinstance(graph, SetValuedMap):
        if graph.graph is None:
            raise ValueError("set-valued map carries no graph samples")
        domain = domain or graph.domain
        graph = graph.graph
    pairs = tuple(graph)
    if not pairs:
        raise ValueError("empty graph sample")
    xs = np.array([_as_coords(x) for x, _ in pairs], float)
    ys = [y for _, y in pairs]
    y_space = space_of(ys[0])
    if not isinstance(y_space, Euclidean):
        raise ValueError("hull images need a Euclidean range")
    tree = cKDTree(xs)
    radius = resolution * (1 + HULL_SLACK)
    if domain is None:
        domain = Box(tuple(xs.min(axis=0)), tuple(xs.max(axis=0)))

    def image(x):
        hits = tree.query_ball_point(np.array(_as_coords(x), float), radius)
        if not hits:
            raise ValueError(f"no samples within {resolution} of {x!r}")
        return _merge_values([ys[k] for k in hits], resolution, y_space.dim)

    return SetValuedMap(image, domain, y_space, pairs, resolution)


def _farthest_point(img: ClosedSet, target: ClosedSet, y_space: Space, rng):
    """A point of ``img`` (approximately) farthest from ``target``."""
    if isinstance(img, FinitePointSet):
        cands = list(img.points)
    elif isinstance(img, BoxUnion):
        cands = []
        for b in img.boxes:
            cands.extend(b.vertices())
            cands.append(b.center())
            if b.dim == 1 and isinstance(target, BoxUnion):
                # 1-d: the maximum also sits at midpoints of gaps of target inside b
                ends = sorted(e for t in target.boxes for e in (t.lo[0], t.hi[0]))
                for a, c in zip(ends, ends[1:]):
                    m = (a + c) / 2
                    if b.contains(m):
                        cands.append(m)
            elif b.dim > 1 and b.is_bounded():
                for _ in range(8):
                    u = rng.random(b.dim)
                    cands.append(tuple(lo + (hi - lo) * t for lo, hi, t in zip(b.lo, b.hi, u)))
    else:
        raise TypeError(f"unsupported image type {type(img).__name__}")
    return max(cands, key=lambda y: target.distance(y))


def check_usco(phi: SetValuedMap, plan: ProbePlan = None, *, probes=None,
               workers: int = 1) -> Verdict:
    """Sequential usco test: y_j in phi(x_j), x_j -> x must cluster in phi(x).

    y_j is chosen adversarially as the point of phi(x_j) farthest from
    phi(x). A probe is Certified when every tail value is within the final
    eps of phi(x), Falsified when values are unbounded or at least half the
    tail stays farther than the final eps.
    """
    plan = plan or ProbePlan(domain=phi.domain)
    if plan.domain is None and phi.domain is not None:
        plan = dataclasses.replace(plan, domain=phi.domain)
    dim = phi.domain.dim if phi.domain is not None else _domain_dim(plan, None)
    seqs = probes if probes is not None else plan.sequences(dim)
    rng = np.random.default_rng(plan.seed)

    def one(seq: ProbeSequence) -> _ProbeResult:
        n = seq.usable(plan.prefix)
        pts = seq.points(n)
        at_limit = phi(seq.limit)
        vals = [_farthest_point(phi(x), at_limit, phi.y_space, rng) for x in pts]
        base = _assess_values(pts, vals, seq.radii(n), seq.limit, phi.y_space, plan)
        if base.outcome is Outcome.FALSIFIED:
            return base
        tail = vals[n // 2:]
        excess = [at_limit.distance(y) for y in tail]
        far = sum(1 for e in excess if e > plan.final_eps)
        if far == 0:
            return base
        if 2 * far >= len(tail):
            why = (f"{far} of {len(tail)} tail values stay more than {plan.final_eps:g} "
                   f"from the image at the limit")
            return _ProbeResult(Outcome.FALSIFIED, why, base.bound, base.points,
                                base.values, seq.limit)
        return _ProbeResult(Outcome.INCONCLUSIVE, "tail partly escapes the limit image",
                            base.bound, base.points, base.values, seq.limit)

    return _aggregate(_run(one, seqs, workers), plan, {"map": True})
