"""Simple functions: constant on the pieces of a sigma-discrete F_sigma partition.

A piece F is known through its closed stages F^1 ⊆ F^2 ⊆ ... (with union
F) and a membership test for F itself. For every stage n the family of
n-th stages is discrete, which is what makes the continuous blending in
:mod:`uscobound.approx` work.

Partitions are countable and may be infinite; infinite ones are enumerated
lazily and must come with a locator that lists the pieces whose n-th stage
meets a bounded region.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .metric import (
    EMPTY,
    Box,
    BoxUnion,
    ClosedSet,
    Euclidean,
    Space,
    _as_coords,
)
from .setvalued import Outcome, PreconditionError, Verdict, transfer_bounded_perturbation

__all__ = [
    "PartitionError",
    "NoApproximationScheme",
    "Piece",
    "SimpleFunction",
    "CoverRefinement",
    "BoxIndex",
    "BaireOneTarget",
    "box_stage",
    "eval_simple",
    "active_pieces",
    "refine_cover",
    "simple_from_continuous",
    "simple_from_baire_one",
    "sup_distance",
]


class PartitionError(ValueError):
    """A point lies in no piece, or in more than one."""


class NoApproximationScheme(ValueError):
    """No way to build simple approximants of a discontinuous function."""


def _step(ref, n):
    return Fraction(1, n) if isinstance(ref, Fraction) else 1 / n


def box_stage(box: Box, n: int) -> Box:
    """Closed n-th stage of a box with some open or infinite faces.

    Open faces move inward by width/(n+1) (or 1/n next to an infinite face),
    infinite faces are cut at distance n. The stages increase to the box.
    """
    lo, hi = [], []
    for a, b, ac, bc in zip(box.lo, box.hi, box.lo_closed, box.hi_closed):
        if a == -math.inf:
            lo_n = b - n if math.isfinite(b) else -n
        elif not ac:
            lo_n = a + ((b - a) / (n + 1) if math.isfinite(b) else _step(a, n))
        else:
            lo_n = a
        if b == math.inf:
            hi_n = a + n if math.isfinite(a) else n
        elif not bc:
            hi_n = b - ((b - a) / (n + 1) if math.isfinite(a) else _step(b, n))
        else:
            hi_n = b
        lo.append(lo_n)
        hi.append(hi_n)
    return Box(tuple(lo), tuple(hi))


class BoxIndex:
    """Bounding-box prefilter over a list of box groups (closures compared)."""

    def __init__(self, groups: Sequence[Sequence[Box]]):
        owner, lo, hi = [], [], []
        for i, boxes in enumerate(groups):
            for b in boxes:
                owner.append(i), lo.append([float(v) for v in b.lo]), hi.append([float(v) for v in b.hi])
        self.owner = np.array(owner, dtype=int)
        self.lo = np.array(lo, dtype=float).reshape(len(owner), -1)
        self.hi = np.array(hi, dtype=float).reshape(len(owner), -1)

    def overlapping(self, region: Box, below: int = None) -> list[int]:
        rlo = np.array([float(v) for v in region.lo])
        rhi = np.array([float(v) for v in region.hi])
        mask = np.all((self.lo <= rhi) & (self.hi >= rlo), axis=1)
        if below is not None:
            mask &= self.owner < below
        return sorted(set(self.owner[mask].tolist()))

    def bounds(self) -> Box:
        return Box(tuple(self.lo.min(axis=0).tolist()), tuple(self.hi.max(axis=0).tolist()))

    def containing(self, x) -> list[int]:
        c = np.array([float(v) for v in _as_coords(x)])
        mask = np.all((self.lo <= c) & (self.hi >= c), axis=1)
        return sorted(set(self.owner[mask].tolist()))


@dataclass(frozen=True, eq=False)
class Piece:
    """One element F of the partition with its constant value."""

    label: Any
    value: Any
    stage: Callable[[int], ClosedSet]
    member: Callable[[Any], bool]
    cell: Optional[tuple] = None

    @classmethod
    def from_boxes(cls, label, value, boxes: Sequence[Box], first_stage: int = 1) -> "Piece":
        """Piece whose full set is a disjoint union of (half-open) boxes."""
        boxes = tuple(b for b in boxes if not b.is_empty())

        @functools.lru_cache(maxsize=512)
        def stage(n: int) -> ClosedSet:
            if n < first_stage:
                return EMPTY
            return BoxUnion(tuple(box_stage(b, n) for b in boxes))

        return cls(label, value, stage, lambda x: any(b.contains(x) for b in boxes), boxes)


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    """Simple function given by a countable partition and one value per piece.

    Finite partitions pass ``pieces``; infinite ones pass ``piece_fn``
    (index -> Piece), ``locate`` ((region, n) -> indices whose n-th stage
    meets region), ``lookup`` (x -> candidate indices) and ``extent``
    (n -> closed box containing every n-th stage).
    """

    pieces: Optional[tuple] = None
    piece_fn: Optional[Callable[[int], Piece]] = None
    locate: Optional[Callable[[Box, int], list]] = None
    lookup: Optional[Callable[[Any], list]] = None
    extent: Optional[Callable[[int], Optional[Box]]] = None
    anchor: Any = None
    x_space: Space = field(default_factory=Euclidean)
    y_space: Space = field(default_factory=Euclidean)
    domain: Optional[Box] = None
    boundary: tuple = ()
    label: str = "f"
    verdict: Optional[Verdict] = None
    search_radius: float = 1.0
    # certified sup distance to the function this one approximates, if any
    approx_error: Optional[float] = None
    refinement: Optional["CoverRefinement"] = None
    index: Optional[BoxIndex] = field(default=None, init=False, repr=False)
    _extents: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.pieces is not None:
            object.__setattr__(self, "pieces", tuple(self.pieces))
            if not self.pieces:
                raise ValueError("a partition needs at least one piece")
            # every stage lies in the closure of its piece's cells
            if len(self.pieces) > 8 and all(p.cell is not None for p in self.pieces):
                object.__setattr__(self, "index", BoxIndex([p.cell for p in self.pieces]))
        else:
            if self.piece_fn is None or self.locate is None or self.lookup is None:
                raise ValueError("infinite partitions need piece_fn, locate and lookup")
            object.__setattr__(self, "piece_fn", functools.lru_cache(maxsize=4096)(self.piece_fn))
        if self.anchor is None:
            object.__setattr__(self, "anchor", self.piece(0).value)
        if not self.y_space.contains(self.anchor):
            raise ValueError(f"anchor {self.anchor!r} is not a point of {self.y_space}")

    @property
    def finite(self) -> bool:
        return self.pieces is not None

    @property
    def count(self) -> Optional[int]:
        return len(self.pieces) if self.finite else None

    def piece(self, i: int) -> Piece:
        if self.finite:
            return self.pieces[i]
        return self.piece_fn(i)

    def locate_pieces(self, region: Box, n: int) -> list[int]:
        if self.locate is not None:
            return list(self.locate(region, n))
        ids = self.index.overlapping(region) if self.index is not None else range(len(self.pieces))
        return [i for i in ids if self.pieces[i].stage(n).meets(region)]

    def candidates(self, x) -> list[int]:
        if self.lookup is not None:
            return list(self.lookup(x))
        ids = self.index.containing(x) if self.index is not None else range(len(self.pieces))
        return [i for i in ids if self.pieces[i].member(x)]

    def stage_extent(self, n: int) -> Optional[Box]:
        """Closed box containing all n-th stages (None if all are empty)."""
        if self.extent is not None:
            return self.extent(n)
        if self.index is not None:
            # stages sit inside the cell closures
            return self.index.bounds()
        if n not in self._extents:
            boxes = [p.stage(n).bounds() for p in self.pieces]
            boxes = [b for b in boxes if b is not None]
            ext = None
            if boxes:
                dim = boxes[0].dim
                ext = Box(tuple(min(b.lo[i] for b in boxes) for i in range(dim)),
                          tuple(max(b.hi[i] for b in boxes) for i in range(dim)))
            self._extents[n] = ext
        return self._extents[n]

    def piece_index(self, x) -> int:
        hits = [i for i in self.candidates(x) if self.piece(i).member(x)]
        if len(hits) != 1:
            raise PartitionError(f"{x!r} lies in {len(hits)} pieces of {self.label}")
        return hits[0]

    def __call__(self, x):
        return self.piece(self.piece_index(x)).value

    def with_verdict(self, verdict: Optional[Verdict]) -> "SimpleFunction":
        return dataclasses.replace(self, verdict=verdict)


def eval_simple(f: SimpleFunction, x):
    """Value of the unique piece containing ``x``."""
    return f(x)


def active_pieces(f: SimpleFunction, region: Box, n: int) -> list[Piece]:
    """Pieces whose n-th stage meets the bounded ``region``."""
    if not region.is_bounded():
        raise ValueError("active_pieces needs a bounded region")
    return [f.piece(i) for i in f.locate_pieces(region, n)]


# ---------------------------------------------------------------------------
# continuous -> simple


@dataclass(frozen=True)
class CoverRefinement:
    """Ordered open cover V and its disjointification W_a = V_a minus earlier V_b."""

    cover: tuple
    cells: tuple
    points: tuple
    values: tuple


def refine_cover(cover: Sequence[Box], region: Box) -> list[list[Box]]:
    """Cells W_a = (V_a ∩ region) minus the union of V_b, b < a."""
    index = BoxIndex([[v] for v in cover])
    cells = []
    for a, v in enumerate(cover):
        parts = [v.intersect(region)]
        parts = [p for p in parts if not p.is_empty()]
        for b in index.overlapping(v, below=a):
            if not parts:
                break
            w = cover[b]
            if not v.meets(w):
                continue
            nxt = []
            for p in parts:
                nxt.extend(p.difference(w))
            parts = nxt
        cells.append(parts)
    return cells


def _cell_size(region: Box, epsilon, lipschitz, modulus) -> float:
    """Largest diameter D (up to a factor) with modulus(D) < epsilon."""
    widths = [hi - lo for lo, hi in zip(region.lo, region.hi)]
    diam = math.hypot(*widths) if len(widths) > 1 else widths[0]
    if lipschitz is not None:
        if lipschitz < 0:
            raise ValueError("Lipschitz constant must be nonnegative")
        if lipschitz == 0:
            return max(diam, 1.0) * 2
        return 0.9 * epsilon / lipschitz
    d = max(diam, 1.0)
    floor = max(diam, 1.0) * 1e-12
    while modulus(d) >= epsilon:
        d /= 2
        if d < floor:
            raise PreconditionError("modulus of continuity too weak for the requested epsilon")
    return d


def simple_from_continuous(g: Callable, epsilon: float, region: Box, *, lipschitz: float = None,
                           modulus: Callable[[float], float] = None, y_space: Space = None,
                           overlap: float = 0.1, max_cells: int = 200_000) -> SimpleFunction:
    """Simple epsilon-approximation of a continuous function on a closed box.

    Covers ``region`` by a grid of slightly enlarged open boxes whose image
    under ``g`` has diameter < epsilon (via the supplied Lipschitz constant or
    modulus of continuity), disjointifies the cover in lexicographic order
    and takes on each cell the value of ``g`` at a point of that cell.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if (lipschitz is None) == (modulus is None):
        raise ValueError("pass exactly one of lipschitz= or modulus=")
    if not region.is_bounded() or not region.is_closed():
        raise ValueError("region must be a bounded closed box")
    dim = region.dim
    d = _cell_size(region, epsilon, lipschitz, modulus)
    side = d / math.sqrt(dim) / (1 + overlap)
    counts = [max(1, math.ceil((hi - lo) / side)) for lo, hi in zip(region.lo, region.hi)]
    if math.prod(counts) > max_cells:
        raise PreconditionError(f"cover needs {math.prod(counts)} cells (> {max_cells})")
    grids = []
    for (lo, hi), m in zip(zip(region.lo, region.hi), counts):
        h = (hi - lo) / m
        grids.append([(lo + j * h, lo + (j + 1) * h, h) for j in range(m)])
    cover = []
    for combo in itertools.product(*grids):
        pad = [overlap * h / 2 for _, _, h in combo]
        cover.append(Box(
            tuple(a - p for (a, _, _), p in zip(combo, pad)),
            tuple(b + p for (_, b, _), p in zip(combo, pad)),
            (False,) * dim, (False,) * dim,
        ))
    cells = refine_cover(cover, region)
    y_space = y_space or Euclidean(1)
    pieces, pts, vals, kept_cover, kept_cells = [], [], [], [], []
    for v, cell in zip(cover, cells):
        if not cell:
            continue
        p = cell[0].center()
        y = g(p)
        pieces.append(Piece.from_boxes(len(pieces), y, cell))
        pts.append(p), vals.append(y), kept_cover.append(v), kept_cells.append(tuple(cell))
    boundary = ()
    if dim == 1:
        cuts = sorted({b.lo[0] for c in kept_cells for b in c} | {b.hi[0] for c in kept_cells for b in c})
        boundary = tuple(cuts)
    refinement = CoverRefinement(tuple(kept_cover), tuple(kept_cells), tuple(pts), tuple(vals))
    bound = max(float(y_space.norm(y)) for y in vals)
    verdict = Verdict(Outcome.CERTIFIED, {
        "bound": bound,
        "source": "finitely many values on a locally finite partition",
        "cells": len(pieces),
    }, None, {"epsilon": epsilon, "cell_diameter": d})
    cover_diam = max(math.hypot(*(hi - lo for lo, hi in zip(v.lo, v.hi))) for v in kept_cover)
    err = lipschitz * cover_diam if lipschitz is not None else modulus(cover_diam)
    return SimpleFunction(pieces=tuple(pieces), x_space=Euclidean(dim), y_space=y_space,
                          domain=region, boundary=boundary, label="simple_from_continuous",
                          verdict=verdict, search_radius=max(side, 1e-12) * 4,
                          approx_error=err, refinement=refinement)


# ---------------------------------------------------------------------------
# Baire-one targets


@dataclass(frozen=True, eq=False)
class BaireOneTarget:
    """A function together with a way to approximate it by simple functions.

    Exactly one route should be available: ``simple`` (f already simple),
    ``scheme`` (epsilon -> simple approximant), or continuity data
    (``lipschitz``/``modulus`` plus ``region``).
    """

    func: Callable
    y_space: Space = field(default_factory=Euclidean)
    simple: Optional[SimpleFunction] = None
    scheme: Optional[Callable[[float], SimpleFunction]] = None
    lipschitz: Optional[float] = None
    modulus: Optional[Callable[[float], float]] = None
    region: Optional[Box] = None
    verdict: Optional[Verdict] = None
    boundary: tuple = ()
    label: str = "f"

    def __call__(self, x):
        return self.func(x)

    @property
    def continuous(self) -> bool:
        return self.lipschitz is not None or self.modulus is not None


def sup_distance(f: Callable, g: Callable, grid: Sequence, y_space: Space) -> float:
    return max(float(y_space.distance(f(x), g(x))) for x in grid)


def _default_grid(region: Box, n: int = 2001) -> list:
    if region.dim == 1:
        return [float(v) for v in np.linspace(region.lo[0], region.hi[0], n)]
    k = max(2, int(round(n ** (1 / region.dim))))
    axes = [np.linspace(lo, hi, k) for lo, hi in zip(region.lo, region.hi)]
    return [tuple(float(c) for c in p) for p in itertools.product(*axes)]


def simple_from_baire_one(target, epsilon: float, grid: Sequence = None) -> SimpleFunction:
    """Simple function within ``epsilon`` of ``target`` in sup distance.

    When the target carries a Certified usco-bounded verdict with bound M
    and the range is Euclidean, the result carries a Certified verdict with
    bound M + epsilon.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if isinstance(target, SimpleFunction):
        return target
    if target.simple is not None:
        s = target.simple
        if target.verdict is not None and s.verdict is None:
            s = s.with_verdict(target.verdict)
        return dataclasses.replace(s, approx_error=0) if s.approx_error is None else s
    if target.scheme is not None:
        s = target.scheme(epsilon)
        if grid is None and target.region is not None:
            grid = _default_grid(target.region)
        if grid is not None:
            err = sup_distance(target.func, s, grid, target.y_space)
            if not err < epsilon:
                raise ValueError(f"scheme output misses epsilon={epsilon}: sampled error {err}")
            if s.approx_error is None:
                s = dataclasses.replace(s, approx_error=err)
    elif target.continuous:
        if target.region is None:
            raise ValueError("continuous targets need a region")
        s = simple_from_continuous(target.func, epsilon, target.region,
                                   lipschitz=target.lipschitz, modulus=target.modulus,
                                   y_space=target.y_space)
    else:
        raise NoApproximationScheme(
            f"{target.label}: no simple approximation route for a discontinuous function")
    if (target.verdict is not None and target.verdict.certified
            and target.y_space.finite_dimensional):
        s = s.with_verdict(transfer_bounded_perturbation(target.verdict, epsilon, target.y_space))
    return s
