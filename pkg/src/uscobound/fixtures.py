"""Reference functions with known answers, used as regression inputs.

Names are stable and double as CLI identifiers: ``bounded``, ``reciprocal``,
``infdim`` and ``noncomplete``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .metric import (
    Box,
    Euclidean,
    FinSupportSeq,
    Space,
    SparseSeq,
    finite_support_subspace,
)
from .setvalued import Outcome, ProbePlan, Verdict, check_usco_bounded
from .simplefn import Piece, SimpleFunction

__all__ = [
    "Member",
    "Fixture",
    "step_function",
    "harmonic_partition",
    "cauchy_point",
    "fixture_bounded",
    "fixture_reciprocal",
    "fixture_infinite_dim",
    "fixture_noncomplete",
    "FIXTURES",
    "get_fixture",
]

# 2^-k underflows to zero past this index
MAX_CAUCHY_INDEX = 1074
_CAUCHY_ITEMS = tuple((k, 2.0 ** -k) for k in range(1, MAX_CAUCHY_INDEX + 1))


@dataclass(frozen=True, eq=False)
class Member:
    """One function of a fixture and the verdict it should receive."""

    name: str
    func: Callable
    expected: Outcome
    plan: ProbePlan
    bound: Optional[float] = None
    expected_bound: Optional[float] = None

    @property
    def simple(self) -> Optional[SimpleFunction]:
        return self.func if isinstance(self.func, SimpleFunction) else None


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    x_space: Space
    y_space: Space
    members: dict
    description: str = ""
    primary: str = "f"
    # n -> member name, for fixtures that come with an approximating family
    family: Optional[Callable[[int], str]] = None
    meta: dict = field(default_factory=dict)

    def member(self, name: str = None) -> Member:
        name = name or self.primary
        try:
            return self.members[name]
        except KeyError:
            raise KeyError(f"fixture {self.name!r} has no member {name!r}; "
                           f"choose from {', '.join(self.members)}") from None

    def check(self, name: str = None, plan: ProbePlan = None) -> Verdict:
        m = self.member(name)
        return check_usco_bounded(m.func, plan or m.plan, self.y_space, bound=m.bound)


# ---------------------------------------------------------------------------
# building blocks


def step_function() -> SimpleFunction:
    """0 on (-inf, 0], 1 on (0, inf); stages [-n, 0] and [1/n, n]."""
    zero = Fraction(0)
    left = Piece.from_boxes("A", 0, [Box((-math.inf,), (zero,), (False,), (True,))])
    right = Piece.from_boxes("B", 1, [Box((zero,), (math.inf,), (False,), (False,))])
    return SimpleFunction(pieces=(left, right), boundary=(0,), label="step",
                          x_space=Euclidean(1), y_space=Euclidean(1))


def harmonic_partition(value: Callable[[int], object], outer_value, y_space: Space,
                       label: str, last: Optional[int] = None) -> SimpleFunction:
    """Simple function on R with pieces (1/(k+1), 1/k] carrying ``value(k)``.

    Piece 0 is (-inf, 0] ∪ (1, inf) with ``outer_value``. With ``last`` set,
    the final piece is (0, 1/last] and the partition is finite; otherwise it
    is countably infinite and the k-th interval only enters from stage k on,
    which keeps every stage family discrete.
    """

    def outer() -> Piece:
        return Piece.from_boxes(0, outer_value, [
            Box((-math.inf,), (0.0,), (False,), (True,)),
            Box((1.0,), (math.inf,), (False,), (False,)),
        ])

    def interval_piece(k: int) -> Piece:
        lo = 0.0 if k == last else 1 / (k + 1)
        box = Box((lo,), (1 / k,), (False,), (True,))
        if last is not None:
            return Piece.from_boxes(k, value(k), [box])
        return Piece.from_boxes(k, value(k), [box], first_stage=k)

    boundary_top = last if last is not None else 20
    boundary = (0.0,) + tuple(1 / k for k in range(1, boundary_top + 1))
    if last is not None:
        pieces = (outer(),) + tuple(interval_piece(k) for k in range(1, last + 1))
        return SimpleFunction(pieces=pieces, y_space=y_space, boundary=boundary,
                              label=label, anchor=outer_value)

    def piece_fn(i: int) -> Piece:
        if i < 0:
            raise IndexError(i)
        return outer() if i == 0 else interval_piece(i)

    def locate(region: Box, n: int) -> list:
        lo, hi = region.lo[0], region.hi[0]
        hits = [0] if piece_fn(0).stage(n).meets(region) else []
        if hi <= 0 or lo > 1:
            return hits
        # pieces k <= n with (1/(k+1), 1/k] near [lo, hi]
        k_lo = 1 if hi >= 1 else max(1, math.floor(1 / hi))
        k_hi = n if lo <= 0 else min(n, math.ceil(1 / lo))
        for k in range(k_lo, k_hi + 1):
            if piece_fn(k).stage(n).meets(region):
                hits.append(k)
        return hits

    def lookup(x) -> list:
        x = float(x)
        if x <= 0 or x > 1:
            return [0]
        # endpoints are the rounded floats 1/k; least k with 1/(k+1) < x
        lo, hi = 1, 2 * math.floor(1 / x) + 2
        while lo < hi:
            mid = (lo + hi) // 2
            if 1 / (mid + 1) < x:
                hi = mid
            else:
                lo = mid + 1
        return [lo]

    return SimpleFunction(piece_fn=piece_fn, locate=locate, lookup=lookup,
                          extent=lambda n: Box((-float(n),), (1.0 + n,)),
                          anchor=outer_value, y_space=y_space, boundary=boundary,
                          label=label, search_radius=0.25)


@functools.lru_cache(maxsize=None)
def cauchy_point(n: int) -> SparseSeq:
    """y_n = sum_{k<=n} 2^-k e_k, a Cauchy sequence without a finitely supported limit."""
    if n < 1:
        raise ValueError("index starts at 1")
    n = min(n, MAX_CAUCHY_INDEX)
    return SparseSeq._trusted(_CAUCHY_ITEMS[:n])


# ---------------------------------------------------------------------------
# fixtures


def _near_zero_plan(domain: Box = None, extra_targets=()) -> ProbePlan:
    return ProbePlan(targets=(0.0,) + tuple(extra_targets), domain=domain)


def fixture_bounded() -> Fixture:
    f = step_function()
    plan = _near_zero_plan()
    member = Member("f", f, Outcome.CERTIFIED, plan, expected_bound=1.0)
    return Fixture("bounded", Euclidean(1), Euclidean(1), {"f": member},
                   "step function 0 on (-inf,0], 1 on (0,inf)")


def _reciprocal(x):
    return 0.0 if x == 0 else 1 / x


def _identity(x):
    return x


def fixture_reciprocal() -> Fixture:
    f = Member("f", _reciprocal, Outcome.FALSIFIED, _near_zero_plan())
    g = Member("g", _identity, Outcome.CERTIFIED,
               _near_zero_plan(Box.closed(-5.0, 5.0), (-5.0, 5.0)), bound=5.0, expected_bound=5.0)
    return Fixture("reciprocal", Euclidean(1), Euclidean(1), {"f": f, "g": g},
                   "1/x with value 0 at 0, and the identity on [-5, 5]")


def fixture_infinite_dim() -> Fixture:
    ys = FinSupportSeq()
    f = harmonic_partition(lambda k: SparseSeq.basis(k), SparseSeq(), ys, "infdim")
    member = Member("f", f, Outcome.FALSIFIED, _near_zero_plan())
    return Fixture("infdim", Euclidean(1), ys, {"f": member},
                   "e_k on (1/(k+1), 1/k], 0 elsewhere, values in l2")


def fixture_noncomplete(n_members: int = 20) -> Fixture:
    ys = finite_support_subspace()
    members = {}
    for n in range(1, n_members + 1):
        fn = harmonic_partition(cauchy_point, SparseSeq(), ys, f"f{n}", last=n)
        members[f"f{n}"] = Member(f"f{n}", fn, Outcome.CERTIFIED,
                                  _near_zero_plan(None, fn.boundary[1:20]))
    f = harmonic_partition(cauchy_point, SparseSeq(), ys, "f")
    members["f"] = Member("f", f, Outcome.FALSIFIED, _near_zero_plan())
    return Fixture("noncomplete", Euclidean(1), ys, members,
                   "partial sums of sum 2^-k e_k in finitely supported sequences",
                   family=lambda n: f"f{n}", meta={"n_members": n_members})


FIXTURES = {
    "bounded": fixture_bounded,
    "reciprocal": fixture_reciprocal,
    "infdim": fixture_infinite_dim,
    "noncomplete": fixture_noncomplete,
}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None
