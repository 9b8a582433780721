"""Concrete metric spaces, points, closed sets and convergent probe sequences.

Two families of spaces are supported:

* ``Euclidean(k)`` -- points of R^1 are plain numbers (``int``, ``float`` or
  ``Fraction``), points of R^k for k > 1 are tuples of numbers.
* ``FinSupportSeq()`` -- finitely supported real sequences under the l2
  metric, points are :class:`SparseSeq`.

``Subspace`` restricts either family by a membership predicate; it is how
non-complete ranges are modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Any, Callable, Iterable, Optional, Sequence

__all__ = [
    "SpaceMismatch",
    "InexactDistance",
    "SparseSeq",
    "Space",
    "Euclidean",
    "FinSupportSeq",
    "Subspace",
    "finite_support_subspace",
    "space_of",
    "distance",
    "Box",
    "ClosedSet",
    "BoxUnion",
    "FinitePointSet",
    "OracleSet",
    "Bracket",
    "EMPTY",
    "set_distance",
    "distance_bracket",
    "interval",
    "NetResult",
    "total_boundedness_probe",
    "ProbeSequence",
    "point_to_json",
    "point_from_json",
]

INF = math.inf


class SpaceMismatch(ValueError):
    """A point does not belong to the space it was used with."""


class InexactDistance(ArithmeticError):
    """An oracle set could only bracket the distance."""

    def __init__(self, lower, upper):
        super().__init__(f"distance only known within [{lower}, {upper}]")
        self.lower = lower
        self.upper = upper
        self.width = upper - lower


# ---------------------------------------------------------------------------
# finitely supported sequences


class SparseSeq:
    """Immutable finitely supported real sequence, indices start at 1.

    Zero entries are never stored and indices are kept strictly increasing.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Iterable[tuple[int, float]] | dict = ()):
        if isinstance(entries, dict):
            entries = entries.items()
        acc: dict[int, Any] = {}
        for i, v in entries:
            if not isinstance(i, int) or i < 1:
                raise ValueError(f"index must be a positive int, got {i!r}")
            acc[i] = acc.get(i, 0) + v
        self._items = tuple((i, acc[i]) for i in sorted(acc) if acc[i] != 0)
        self._hash = None

    @classmethod
    def basis(cls, i: int, value=1.0) -> "SparseSeq":
        return cls([(i, value)])

    @classmethod
    def _trusted(cls, items: tuple) -> "SparseSeq":
        # items already sorted, positive indices, no zeros
        out = cls.__new__(cls)
        out._items = items
        out._hash = None
        return out

    @property
    def items(self) -> tuple[tuple[int, Any], ...]:
        return self._items

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i: int):
        for j, v in self._items:
            if j == i:
                return v
            if j > i:
                break
        return 0

    def _merge(self, other: "SparseSeq", sign) -> "SparseSeq":
        acc = dict(self._items)
        for i, v in other._items:
            acc[i] = acc.get(i, 0) + sign * v
        return SparseSeq._trusted(tuple((i, acc[i]) for i in sorted(acc) if acc[i] != 0))

    def dist(self, other: "SparseSeq") -> float:
        """Euclidean distance without building the difference."""
        if self._items == other._items:
            return 0.0
        acc = dict(self._items)
        for i, v in other._items:
            acc[i] = acc.get(i, 0) - v
        return math.hypot(*(float(v) for v in acc.values()))

    def __add__(self, other):
        if not isinstance(other, SparseSeq):
            return NotImplemented
        return self._merge(other, 1)

    def __sub__(self, other):
        if not isinstance(other, SparseSeq):
            return NotImplemented
        return self._merge(other, -1)

    def __neg__(self):
        return SparseSeq([(i, -v) for i, v in self._items])

    def __mul__(self, t):
        if not isinstance(t, Real):
            return NotImplemented
        if t == 0:
            return SparseSeq()
        return SparseSeq([(i, t * v) for i, v in self._items])

    __rmul__ = __mul__

    def norm(self) -> float:
        if not self._items:
            return 0.0
        return math.hypot(*(float(v) for _, v in self._items))

    def __eq__(self, other):
        if not isinstance(other, SparseSeq):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{i}: {v!r}" for i, v in self._items[:6])
        if len(self._items) > 6:
            body += f", ... ({len(self._items)} entries)"
        return f"SparseSeq({{{body}}})"


# ---------------------------------------------------------------------------
# spaces


_FAST_NUMBERS = (float, int, Fraction)


def _is_number(p) -> bool:
    if type(p) in _FAST_NUMBERS:
        return True
    return isinstance(p, Real) and not isinstance(p, bool)


class Space:
    """Common interface of the concrete spaces."""

    kind: str = "abstract"
    complete: bool = True
    closed: bool = True

    @property
    def ambient(self) -> "Space":
        return self

    @property
    def finite_dimensional(self) -> bool:
        return isinstance(self.ambient, Euclidean)

    def contains(self, p) -> bool:
        raise NotImplementedError

    def check(self, p):
        if not self.contains(p):
            raise SpaceMismatch(f"{p!r} is not a point of {self}")
        return p

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def norm(self, p) -> float:
        raise NotImplementedError

    def zero(self):
        raise NotImplementedError

    def lincomb(self, *terms):
        """Return sum(coef * point) over ``(coef, point)`` terms."""
        raise NotImplementedError

    def limit_in_space(self, tail: Sequence, tol: float) -> Optional[bool]:
        """Decide whether the limit of a Cauchy ``tail`` lies in the space."""
        return True


@dataclass(frozen=True)
class Euclidean(Space):
    dim: int = 1
    kind = "euclidean"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def contains(self, p) -> bool:
        if self.dim == 1:
            return _is_number(p) and math.isfinite(p)
        return (
            isinstance(p, tuple)
            and len(p) == self.dim
            and all(_is_number(c) and math.isfinite(c) for c in p)
        )

    def _coords(self, p) -> tuple:
        if self.dim == 1:
            if not _is_number(p):
                raise SpaceMismatch(f"{p!r} is not a point of R^1")
            return (p,)
        if not isinstance(p, tuple) or len(p) != self.dim:
            raise SpaceMismatch(f"{p!r} is not a point of R^{self.dim}")
        return p

    def distance(self, p, q):
        if self.dim == 1:
            self._coords(p), self._coords(q)
            return abs(p - q)
        a, b = self._coords(p), self._coords(q)
        return math.dist(a, b)

    def norm(self, p):
        if self.dim == 1:
            return abs(self._coords(p)[0])
        return math.hypot(*self._coords(p))

    def zero(self):
        return 0.0 if self.dim == 1 else (0.0,) * self.dim

    def lincomb(self, *terms):
        if self.dim == 1:
            out = 0
            for t, p in terms:
                out = out + t * p
            return out
        acc = [0] * self.dim
        for t, p in terms:
            for i, c in enumerate(self._coords(p)):
                acc[i] = acc[i] + t * c
        return tuple(acc)

    def __str__(self):
        return f"R^{self.dim}"


@dataclass(frozen=True)
class FinSupportSeq(Space):
    """Finitely supported sequences with the l2 distance.

    Limits of Cauchy samples are accepted as members: this space stands in
    for its completion l2. Use :func:`finite_support_subspace` to get the
    genuinely non-complete space of finitely supported sequences.
    """

    kind = "finseq"

    def contains(self, p) -> bool:
        return isinstance(p, SparseSeq)

    def distance(self, p, q):
        return self.check(p).dist(self.check(q))

    def norm(self, p):
        return self.check(p).norm()

    def zero(self):
        return SparseSeq()

    def lincomb(self, *terms):
        acc: dict[int, Any] = {}
        for t, p in terms:
            if t == 0:
                continue
            for i, v in self.check(p).items:
                acc[i] = acc.get(i, 0) + t * v
        return SparseSeq(acc)

    def __str__(self):
        return "l2(finite support)"


@dataclass(frozen=True, eq=False)
class Subspace(Space):
    """Subset of a parent space cut out by a membership predicate.

    ``closed``/``complete`` are declared by the caller. ``limit_test`` decides
    whether the limit of a Cauchy tail belongs to the subset; it may return
    ``None`` when the sample does not settle the question.
    """

    parent: Space
    predicate: Callable[[Any], bool]
    name: str = "subspace"
    closed: bool = True
    complete: bool = True
    convex: bool = True
    limit_test: Optional[Callable[[Sequence, float], Optional[bool]]] = None
    kind = "subspace"

    @property
    def ambient(self) -> Space:
        return self.parent.ambient

    def contains(self, p) -> bool:
        return self.parent.contains(p) and bool(self.predicate(p))

    def distance(self, p, q):
        return self.parent.distance(p, q)

    def norm(self, p):
        return self.parent.norm(p)

    def zero(self):
        return self.parent.zero()

    def lincomb(self, *terms):
        return self.parent.lincomb(*terms)

    def limit_in_space(self, tail, tol):
        if self.limit_test is None:
            return True if self.closed else None
        return self.limit_test(tail, tol)

    def __str__(self):
        return f"{self.name} in {self.parent}"


def _finite_support_limit(tail: Sequence[SparseSeq], tol: float) -> Optional[bool]:
    """Support-growth test for the limit of a Cauchy tail of sparse vectors.

    At checkpoints along the tail, count the coordinates that are certainly
    nonzero in the limit (larger in magnitude than the remaining spread). A
    count that keeps growing means the limit has unbounded support.
    """
    if len(tail) < 4:
        return None
    last = tail[-1]
    counts = []
    for pos in (len(tail) // 4, len(tail) // 2, len(tail) - 1):
        v = tail[pos]
        spread = max((v - w).norm() for w in tail[pos:])
        if spread > tol:
            return None
        counts.append(sum(1 for _, c in v.items if abs(c) > spread))
    if counts[0] < counts[1] < counts[2]:
        return False
    if counts[0] == counts[1] == counts[2]:
        head = set(tail[len(tail) // 4].support)
        outside = SparseSeq([(i, c) for i, c in last.items if i not in head])
        if outside.norm() <= tol:
            return True
    return None


def finite_support_subspace() -> Subspace:
    """The non-complete space of finitely supported sequences inside l2."""
    return Subspace(
        parent=FinSupportSeq(),
        predicate=lambda p: isinstance(p, SparseSeq),
        name="c00",
        closed=False,
        complete=False,
        limit_test=_finite_support_limit,
    )


def space_of(p) -> Space:
    """Infer the ambient space of a representable point."""
    if isinstance(p, SparseSeq):
        return FinSupportSeq()
    if _is_number(p):
        return Euclidean(1)
    if isinstance(p, tuple) and p and all(_is_number(c) for c in p):
        return Euclidean(len(p))
    raise SpaceMismatch(f"cannot infer a space for {p!r}")


def distance(space: Space, p, q):
    """Metric of ``space``; raises :class:`SpaceMismatch` on foreign points."""
    space.check(p)
    space.check(q)
    return space.distance(p, q)


# ---------------------------------------------------------------------------
# boxes and closed sets


def _as_coords(p) -> tuple:
    if _is_number(p):
        return (p,)
    if isinstance(p, tuple):
        return p
    raise SpaceMismatch(f"{p!r} is not a Euclidean point")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; each face is open or closed independently.

    Infinite bounds are allowed. A closed box is one whose finite faces are
    all closed.
    """

    lo: tuple
    hi: tuple
    lo_closed: tuple = None
    hi_closed: tuple = None

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi dimension mismatch")
        if self.lo_closed is None:
            object.__setattr__(self, "lo_closed", (True,) * len(self.lo))
        if self.hi_closed is None:
            object.__setattr__(self, "hi_closed", (True,) * len(self.hi))
        object.__setattr__(self, "_empty", any(
            lo > hi or (lo == hi and not (lc and hc))
            for lo, hi, lc, hc in zip(self.lo, self.hi, self.lo_closed, self.hi_closed)))

    @classmethod
    def closed(cls, lo, hi) -> "Box":
        return cls(_as_coords(lo), _as_coords(hi))

    @classmethod
    def around(cls, p, r) -> "Box":
        c = _as_coords(p)
        return cls(tuple(x - r for x in c), tuple(x + r for x in c))

    @property
    def dim(self) -> int:
        return len(self.lo)

    def is_empty(self) -> bool:
        return self._empty

    def is_bounded(self) -> bool:
        return all(math.isfinite(v) for v in self.lo + self.hi)

    def is_closed(self) -> bool:
        return all(
            c or not math.isfinite(v)
            for v, c in zip(self.lo + self.hi, self.lo_closed + self.hi_closed)
        )

    def contains(self, p) -> bool:
        c = _as_coords(p)
        if len(c) != self.dim:
            raise SpaceMismatch(f"{p!r} has wrong dimension for a {self.dim}-box")
        for x, lo, hi, lc, hc in zip(c, self.lo, self.hi, self.lo_closed, self.hi_closed):
            if x < lo or (x == lo and not lc):
                return False
            if x > hi or (x == hi and not hc):
                return False
        return True

    def distance(self, p):
        """Distance from ``p`` to the closure of the box."""
        if self._empty:
            return INF
        if len(self.lo) == 1 and _is_number(p):
            lo, hi = self.lo[0], self.hi[0]
            return lo - p if p < lo else (p - hi if p > hi else 0)
        c = _as_coords(p)
        if len(c) != self.dim:
            raise SpaceMismatch(f"{p!r} has wrong dimension for a {self.dim}-box")
        gaps = []
        for x, lo, hi in zip(c, self.lo, self.hi):
            if x < lo:
                gaps.append(lo - x)
            elif x > hi:
                gaps.append(x - hi)
            else:
                gaps.append(0)
        if self.dim == 1:
            return gaps[0]
        return math.hypot(*gaps)

    def closure(self) -> "Box":
        return Box(self.lo, self.hi)

    def intersect(self, other: "Box") -> "Box":
        lo, hi, lc, hc = [], [], [], []
        for i in range(self.dim):
            a, b = self.lo[i], other.lo[i]
            if a > b:
                lo.append(a), lc.append(self.lo_closed[i])
            elif b > a:
                lo.append(b), lc.append(other.lo_closed[i])
            else:
                lo.append(a), lc.append(self.lo_closed[i] and other.lo_closed[i])
            a, b = self.hi[i], other.hi[i]
            if a < b:
                hi.append(a), hc.append(self.hi_closed[i])
            elif b < a:
                hi.append(b), hc.append(other.hi_closed[i])
            else:
                hi.append(a), hc.append(self.hi_closed[i] and other.hi_closed[i])
        return Box(tuple(lo), tuple(hi), tuple(lc), tuple(hc))

    def meets(self, other: "Box") -> bool:
        return not self.intersect(other).is_empty()

    def difference(self, other: "Box") -> list["Box"]:
        """``self \\ other`` as a list of pairwise disjoint boxes."""
        if self.is_empty():
            return []
        if not self.meets(other):
            return [self]
        pieces = []
        rest = self
        for i in range(self.dim):
            # slab of rest strictly below other's lower face in dimension i
            below = Box(
                rest.lo,
                rest.hi[:i] + (other.lo[i],) + rest.hi[i + 1:],
                rest.lo_closed,
                rest.hi_closed[:i] + (not other.lo_closed[i],) + rest.hi_closed[i + 1:],
            ).intersect(rest)
            above = Box(
                rest.lo[:i] + (other.hi[i],) + rest.lo[i + 1:],
                rest.hi,
                rest.lo_closed[:i] + (not other.hi_closed[i],) + rest.lo_closed[i + 1:],
                rest.hi_closed,
            ).intersect(rest)
            if math.isfinite(other.lo[i]) and not below.is_empty():
                pieces.append(below)
            if math.isfinite(other.hi[i]) and not above.is_empty():
                pieces.append(above)
            middle = Box(
                rest.lo[:i] + (other.lo[i],) + rest.lo[i + 1:],
                rest.hi[:i] + (other.hi[i],) + rest.hi[i + 1:],
                rest.lo_closed[:i] + (other.lo_closed[i],) + rest.lo_closed[i + 1:],
                rest.hi_closed[:i] + (other.hi_closed[i],) + rest.hi_closed[i + 1:],
            )
            rest = rest.intersect(middle)
            if rest.is_empty():
                break
        return pieces

    def vertices(self) -> list:
        out = [()]
        for lo, hi in zip(self.lo, self.hi):
            out = [v + (lo,) for v in out] + ([v + (hi,) for v in out] if hi != lo else [])
        if self.dim == 1:
            return [v[0] for v in out]
        return out

    def center(self):
        c = tuple((lo + hi) / 2 for lo, hi in zip(self.lo, self.hi))
        return c[0] if self.dim == 1 else c

    def __str__(self):
        parts = []
        for lo, hi, lc, hc in zip(self.lo, self.hi, self.lo_closed, self.hi_closed):
            parts.append(f"{'[' if lc else '('}{lo},{hi}{']' if hc else ')'}")
        return "x".join(parts)


def interval(a, b) -> Box:
    """Closed 1-d interval ``[a, b]``."""
    return Box((a,), (b,))


class ClosedSet:
    """Closed subset of a metric space with a distance oracle."""

    def distance(self, p):
        raise NotImplementedError

    def contains(self, p) -> bool:
        raise NotImplementedError

    def bounds(self) -> Optional[Box]:
        """A closed box containing the set, or ``None`` if unknown."""
        return None

    def is_empty(self) -> bool:
        return False

    def meets(self, region: Box) -> bool:
        b = self.bounds()
        return b is None or b.meets(region)


@dataclass(frozen=True)
class BoxUnion(ClosedSet):
    """Finite union of closed boxes; the empty union is the empty set."""

    boxes: tuple = ()

    def __post_init__(self):
        boxes = tuple(b for b in self.boxes if not b.is_empty())
        for b in boxes:
            if not b.is_closed():
                raise ValueError(f"box {b} is not closed")
        object.__setattr__(self, "boxes", boxes)

    @classmethod
    def intervals(cls, *pairs) -> "BoxUnion":
        return cls(tuple(interval(a, b) for a, b in pairs))

    def distance(self, p):
        if not self.boxes:
            return INF
        return min(b.distance(p) for b in self.boxes)

    def contains(self, p) -> bool:
        return any(b.contains(p) for b in self.boxes)

    def is_empty(self) -> bool:
        return not self.boxes

    def bounds(self) -> Optional[Box]:
        if not self.boxes:
            return None
        dim = self.boxes[0].dim
        lo = tuple(min(b.lo[i] for b in self.boxes) for i in range(dim))
        hi = tuple(max(b.hi[i] for b in self.boxes) for i in range(dim))
        return Box(lo, hi)

    def meets(self, region: Box) -> bool:
        return any(b.meets(region) for b in self.boxes)

    def __str__(self):
        return " U ".join(str(b) for b in self.boxes) or "{}"


EMPTY = BoxUnion(())


@dataclass(frozen=True)
class FinitePointSet(ClosedSet):
    points: tuple
    space: Space = None

    def __post_init__(self):
        if self.space is None and self.points:
            object.__setattr__(self, "space", space_of(self.points[0]))
        if self.space is not None:
            for p in self.points:
                self.space.check(p)

    def distance(self, p):
        if not self.points:
            return INF
        return min(self.space.distance(p, q) for q in self.points)

    def contains(self, p) -> bool:
        return any(self.space.distance(p, q) == 0 for q in self.points)

    def is_empty(self) -> bool:
        return not self.points

    def bounds(self) -> Optional[Box]:
        if not self.points or not isinstance(self.space.ambient, Euclidean):
            return None
        cs = [_as_coords(p) for p in self.points]
        dim = len(cs[0])
        return Box(
            tuple(min(c[i] for c in cs) for i in range(dim)),
            tuple(max(c[i] for c in cs) for i in range(dim)),
        )


class Bracket(tuple):
    """Certified ``(lower, upper)`` bracket on a distance."""

    def __new__(cls, lower, upper):
        if lower > upper:
            raise ValueError("empty bracket")
        return super().__new__(cls, (lower, upper))

    @property
    def lower(self):
        return self[0]

    @property
    def upper(self):
        return self[1]

    @property
    def width(self):
        return self[1] - self[0]


@dataclass(frozen=True)
class OracleSet(ClosedSet):
    """Closed set given by caller oracles; closedness is asserted, not checked.

    ``dist`` may return a number (exact) or a ``(lower, upper)`` pair.
    """

    dist: Callable[[Any], Any]
    member: Callable[[Any], bool]
    box: Optional[Box] = None

    def distance(self, p):
        d = self.dist(p)
        if isinstance(d, tuple):
            lo, hi = d
            if lo == hi:
                return lo
            raise InexactDistance(lo, hi)
        return d

    def bracket(self, p) -> Bracket:
        d = self.dist(p)
        if isinstance(d, tuple):
            return Bracket(*d)
        return Bracket(d, d)

    def contains(self, p) -> bool:
        return bool(self.member(p))

    def bounds(self) -> Optional[Box]:
        return self.box


def set_distance(s: ClosedSet, p):
    """Infimum distance from ``p`` to ``s``; ``inf`` for the empty set."""
    return s.distance(p)


def distance_bracket(s: ClosedSet, p) -> Bracket:
    if isinstance(s, OracleSet):
        return s.bracket(p)
    d = s.distance(p)
    return Bracket(d, d)


# ---------------------------------------------------------------------------
# epsilon nets


@dataclass(frozen=True)
class NetResult:
    found: bool
    epsilon: float
    centers: tuple
    # indices of the centers in the input sample; pairwise > epsilon apart
    center_indices: tuple

    @property
    def net(self) -> tuple:
        return self.centers if self.found else ()

    @property
    def witness(self) -> tuple:
        return () if self.found else self.centers


def total_boundedness_probe(points: Sequence, epsilon: float, space: Space = None) -> NetResult:
    """Greedy epsilon-net of a finite sample.

    Greedy centers are pairwise more than ``epsilon`` apart and cover the
    sample. If more than half of the sample ends up as centers the result is
    the "no net" branch, with the centers as the separated witness set.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not points:
        raise ValueError("empty sample")
    space = space or space_of(points[0])
    centers: list = []
    idx: list[int] = []
    for k, p in enumerate(points):
        if all(space.distance(p, c) > epsilon for c in centers):
            centers.append(p)
            idx.append(k)
    found = len(centers) <= math.ceil(len(points) / 2)
    return NetResult(found, epsilon, tuple(centers), tuple(idx))


# ---------------------------------------------------------------------------
# probe sequences


@dataclass(frozen=True)
class ProbeSequence:
    """A sequence x_1, x_2, ... converging to ``limit``.

    ``certificate(j)`` bounds the distance from x_j to the limit; it must be
    nonincreasing and tend to zero.
    """

    generator: Callable[[int], Any]
    limit: Any
    certificate: Callable[[int], float]
    label: str = ""
    indices: Optional[Callable[[int], int]] = None
    length: Optional[int] = None

    def usable(self, n: int) -> int:
        return n if self.length is None else min(n, self.length)

    def point(self, j: int):
        return self.generator(j)

    def points(self, n: int) -> list:
        return [self.generator(j) for j in range(1, n + 1)]

    def radii(self, n: int) -> list:
        return [self.certificate(j) for j in range(1, n + 1)]

    def index_list(self, n: int) -> Optional[list[int]]:
        if self.indices is None:
            return None
        return [self.indices(j) for j in range(1, n + 1)]

    @classmethod
    def explicit(cls, points: Sequence, limit, space: Space = None,
                 indices: Sequence[int] = None, label="explicit") -> "ProbeSequence":
        """Probe over a stored list of points (e.g. a replayed witness)."""
        pts = tuple(points)
        space = space or space_of(limit)
        dists = [space.distance(p, limit) for p in pts]
        # running max from the right keeps the certificate nonincreasing
        cert = list(dists)
        for k in range(len(cert) - 2, -1, -1):
            cert[k] = max(cert[k], cert[k + 1])
        idx = tuple(indices) if indices is not None else None
        return cls(
            generator=lambda j: pts[j - 1],
            limit=limit,
            certificate=lambda j: cert[j - 1],
            label=label,
            indices=(lambda j: idx[j - 1]) if idx is not None else None,
            length=len(pts),
        )


# ---------------------------------------------------------------------------
# JSON encoding of points


def point_to_json(p):
    if isinstance(p, SparseSeq):
        return {"sparse": [[i, float(v)] for i, v in p.items]}
    if isinstance(p, tuple):
        return [float(c) for c in p]
    if isinstance(p, Fraction):
        return float(p)
    if _is_number(p):
        return float(p)
    raise TypeError(f"cannot serialize {p!r}")


def point_from_json(obj):
    if isinstance(obj, dict) and "sparse" in obj:
        return SparseSeq([(int(i), float(v)) for i, v in obj["sparse"]])
    if isinstance(obj, list):
        return tuple(float(c) for c in obj)
    return float(obj)
