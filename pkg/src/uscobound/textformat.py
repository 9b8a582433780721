"""Line-oriented text format for simple functions.

Example::

    simplefn 1
    label step
    x_dim 1
    y euclidean 1
    anchor 0
    horizon 2
    boundary 0
    piece A
    value 0
    cell (-inf,0/1]
    stage 1 [-1/1,0/1]
    stage 2 [-2/1,0/1]
    end
    ...

Numbers are written as ints, floats (``repr``) or fractions ``p/q`` and
read back with the same type. Boxes use interval notation per axis joined
by ``x``; unions are joined by `` U `` and the empty set is ``empty``.
Values are numbers, ``vec(a,b,...)`` or ``sparse{i:v,...}``. Stages past
the stored horizon repeat the last stored stage. Infinite partitions are
written up to ``max_pieces`` and marked ``truncated``; the loaded function
is then undefined off the written pieces.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from pathlib import Path
from typing import Union

from .metric import (
    EMPTY,
    Box,
    BoxUnion,
    Euclidean,
    FinSupportSeq,
    Space,
    SparseSeq,
    Subspace,
    finite_support_subspace,
)
from .simplefn import Piece, SimpleFunction

__all__ = ["FormatError", "dumps", "loads", "dump", "load"]

MAGIC = "simplefn 1"


class FormatError(ValueError):
    pass


def _num(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        raise FormatError("booleans are not numbers here")
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _parse_num(s: str):
    s = s.strip()
    try:
        if "/" in s:
            return Fraction(s)
        if re.fullmatch(r"[+-]?\d+", s):
            return int(s)
        return float(s)
    except ValueError:
        raise FormatError(f"bad number {s!r}") from None


def _box(b: Box) -> str:
    parts = []
    for lo, hi, lc, hc in zip(b.lo, b.hi, b.lo_closed, b.hi_closed):
        parts.append(f"{'[' if lc else '('}{_num(lo)},{_num(hi)}{']' if hc else ')'}")
    return "x".join(parts)


_AXIS = re.compile(r"([\[(])([^,\[\]()]+),([^,\[\]()]+)([\])])")


def _parse_box(s: str) -> Box:
    axes = s.strip().split("x")
    lo, hi, lc, hc = [], [], [], []
    for a in axes:
        m = _AXIS.fullmatch(a.strip())
        if not m:
            raise FormatError(f"bad box {s!r}")
        lc.append(m.group(1) == "["), lo.append(_parse_num(m.group(2)))
        hi.append(_parse_num(m.group(3))), hc.append(m.group(4) == "]")
    return Box(tuple(lo), tuple(hi), tuple(lc), tuple(hc))


def _boxes(boxes) -> str:
    return " U ".join(_box(b) for b in boxes) if boxes else "empty"


def _parse_boxes(s: str) -> tuple:
    s = s.strip()
    if s == "empty":
        return ()
    return tuple(_parse_box(p) for p in s.split(" U "))


def _value(y) -> str:
    if isinstance(y, SparseSeq):
        return "sparse{" + ",".join(f"{i}:{_num(v)}" for i, v in y.items) + "}"
    if isinstance(y, tuple):
        return "vec(" + ",".join(_num(c) for c in y) + ")"
    return _num(y)


def _parse_value(s: str):
    s = s.strip()
    if s.startswith("sparse{") and s.endswith("}"):
        body = s[7:-1]
        entries = []
        for item in filter(None, body.split(",")):
            i, v = item.split(":")
            entries.append((int(i), _parse_num(v)))
        return SparseSeq(entries)
    if s.startswith("vec(") and s.endswith(")"):
        return tuple(_parse_num(c) for c in s[4:-1].split(","))
    return _parse_num(s)


def _space(ys: Space) -> str:
    if isinstance(ys, Euclidean):
        return f"euclidean {ys.dim}"
    if isinstance(ys, FinSupportSeq):
        return "finsupport"
    if isinstance(ys, Subspace) and ys.name == "c00":
        return "c00"
    raise FormatError(f"range {ys} has no text representation")


def _parse_space(s: str) -> Space:
    parts = s.split()
    if parts[0] == "euclidean":
        return Euclidean(int(parts[1]))
    if parts == ["finsupport"]:
        return FinSupportSeq()
    if parts == ["c00"]:
        return finite_support_subspace()
    raise FormatError(f"unknown range {s!r}")


def _label(v) -> str:
    s = str(v)
    if not s or any(c.isspace() for c in s):
        raise FormatError(f"label {v!r} must be a nonempty word")
    return s


def _parse_label(s: str):
    return int(s) if re.fullmatch(r"-?\d+", s) else s


def dumps(f: SimpleFunction, horizon: int = 8, max_pieces: int = None) -> str:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if f.finite:
        indices = range(f.count)
        truncated = False
    else:
        if max_pieces is None:
            raise FormatError("infinite partitions need max_pieces")
        indices = range(max_pieces)
        truncated = True
    x_dim = f.domain.dim if f.domain is not None else getattr(f.x_space, "dim", 1)
    lines = [
        MAGIC,
        f"label {_label(f.label)}",
        f"x_dim {x_dim}",
        f"y {_space(f.y_space)}",
        f"anchor {_value(f.anchor)}",
        f"horizon {horizon}",
    ]
    if f.domain is not None:
        lines.append(f"domain {_box(f.domain)}")
    if f.boundary:
        lines.append("boundary " + " ".join(_num(b) for b in f.boundary))
    if truncated:
        lines.append(f"truncated {max_pieces}")
    for i in indices:
        p = f.piece(i)
        if p.cell is None:
            raise FormatError(f"piece {p.label} has no cell boxes")
        lines.append(f"piece {_label(p.label)}")
        lines.append(f"value {_value(p.value)}")
        lines.append(f"cell {_boxes(p.cell)}")
        for n in range(1, horizon + 1):
            st = p.stage(n)
            if not isinstance(st, BoxUnion):
                raise FormatError(f"stage {n} of piece {p.label} is not a box union")
            lines.append(f"stage {n} {_boxes(st.boxes)}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def _stored_piece(label, value, cell, stages: dict, horizon: int) -> Piece:
    unions = {n: BoxUnion(bs) if bs else EMPTY for n, bs in stages.items()}
    missing = [n for n in range(1, horizon + 1) if n not in unions]
    if missing:
        raise FormatError(f"piece {label}: stages {missing} missing")

    def stage(n: int):
        if n < 1:
            raise ValueError("stages start at 1")
        return unions[min(n, horizon)]

    return Piece(label, value, stage, lambda x: any(b.contains(x) for b in cell), cell)


def loads(text: str) -> SimpleFunction:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != MAGIC:
        raise FormatError(f"expected header {MAGIC!r}")
    head = {}
    pieces = []
    cur = None
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if cur is None:
            if key == "piece":
                cur = {"label": _parse_label(rest), "stages": {}}
            elif key in ("label", "x_dim", "y", "anchor", "horizon", "domain", "boundary",
                         "truncated"):
                head[key] = rest
            else:
                raise FormatError(f"unexpected line {ln!r}")
            continue
        if key == "value":
            cur["value"] = _parse_value(rest)
        elif key == "cell":
            cur["cell"] = _parse_boxes(rest)
        elif key == "stage":
            n, _, boxes = rest.partition(" ")
            cur["stages"][int(n)] = _parse_boxes(boxes)
        elif key == "end":
            pieces.append(cur)
            cur = None
        else:
            raise FormatError(f"unexpected line {ln!r} in piece {cur['label']}")
    if cur is not None:
        raise FormatError("unterminated piece record")
    for k in ("y", "anchor", "horizon"):
        if k not in head:
            raise FormatError(f"missing {k!r} line")
    horizon = int(head["horizon"])
    ys = _parse_space(head["y"])
    built = []
    for p in pieces:
        if "value" not in p or "cell" not in p:
            raise FormatError(f"piece {p['label']} lacks value or cell")
        built.append(_stored_piece(p["label"], p["value"], p["cell"], p["stages"], horizon))
    x_dim = int(head.get("x_dim", 1))
    boundary = tuple(_parse_num(b) for b in head.get("boundary", "").split())
    domain = _parse_box(head["domain"]) if "domain" in head else None
    return SimpleFunction(pieces=tuple(built), anchor=_parse_value(head["anchor"]),
                          x_space=Euclidean(x_dim), y_space=ys, domain=domain,
                          boundary=boundary, label=head.get("label", "f"))


def dump(f: SimpleFunction, path: Union[str, Path], **kw) -> None:
    Path(path).write_text(dumps(f, **kw))


def load(path: Union[str, Path]) -> SimpleFunction:
    return loads(Path(path).read_text())
