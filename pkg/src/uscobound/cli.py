"""Command line front end: ``uscobound {construct,check,converge,demo}``.

Exit codes: 0 Certified / ok, 1 Falsified, 2 Inconclusive, 3 bad config.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import textformat
from .approx import (
    FunctionSequence,
    GluingScheme,
    PipelineConfig,
    approximate_pipeline,
    bound_compliance,
    continuous_sequence,
    convergence_rows,
    default_plan,
    diagonal_glue,
)
from .fixtures import FIXTURES, Fixture, get_fixture
from .metric import Box, Euclidean, point_to_json
from .setvalued import (
    Outcome,
    PreconditionError,
    ProbeError,
    ProbePlan,
    Verdict,
    check_usco,
    check_usco_bounded,
    graph_closure_hull,
    sample_graph,
)
from .simplefn import BaireOneTarget, SimpleFunction

EXIT = {Outcome.CERTIFIED: 0, Outcome.FALSIFIED: 1, Outcome.INCONCLUSIVE: 2}
BAD_CONFIG = 3
CSV_COLUMNS = ["n", "x", "error", "gamma", "inG", "coefficient"]
WINDOW = (-2.0, 2.0)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_CONFIG, f"{self.prog}: error: {message}\n")


def _eps_schedule(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps schedule {text!r}") from None
    return vals


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--fixture", help=f"one of: {', '.join(FIXTURES)}")
    src.add_argument("--input", type=Path, help="simple function in text format")
    common.add_argument("--member", help="fixture member (default: its main function)")
    common.add_argument("--horizon", type=_positive_int, default=64)
    common.add_argument("--grid", type=_positive_float, default=0.01,
                        help="grid spacing for tables and hulls")
    common.add_argument("--probes", type=_positive_int, help="number of probe sequences")
    common.add_argument("--prefix", type=_positive_int, help="probe prefix length")
    common.add_argument("--eps-schedule", type=_eps_schedule,
                        help="comma separated, strictly decreasing")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("out"))

    p = _Parser(prog="uscobound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("construct", parents=[common],
                       help="continuous sequence for a simple function, with CSV table")
    c.add_argument("--pipeline", action="store_true",
                   help="run the full approximation pipeline instead")
    k = sub.add_parser("check", parents=[common], help="usco-boundedness verdict")
    k.add_argument("--hull", action="store_true",
                   help="check the graph-closure hull as a set-valued map")
    sub.add_parser("converge", parents=[common], help="diagonal gluing diagnostics").add_argument(
        "--scheme", choices=["auto", "synthetic"], default="auto")
    d = sub.add_parser("demo", parents=[common], help="expected vs actual verdicts")
    d.add_argument("--all", action="store_true")
    return p


# ---------------------------------------------------------------------------
# helpers


def _plan(args, base: ProbePlan) -> ProbePlan:
    kw = {"seed": args.seed, "horizon": args.horizon}
    if args.probes is not None:
        kw["n_sequences"] = args.probes
    if args.prefix is not None:
        kw["prefix"] = args.prefix
    if args.eps_schedule is not None:
        kw["eps_schedule"] = args.eps_schedule
    try:
        return dataclasses.replace(base, **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _source(args):
    """(func, y_space, plan, label, fixture or None)."""
    if args.input is not None:
        if args.member:
            raise ConfigError("--member applies to fixtures only")
        try:
            f = textformat.load(args.input)
        except (OSError, textformat.FormatError) as exc:
            raise ConfigError(f"cannot read {args.input}: {exc}") from None
        return f, f.y_space, _plan(args, default_plan(f)), f.label, None
    if args.fixture is None:
        raise ConfigError("pass --fixture or --input")
    try:
        fx = get_fixture(args.fixture)
        m = fx.member(args.member)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    return m.func, fx.y_space, _plan(args, m.plan), f"{fx.name}:{m.name}", fx


def _grid(args, f) -> list:
    dom = getattr(f, "domain", None)
    lo, hi = (dom.lo[0], dom.hi[0]) if dom is not None and dom.is_bounded() else WINDOW
    n = int(round((hi - lo) / args.grid)) + 1
    if n > 1_000_000:
        raise ConfigError("grid too fine")
    return [float(v) for v in np.linspace(lo, hi, n)]


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list, dict)):
        return json.dumps(point_to_json(v) if not isinstance(v, dict) else v)
    return v


def write_rows(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_csv_cell(r[c]) for c in CSV_COLUMNS])


def _report(verdict: Verdict, path: Path, extra: dict = None) -> int:
    obj = verdict.to_json()
    if extra:
        obj.update(extra)
    _write_json(path, obj)
    line = f"{verdict.outcome.value}"
    if verdict.bound is not None:
        line += f" bound={verdict.bound:g}"
    if verdict.witness is not None:
        line += f" witness: {verdict.witness.reason}"
    print(line)
    return EXIT[verdict.outcome]


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    f, ys, plan, label, fx = _source(args)
    bound = None
    if fx is not None:
        bound = fx.member(args.member).bound
    if args.hull:
        grid = _grid(args, f)
        phi = graph_closure_hull(sample_graph(f, grid), args.grid)
        if plan.domain is None:
            plan = dataclasses.replace(plan, domain=Box.closed(grid[0], grid[-1]))
        verdict = check_usco(phi, plan)
    else:
        verdict = check_usco_bounded(f, plan, ys, bound=bound)
    print(f"{label}: ", end="")
    return _report(verdict, args.out / "verdict.json", {"input": label})


def cmd_construct(args) -> int:
    f, ys, plan, label, fx = _source(args)
    if args.pipeline:
        return _construct_pipeline(args, f, ys, plan, label)
    bound = fx.member(args.member).bound if fx is not None else None
    pre = check_usco_bounded(f, plan, ys, bound=bound)
    if not pre.certified:
        print(f"{label}: precondition not met: ", end="")
        return _report(pre, args.out / "summary.json",
                       {"input": label, "stage": "precondition"})
    if not isinstance(f, SimpleFunction):
        raise ConfigError(f"{label} is not a simple function; use --pipeline")
    args.out.mkdir(parents=True, exist_ok=True)
    textformat.dump(f, args.out / "function.simple", horizon=args.horizon,
                    max_pieces=None if f.finite else args.horizon + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seq = continuous_sequence(f.with_verdict(pre), plan)
    rows = convergence_rows(seq, _grid(args, f), args.horizon, limit=f)
    write_rows(args.out / "construct.csv", rows)
    last = [r["error"] for r in rows if r["n"] == args.horizon]
    print(f"{label}: {len(rows)} rows, max error at n={args.horizon}: {max(last):g}")
    print("sequence: ", end="")
    return _report(seq.verdict, args.out / "summary.json",
                   {"input": label, "stage": "sequence", "precondition": pre.to_json(),
                    "rows": len(rows)})


def _construct_pipeline(args, f, ys, plan, label) -> int:
    simple = f if isinstance(f, SimpleFunction) else None
    target = BaireOneTarget(func=f, y_space=ys, simple=simple,
                            boundary=tuple(plan.targets), label=label)
    try:
        h = approximate_pipeline(target, PipelineConfig(horizon=args.horizon, plan=plan))
    except PreconditionError as exc:
        print(f"{label}: precondition not met: {exc}")
        if exc.verdict is not None:
            return _report(exc.verdict, args.out / "summary.json",
                           {"input": label, "stage": "precondition"})
        raise ConfigError(str(exc)) from None
    rows = convergence_rows(h, _grid(args, f), args.horizon, limit=f)
    write_rows(args.out / "construct.csv", rows)
    print(f"{label}: {len(rows)} rows; sequence: ", end="")
    return _report(h.verdict, args.out / "summary.json",
                   {"input": label, "stage": "pipeline", "rows": len(rows)})


def _synthetic_scheme(levels: int) -> GluingScheme:
    def level(m):
        c = 2.0 ** (-m - 1)
        return FunctionSequence(lambda n, c=c: (lambda x: c), limit=lambda x, c=c: c), c
    return GluingScheme(level, levels, Euclidean(1))


def _noncomplete_scheme(fx: Fixture, levels: int) -> GluingScheme:
    ys = fx.y_space
    top = fx.meta["n_members"]

    def level(m):
        fm = fx.member(f"f{m}").func
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            seq = continuous_sequence(fm, check=False)
        # sup |f_m - f| = |sum_{k>m} 2^-k e_k| = 2^-m / sqrt(3)
        return seq, 2.0 ** -m / math.sqrt(3)

    return GluingScheme(level, min(levels, top), ys)


def cmd_converge(args) -> int:
    m_max = 6
    if args.scheme == "synthetic" or args.fixture is None and args.input is None:
        scheme = _synthetic_scheme(args.horizon)
        h = diagonal_glue(scheme, limit=lambda x: 0.0)
        grid = [float(v) for v in np.linspace(*WINDOW, 5)]
        label, extra = "synthetic", {}
    elif args.fixture == "noncomplete":
        fx = get_fixture("noncomplete")
        h = diagonal_glue(_noncomplete_scheme(fx, args.horizon), limit=fx.member("f").func)
        grid = _grid(args, None)
        limit_verdict = fx.check("f", _plan(args, fx.member("f").plan))
        label = "noncomplete"
        extra = {"limit_verdict": limit_verdict.to_json()}
        print(f"noncomplete: limit f is {limit_verdict.outcome.value}")
    else:
        f, ys, plan, label, _ = _source(args)
        simple = f if isinstance(f, SimpleFunction) else None
        target = BaireOneTarget(func=f, y_space=ys, simple=simple,
                                boundary=tuple(plan.targets), label=label)
        try:
            h = approximate_pipeline(target, PipelineConfig(horizon=args.horizon, plan=plan))
        except PreconditionError as exc:
            print(f"{label}: precondition not met: {exc}")
            if exc.verdict is not None:
                return _report(exc.verdict, args.out / "compliance.json",
                               {"input": label, "stage": "precondition"})
            raise ConfigError(str(exc)) from None
        grid = _grid(args, f)
        extra = {"sequence_verdict": h.verdict.to_json()}
    rows = convergence_rows(h, grid, args.horizon)
    write_rows(args.out / "converge.csv", rows)
    report = bound_compliance(h, grid, args.horizon, m_max)
    report.update({"input": label, "horizon": args.horizon, "m_max": m_max}, **extra)
    _write_json(args.out / "compliance.json", report)
    ok = not report["failures"]
    print(f"{label}: {len(rows)} rows; bound compliance {report['passed']}/{report['checked']}"
          f" ({report['unreached']} unreached)")
    return 0 if ok else 1


def _actual(fx: Fixture, name: str, args) -> Verdict:
    m = fx.member(name)
    return fx.check(name, _plan(args, m.plan))


def cmd_demo(args) -> int:
    if args.all or args.fixture is None:
        names = list(FIXTURES)
    else:
        names = [args.fixture]
    mismatches = 0
    rows = []
    for name in names:
        try:
            fx = get_fixture(name)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        members = [args.member] if args.member else list(fx.members)
        for mn in members:
            m = fx.member(mn)
            v = _actual(fx, mn, args)
            ok = v.outcome is m.expected
            mismatches += not ok
            rows.append({"fixture": name, "member": mn, "expected": m.expected.value,
                         "actual": v.outcome.value, "match": ok})
            print(f"{name:12s} {mn:4s} expected {m.expected.value:12s} "
                  f"actual {v.outcome.value:12s} {'ok' if ok else 'MISMATCH'}")
    _write_json(args.out / "demo.json", rows)
    print(f"{len(rows)} checks, {mismatches} mismatches")
    return 0 if mismatches == 0 else 1


COMMANDS = {"check": cmd_check, "construct": cmd_construct, "converge": cmd_converge,
            "demo": cmd_demo}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"uscobound: {exc}", file=sys.stderr)
        return BAD_CONFIG
    except ProbeError as exc:
        print(f"uscobound: probing failed: {exc}", file=sys.stderr)
        return BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
