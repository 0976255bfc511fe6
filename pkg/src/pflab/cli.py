"""Command line harness.

Subcommands:

- ``pflab dim SPEC --what pfl|ppfl|ml|sl|bl|regret --depth d`` exact
  label-prediction values and combinatorial dimensions.
- ``pflab rand SPEC --what pms|ppms|regret --gamma a/b --grid g`` exact
  measure-prediction values on a finite grid.
- ``pflab play SPEC [--learner NAME] [--adversary NAME]`` one full game.
- ``pflab sweep SPEC --task dim|rand --what W --horizon 1..4 ...`` CSV tables
  over cartesian parameter axes.
- ``pflab setsys SPEC`` structural report of the spec's set system.
- ``pflab replicate [--only SLUG]`` the built-in replication suite.

Exit codes: 0 success; 1 verification or replication failure; 2 spec or usage
problem; 3 budget rejection. Output is deterministic for a fixed config except
the ``runtime_ms`` column, which reports honest wall time.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from .adversaries import make_adversary
from .dimensions import (
    minimax_det_regret,
    ml_sl_bl_dim,
    naive_tree_oracle,
    pfl_dim,
    ppfl_dim,
)
from .errors import (
    BudgetExceeded,
    PflabError,
    ProtocolViolation,
    RealizabilityViolation,
    SpecError,
)
from .game import play_game
from .learners import make_learner
from .measure_dims import minimax_rand_regret, pms_dim, ppms_dim
from .measures import Measure
from .replicate import CHECKS, format_table, run_checks
from .setsystems import (
    helly_number,
    inseparability_report,
    labels_of,
    nested_empty_chain,
)
from .specfile import load_spec_file

CSV_HEADER = "spec,task,horizon,gamma,grid,value_num,value_den,runtime_ms,truncated"


# -- output plumbing ---------------------------------------------------------------


def _fmt_fraction(value) -> str:
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _csv_text(rows) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        val = Fraction(r["value"])
        gamma = r.get("gamma")
        lines.append(
            ",".join(
                [
                    r["spec"],
                    r["task"],
                    "" if r.get("horizon") is None else str(r["horizon"]),
                    "" if gamma is None else f"{Fraction(gamma).numerator}/{Fraction(gamma).denominator}",
                    "" if r.get("grid") is None else str(r["grid"]),
                    str(val.numerator),
                    str(val.denominator),
                    str(r["runtime_ms"]),
                    "1" if r.get("truncated") else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _record_text(fields) -> str:
    return "\n".join(f"{k}: {v}" for k, v in fields) + "\n"


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise PflabError(f"cannot write {out_path}: {exc}") from exc


# -- small parsers -----------------------------------------------------------------


def _ints(text: str) -> list:
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise SpecError(f"expected a comma-separated integer list, got {text!r}") from exc


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"expected a rational like 1/3, got {text!r}") from exc


def _fraction_list(text: str) -> list:
    return [_fraction_arg(part) for part in text.split(",")]


def _int_axis(text: str) -> list:
    """Parse ``1..4`` or ``1,2,3`` into an integer list."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError as exc:
            raise SpecError(f"expected a range like 1..4, got {text!r}") from exc
        if hi_i < lo_i:
            raise SpecError(f"empty range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return _ints(text)


def _measure_list(text: str) -> list:
    out = []
    for part in text.split(";"):
        out.append(Measure(tuple(_fraction_arg(w) for w in part.split(","))))
    return out


def _tree_text(tree) -> str:
    def path_key(path):
        return ".".join(str(p) for p in path) if path else "-"

    lines = [f"depth: {tree.depth}", f"q: {tree.q}"]
    for path in sorted(tree.nodes):
        lines.append(f"node {path_key(path)}: instance {tree.nodes[path]}")
    for path in sorted(tree.annotations):
        lines.append(f"reveal {path_key(path)}: label {tree.annotations[path]}")
    for path in sorted(tree.witnesses):
        members = ",".join(str(m) for m in tree.witnesses[path])
        lines.append(f"witness {path_key(path)}: members {members}")
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------------


def _cmd_dim(args) -> int:
    doc = load_spec_file(args.spec)
    spec = doc.spec
    what = args.what
    if what in ("pfl", "ppfl", "regret") and args.depth is None:
        raise SpecError(f"--depth is required for --what {what}")
    t0 = time.monotonic()
    if what == "pfl":
        value = pfl_dim(spec, args.depth, budget=args.budget)
    elif what == "ppfl":
        value = ppfl_dim(
            spec,
            _ints(args.prefix_x),
            _ints(args.prefix_y),
            _ints(args.prefix_reveal),
            args.depth,
            budget=args.budget,
        )
    elif what == "regret":
        value = minimax_det_regret(spec, args.depth, budget=args.budget)
    else:
        value = ml_sl_bl_dim(spec, what, cap=args.depth, budget=args.budget)
    ms = int((time.monotonic() - t0) * 1000)

    witness_text = None
    if args.witness:
        if what not in ("pfl", "regret"):
            raise SpecError("--witness is only available for --what pfl or regret")
        tree = naive_tree_oracle(spec, args.depth, value)
        if tree is None:
            raise PflabError(
                f"no witness tree found at the certified value {value}; "
                "this indicates an internal inconsistency"
            )
        witness_text = _tree_text(tree)

    if args.format == "csv":
        text = _csv_text(
            [
                {
                    "spec": args.spec,
                    "task": f"dim/{what}",
                    "horizon": args.depth,
                    "value": value,
                    "runtime_ms": ms,
                }
            ]
        )
    else:
        fields = [
            ("spec", args.spec),
            ("task", f"dim/{what}"),
        ]
        if args.depth is not None:
            fields.append(("depth", args.depth))
        fields += [("value", value), ("runtime_ms", ms)]
        text = _record_text(fields)
        if witness_text is not None:
            text += witness_text
    _emit(text, args.out)
    return 0


def _cmd_rand(args) -> int:
    doc = load_spec_file(args.spec)
    spec = doc.spec
    what = args.what
    depth = args.depth if args.depth is not None else spec.horizon
    grid = args.grid if args.grid is not None else spec.measure_grid
    if what in ("pms", "ppms") and args.gamma is None:
        raise SpecError(f"--gamma is required for --what {what}")
    gamma = _fraction_arg(args.gamma) if args.gamma is not None else None
    t0 = time.monotonic()
    if what == "pms":
        value = pms_dim(spec, depth, gamma, g=grid, budget=args.budget)
    elif what == "ppms":
        value = ppms_dim(
            spec,
            _ints(args.prefix_x),
            _measure_list(args.prefix_measure) if args.prefix_measure else [],
            _ints(args.prefix_reveal),
            depth,
            gamma,
            g=grid,
            budget=args.budget,
        )
    else:
        value = minimax_rand_regret(spec, depth, g=grid, budget=args.budget)
    ms = int((time.monotonic() - t0) * 1000)

    if args.format == "csv":
        text = _csv_text(
            [
                {
                    "spec": args.spec,
                    "task": f"rand/{what}",
                    "horizon": depth,
                    "gamma": gamma,
                    "grid": grid,
                    "value": value,
                    "runtime_ms": ms,
                    "truncated": True,
                }
            ]
        )
    else:
        fields = [("spec", args.spec), ("task", f"rand/{what}"), ("depth", depth)]
        if gamma is not None:
            fields.append(("gamma", _fmt_fraction(gamma)))
        fields += [
            ("grid", grid),
            ("value", _fmt_fraction(value)),
            ("runtime_ms", ms),
            ("truncated", "1"),
        ]
        text = _record_text(fields)
    _emit(text, args.out)
    return 0


def _strategy_choice(flag_name, block, kind):
    if flag_name is not None:
        if block is not None and block["name"] == flag_name:
            return flag_name, block.get("params", {})
        return flag_name, {}
    if block is not None:
        return block["name"], block.get("params", {})
    raise SpecError(
        f"play needs {kind}: add a `{kind}` block to the spec file or pass --{kind}"
    )


def _cmd_play(args) -> int:
    doc = load_spec_file(args.spec)
    spec = doc.spec
    lname, lparams = _strategy_choice(args.learner, doc.learner, "learner")
    aname, aparams = _strategy_choice(args.adversary, doc.adversary, "adversary")
    learner = make_learner(lname, dict(lparams), spec)
    adversary = make_adversary(aname, dict(aparams), spec)
    t0 = time.monotonic()
    result = play_game(spec, learner, adversary)
    ms = int((time.monotonic() - t0) * 1000)

    public = hasattr(result, "branches")
    if public:
        loss, comparator, regret = (
            result.expected_loss,
            result.expected_comparator,
            result.expected_regret,
        )
    else:
        loss, comparator, regret = result.loss, result.comparator, result.regret

    if args.format == "csv":
        text = _csv_text(
            [
                {
                    "spec": args.spec,
                    "task": "play",
                    "horizon": spec.horizon,
                    "value": regret,
                    "runtime_ms": ms,
                }
            ]
        )
    else:
        fields = [
            ("spec", args.spec),
            ("task", "play"),
            ("learner", lname),
            ("adversary", aname),
            ("horizon", spec.horizon),
        ]
        if public:
            fields.append(("branches", len(result.branches)))
        fields += [
            ("loss", _fmt_fraction(loss)),
            ("comparator", _fmt_fraction(comparator)),
            ("regret", _fmt_fraction(regret)),
            ("runtime_ms", ms),
        ]
        text = _record_text(fields)
        if not public:
            lines = []
            for t, (x, pred, y, m) in enumerate(
                zip(result.instances, result.predictions, result.reveals, result.sets)
            ):
                shown = (
                    _fmt_fraction(pred)
                    if isinstance(pred, int)
                    else "(" + ",".join(_fmt_fraction(w) for w in pred.weights) + ")"
                )
                reveal = "-" if y is None else str(y)
                lines.append(
                    f"round {t}: instance {x} predict {shown} reveal {reveal} "
                    f"set {{{','.join(str(b) for b in labels_of(m))}}}"
                )
            text += "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def _cmd_sweep(args) -> int:
    doc = load_spec_file(args.spec)
    spec = doc.spec
    horizons = _int_axis(args.horizon)
    if not horizons:
        raise SpecError("sweep needs a nonempty --horizon axis")
    rows = []
    if args.task == "dim":
        if args.what not in ("pfl", "regret"):
            raise SpecError("sweep --task dim supports --what pfl or regret")
        for T in horizons:
            t0 = time.monotonic()
            value = (
                pfl_dim(spec, T, budget=args.budget)
                if args.what == "pfl"
                else minimax_det_regret(spec, T, budget=args.budget)
            )
            ms = int((time.monotonic() - t0) * 1000)
            rows.append(
                {
                    "spec": args.spec,
                    "task": f"dim/{args.what}",
                    "horizon": T,
                    "value": value,
                    "runtime_ms": ms,
                }
            )
    else:
        if args.what not in ("pms", "regret"):
            raise SpecError("sweep --task rand supports --what pms or regret")
        gammas = _fraction_list(args.gamma) if args.gamma else [None]
        grids = _ints(args.grid) if args.grid else [spec.measure_grid]
        if args.what == "pms" and gammas == [None]:
            raise SpecError("sweep --task rand --what pms needs a --gamma axis")
        for T in horizons:
            for gamma in gammas:
                for g in grids:
                    t0 = time.monotonic()
                    if args.what == "pms":
                        value = pms_dim(spec, T, gamma, g=g, budget=args.budget)
                    else:
                        value = minimax_rand_regret(spec, T, g=g, budget=args.budget)
                    ms = int((time.monotonic() - t0) * 1000)
                    rows.append(
                        {
                            "spec": args.spec,
                            "task": f"rand/{args.what}",
                            "horizon": T,
                            "gamma": gamma,
                            "grid": g,
                            "value": value,
                            "runtime_ms": ms,
                            "truncated": True,
                        }
                    )
    _emit(_csv_text(rows), args.out)
    return 0


def _cmd_setsys(args) -> int:
    doc = load_spec_file(args.spec)
    system = doc.spec.set_system
    h = helly_number(system)
    p = args.p if args.p is not None else h
    report = inseparability_report(system, p, truncated=args.truncated)
    chain = nested_empty_chain(system)
    chain_text = (
        "none" if chain is None else " > ".join(str(i) for i in chain)
    )
    fields = [
        ("spec", args.spec),
        ("task", "setsys"),
        ("labels", system.n_labels),
        ("sets", len(system.members())),
        ("helly", report["helly"]),
        ("nested_empty_chain", chain_text),
        ("condition1_holds", report["condition1_holds"]),
        ("condition2_holds", f"{report['condition2_holds']} (witness p = {p})"),
        ("truncated", report["truncated"]),
        ("union_closed", system.union_closed()),
        ("singletons_included", system.singletons_included()),
    ]
    _emit(_record_text(fields), args.out)
    return 0


def _cmd_replicate(args) -> int:
    known = {slug for slug, _ in CHECKS}
    only = None
    if args.only:
        unknown = [s for s in args.only if s not in known]
        if unknown:
            raise SpecError(
                f"unknown check(s) {', '.join(unknown)}; available: {', '.join(sorted(known))}"
            )
        only = set(args.only)
    results = run_checks(only=only)
    text = format_table(results) + "\n"
    _emit(text, args.out)
    failed = [r.slug for r in results if not r.passed]
    if failed:
        sys.stderr.write(f"failed: {', '.join(failed)}\n")
        return 1
    return 0


# -- wiring ------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pflab",
        description="Exact partial-feedback online learning games at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("spec", help="path to a YAML game spec")
        p.add_argument("-o", "--out", default=None, help="write output to a file")

    p = sub.add_parser("dim", help="label-prediction values and dimensions")
    common(p)
    p.add_argument("--what", required=True, choices=["pfl", "ppfl", "ml", "sl", "bl", "regret"])
    p.add_argument("--depth", type=int, default=None, help="game depth (search cap for ml/sl/bl)")
    p.add_argument("--budget", type=int, default=None, help="override the state budget")
    p.add_argument("--witness", action="store_true", help="also print a shattering tree")
    p.add_argument("--prefix-x", default="", help="ppfl prefix instances, comma-separated")
    p.add_argument("--prefix-y", default="", help="ppfl prefix predictions, comma-separated")
    p.add_argument("--prefix-reveal", default="", help="ppfl prefix reveals, comma-separated")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=_cmd_dim)

    p = sub.add_parser("rand", help="measure-prediction values on a grid")
    common(p)
    p.add_argument("--what", required=True, choices=["pms", "ppms", "regret"])
    p.add_argument("--gamma", default=None, help="event threshold, a rational like 1/3")
    p.add_argument("--grid", type=int, default=None, help="grid denominator (default: spec grid)")
    p.add_argument("--depth", type=int, default=None, help="rounds (default: spec horizon)")
    p.add_argument("--budget", type=int, default=None, help="override the state budget")
    p.add_argument("--prefix-x", default="", help="ppms prefix instances, comma-separated")
    p.add_argument(
        "--prefix-measure",
        default="",
        help="ppms prefix measures; semicolon-separated, each a comma list of rationals",
    )
    p.add_argument("--prefix-reveal", default="", help="ppms prefix reveals, comma-separated")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=_cmd_rand)

    p = sub.add_parser("play", help="play one game between named strategies")
    common(p)
    p.add_argument("--learner", default=None, help="learner name (overrides the spec block)")
    p.add_argument("--adversary", default=None, help="adversary name (overrides the spec block)")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("sweep", help="CSV table over parameter axes")
    common(p)
    p.add_argument("--task", required=True, choices=["dim", "rand"])
    p.add_argument("--what", required=True, help="pfl|regret (dim) or pms|regret (rand)")
    p.add_argument("--horizon", required=True, help="axis like 1..4 or 1,2,3")
    p.add_argument("--gamma", default=None, help="comma-separated rationals")
    p.add_argument("--grid", default=None, help="comma-separated grid denominators")
    p.add_argument("--budget", type=int, default=None, help="override the state budget")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("setsys", help="structural report of the spec's set system")
    common(p)
    p.add_argument("--p", type=int, default=None, help="overlap witness (default: the computed value)")
    p.add_argument(
        "--truncated",
        action="store_true",
        help="mark the system as a truncation of an infinite family in the report",
    )
    p.set_defaults(func=_cmd_setsys)

    p = sub.add_parser("replicate", help="run the built-in replication suite")
    common(p, spec=False)
    p.add_argument("--only", action="append", default=None, help="run one named check (repeatable)")
    p.set_defaults(func=_cmd_replicate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget rejected: {exc}\n")
        return 3
    except (ProtocolViolation, RealizabilityViolation) as exc:
        sys.stderr.write(f"verification failure: {exc}\n")
        return 1
    except SpecError as exc:
        sys.stderr.write(f"spec error: {exc}\n")
        return 2
    except PflabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
