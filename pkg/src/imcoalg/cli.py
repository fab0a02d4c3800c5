"""Command-line entry point.

Subcommands: check, mc, bisim, complex, lift, freealg, export. Every
command prints a deterministic human-readable report (one PASS/FAIL line
per check) and can write the same report as JSON. Exit codes are a stable
contract: 0 all checks pass, 1 check failure, 2 usage or parse error,
3 resource cap exceeded.

Timing is measured but only emitted under --timing so that identical
inputs produce byte-identical output.
"""

import argparse
import hashlib
import json
import os
import sys
import time

from .bisim import (
    coalgebraic_bisim_check,
    distinguishing_formula,
    is_box_bisimulation,
    largest_bisimulation,
)
from .complexes import (
    build_complex,
    check_limit_pmorphism,
    lift_map,
    verify_complex,
)
from .config import DEFAULT_CAPS
from .errors import (
    CapExceeded,
    ConstructionError,
    FormulaSyntaxError,
    ImcoalgError,
    NotAntisymmetric,
    NotTransitive,
    ParseError,
    ProjectionNotPMorphism,
)
from .export import (
    JSON_SCHEMA,
    complex_to_dot,
    complex_to_json_dict,
    dump_json,
    frame_to_dot,
    frame_to_json_dict,
    free_stages_to_dot,
    free_stages_to_json_dict,
)
from .framefile import parse_frame_file
from .frames import frame_to_lifted, frame_to_upmap, mix_law_witness
from .freealg import (
    build_free_stages,
    check_modal_stage_properties,
    generator_poset,
)
from .heyting import up_functor
from .logic import enumerate_formulas, parse, print_formula, truth_mask
from .poset import format_label, terminal_map

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3


class Report:
    """Accumulates named checks; serializable deterministically."""

    def __init__(self, subcommand, inputs):
        self.subcommand = subcommand
        self.inputs = inputs
        self.checks = []
        self.lines = []
        self.started = time.monotonic()

    def check(self, name, passed, detail=None):
        self.checks.append(
            {"name": name, "pass": bool(passed), "detail": detail}
        )
        mark = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail and not passed else ""
        self.lines.append(f"{mark} {name}{suffix}")
        return passed

    def info(self, line):
        self.lines.append(line)

    @property
    def ok(self):
        return all(c["pass"] for c in self.checks)

    def to_dict(self, timing=False):
        doc = {
            "schema": JSON_SCHEMA,
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "checks": self.checks,
            "ok": self.ok,
        }
        if timing:
            doc["timing_ms"] = round(
                (time.monotonic() - self.started) * 1000.0, 3
            )
        return doc

    def emit(self, args):
        for line in self.lines:
            print(line)
        if getattr(args, "timing", False):
            print(
                f"elapsed: {(time.monotonic() - self.started) * 1000.0:.1f} ms"
            )
        if getattr(args, "report", None):
            with open(args.report, "w") as fh:
                fh.write(dump_json(self.to_dict(timing=args.timing)))
        return EXIT_OK if self.ok else EXIT_CHECK_FAILED


def _digest(data):
    return hashlib.sha256(data.encode()).hexdigest()[:16]


def _read_file(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0)


def _caps(args):
    caps = DEFAULT_CAPS
    env = os.environ.get("IMCOALG_MAX_STAGE")
    if env is not None:
        caps = caps.with_stage(int(env))
    if getattr(args, "max_stage", None) is not None:
        caps = caps.with_stage(args.max_stage)
    if getattr(args, "max_depth", None) is not None:
        caps = caps.with_depth(args.max_depth)
    return caps


def _load(path):
    return parse_frame_file(_read_file(path))


def _order_check(report, ff):
    """Build the poset, folding order-axiom violations into the report."""
    try:
        poset = ff.build_poset()
    except (NotAntisymmetric, NotTransitive) as exc:
        report.check("order-axioms", False, str(exc))
        return None
    report.check("order-axioms", True)
    return poset


# -- subcommands -------------------------------------------------------------


def cmd_check(args):
    text = _read_file(args.file)
    ff = parse_frame_file(text)
    report = Report("check", {"file": _digest(text)})
    poset = _order_check(report, ff)
    if poset is None:
        return report.emit(args)
    frame = ff.build_frame(poset)
    witness = mix_law_witness(frame)
    report.check(
        "mix-law",
        witness is None,
        None if witness is None else f"witness {witness}",
    )
    try:
        ff.valuation_masks(poset, close=args.close_valuations)
        report.check("valuation-persistence", True)
    except ConstructionError as exc:
        report.check("valuation-persistence", False, str(exc))
    if ff.nbhd:
        try:
            ff.build_nbhd_frame(
                poset, close=args.close_valuations, strict=args.strict_nbhd
            )
            report.check("nbhd-wellformed", True)
        except ConstructionError as exc:
            report.check("nbhd-wellformed", False, str(exc))
    return report.emit(args)


def cmd_mc(args):
    text = _read_file(args.file)
    ff = parse_frame_file(text)
    phi = parse(args.formula)
    report = Report(
        "mc", {"file": _digest(text), "formula": print_formula(phi)}
    )
    poset = _order_check(report, ff)
    if poset is None:
        return report.emit(args)
    frame = ff.build_frame(poset)
    witness = mix_law_witness(frame)
    report.check(
        "mix-law",
        witness is None,
        None if witness is None else f"witness {witness}",
    )
    model = ff.build_model(close=args.close_valuations, frame=frame)
    mask = truth_mask(model, phi)
    report.info(f"formula: {print_formula(phi)}")
    for i, lab in enumerate(poset.labels):
        holds = "true " if (mask >> i) & 1 else "false"
        report.info(f"  {format_label(lab)}: {holds}")
    report.check(
        "formula-valid",
        mask == poset.full_mask,
        f"holds at {mask.bit_count()}/{poset.n} points",
    )
    return report.emit(args)


def _build_checked_frame(report, ff, name):
    poset = _order_check(report, ff)
    if poset is None:
        return None
    frame = ff.build_frame(poset)
    witness = mix_law_witness(frame)
    if not report.check(
        f"mix-law-{name}",
        witness is None,
        None if witness is None else f"witness {witness}",
    ):
        return None
    return frame


def cmd_bisim(args):
    text1 = _read_file(args.file1)
    text2 = _read_file(args.file2)
    ff1 = parse_frame_file(text1)
    ff2 = parse_frame_file(text2)
    report = Report(
        "bisim", {"file1": _digest(text1), "file2": _digest(text2)}
    )
    frame1 = _build_checked_frame(report, ff1, "left")
    frame2 = _build_checked_frame(report, ff2, "right")
    if frame1 is None or frame2 is None:
        return report.emit(args)
    bis = largest_bisimulation(frame1, frame2)
    pairs = bis.label_pairs()
    report.info(f"largest bisimulation: {len(pairs)} pairs")
    for a, b in pairs:
        report.info(f"  {format_label(a)} ~ {format_label(b)}")
    report.check("largest-is-bisimulation", is_box_bisimulation(bis))
    try:
        agrees = coalgebraic_bisim_check(bis, depth=args.depth)
        report.check("coalgebraic-agreement", agrees, f"depth {args.depth}")
    except ProjectionNotPMorphism as exc:
        report.check("coalgebraic-agreement", False, str(exc))
    if args.distinguish is not None:
        model1 = ff1.build_model(close=args.close_valuations, frame=frame1)
        model2 = ff2.build_model(close=args.close_valuations, frame=frame2)
        letters = sorted(set(model1.valuation) & set(model2.valuation))
        formulas = list(enumerate_formulas(letters, args.distinguish))
        related = set(bis.pairs)
        for x in range(frame1.poset.n):
            for y in range(frame2.poset.n):
                if (x, y) in related:
                    continue
                phi = distinguishing_formula(
                    model1,
                    frame1.poset.labels[x],
                    model2,
                    frame2.poset.labels[y],
                    formulas,
                )
                shown = print_formula(phi) if phi is not None else "(none found)"
                report.info(
                    f"distinguish {format_label(frame1.poset.labels[x])} vs "
                    f"{format_label(frame2.poset.labels[y])}: {shown}"
                )
    return report.emit(args)


def cmd_complex(args):
    text = _read_file(args.file)
    ff = parse_frame_file(text)
    report = Report(
        "complex", {"file": _digest(text), "depth": args.depth}
    )
    poset = _order_check(report, ff)
    if poset is None:
        return report.emit(args)
    caps = _caps(args)
    fv = up_functor(poset)
    cx = build_complex(terminal_map(fv.poset), args.depth, caps)
    report.info(f"stage sizes: {[s.n for s in cx.stages]}")
    for i in range(1, len(cx.stages)):
        r = cx.root_maps[i]
        report.info(
            f"  r_{i}: stage {i} ({cx.stages[i].n} elements) -> "
            f"stage {i - 1} ({cx.stages[i - 1].n} elements)"
        )
    report.check("stages-valid", verify_complex(cx))
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(complex_to_dot(cx))
        report.info(f"wrote {args.dot}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(dump_json(complex_to_json_dict(cx)))
        report.info(f"wrote {args.json}")
    return report.emit(args)


def cmd_lift(args):
    text = _read_file(args.file)
    ff = parse_frame_file(text)
    report = Report("lift", {"file": _digest(text), "depth": args.depth})
    frame = _build_checked_frame(report, ff, "frame")
    if frame is None:
        return report.emit(args)
    caps = _caps(args)
    lifted = frame_to_lifted(frame, args.depth)
    for x in range(frame.poset.n):
        report.info(f"{format_label(frame.poset.labels[x])}:")
        for level in range(1, args.depth + 1):
            report.info(
                f"  level {level}: "
                f"{_value_str(lifted.base, level, lifted.value(level, x))}"
            )
    report.check("tower-compatible", lifted.compatible())
    report.check("coords-monotone", lifted.coords_monotone())
    fv = up_functor(frame.poset)
    cx = build_complex(terminal_map(fv.poset), args.depth, caps)
    resolved = lift_map(frame_to_upmap(frame, fv), cx, args.depth)
    report.check("limit-pmorphism", check_limit_pmorphism(resolved, args.depth))
    return report.emit(args)


def _value_str(base, level, value):
    if level == 1:
        return format_label(base.labels[value])
    return (
        "{"
        + ",".join(
            sorted(_value_str(base, level - 1, v) for v in value)
        )
        + "}"
    )


def cmd_freealg(args):
    report = Report(
        "freealg",
        {
            "generators": args.generators,
            "stages": args.stages,
            "inner_depth": args.inner_depth,
        },
    )
    variables = [f"p{i}" for i in range(args.generators)]
    base = generator_poset(variables)
    stages = build_free_stages(base, args.stages, args.inner_depth, _caps(args))
    report.info(f"stage sizes: {[s.poset.n for s in stages]}")
    for stage in stages[1:]:
        stage_report = check_modal_stage_properties(stage)
        for name, passed in stage_report.checks.items():
            report.check(
                f"stage{stage.index}-{name}",
                passed,
                stage_report.counterexamples.get(name),
            )
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(free_stages_to_dot(stages))
        report.info(f"wrote {args.dot}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(dump_json(free_stages_to_json_dict(stages)))
        report.info(f"wrote {args.json}")
    return report.emit(args)


def cmd_export(args):
    text = _read_file(args.file)
    ff = parse_frame_file(text)
    report = Report("export", {"file": _digest(text)})
    poset = _order_check(report, ff)
    if poset is None:
        return report.emit(args)
    frame = ff.build_frame(poset)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(frame_to_dot(frame))
        report.info(f"wrote {args.dot}")
    if args.json:
        vals = ff.valuation_masks(poset, close=args.close_valuations)
        doc = frame_to_json_dict(
            frame, valuations=vals, nbhd=ff.nbhd if ff.nbhd else None
        )
        with open(args.json, "w") as fh:
            fh.write(dump_json(doc))
        report.info(f"wrote {args.json}")
    return report.emit(args)


# -- argument parsing ---------------------------------------------------------


def _add_common(sub, valuations=True):
    sub.add_argument("--report", metavar="OUT", help="write the report as JSON")
    sub.add_argument("--timing", action="store_true", help="include timing")
    if valuations:
        sub.add_argument(
            "--close-valuations",
            action="store_true",
            help="close valuation sets upward instead of rejecting them",
        )


def _add_caps(sub):
    sub.add_argument("--max-stage", type=int, metavar="N",
                     help=f"stage element cap (default {DEFAULT_CAPS.max_stage})")
    sub.add_argument("--max-depth", type=int, metavar="N",
                     help=f"complex depth cap (default {DEFAULT_CAPS.max_depth})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="imcoalg",
        description="finite workbench for intuitionistic modal frames",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check", help="order axioms, mix law, valuations")
    p.add_argument("file")
    p.add_argument("--strict-nbhd", action="store_true",
                   help="require neighbourhood families to be up-closed")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("mc", help="model-check a formula")
    p.add_argument("file")
    p.add_argument("formula")
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = subs.add_parser("bisim", help="largest bisimulation of two frames")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--depth", type=int, default=2,
                   help="coalgebraic comparison depth (default 2)")
    p.add_argument("--distinguish", type=int, metavar="D",
                   help="search distinguishing formulas up to D connectives")
    _add_common(p)
    p.set_defaults(func=cmd_bisim)

    p = subs.add_parser("complex", help="terminal complex over the frame's upsets")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--dot", metavar="OUT")
    p.add_argument("--json", metavar="OUT")
    _add_caps(p)
    _add_common(p, valuations=False)
    p.set_defaults(func=cmd_complex)

    p = subs.add_parser("lift", help="lift the frame's coalgebra map")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=2)
    _add_caps(p)
    _add_common(p, valuations=False)
    p.set_defaults(func=cmd_lift)

    p = subs.add_parser("freealg", help="truncated free-algebra stages")
    p.add_argument("--generators", type=int, default=1)
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--inner-depth", type=int, default=1)
    p.add_argument("--dot", metavar="OUT")
    p.add_argument("--json", metavar="OUT")
    _add_caps(p)
    _add_common(p, valuations=False)
    p.set_defaults(func=cmd_freealg)

    p = subs.add_parser("export", help="write DOT or JSON for a frame file")
    p.add_argument("file")
    p.add_argument("--dot", metavar="OUT")
    p.add_argument("--json", metavar="OUT")
    _add_common(p)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, FormulaSyntaxError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImcoalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
