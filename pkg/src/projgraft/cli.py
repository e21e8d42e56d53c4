"""Command-line front end.

Exit codes: 0 success, 1 a semantic check failed, 2 the input could not be read.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import brancov, documents, foldgraph, graftcalc, multiarc, schottky, svg
from .errors import InputError, ProjGraftError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SEED_ENV = "SCHOTTKY_SEED"


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[str]
    out: Optional[str]
    tol: Optional[float]
    depth: Optional[int]
    max_words: int
    format: str

    def __post_init__(self):
        if self.depth is not None and self.depth < 1:
            raise InputError("--depth", detail="must be positive")
        if self.max_words < 1:
            raise InputError("--max-words", detail="must be positive")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol", detail="must be positive")
        if self.input is not None and not self.input:
            raise InputError("input", detail="empty path")


def seed_from_env(default: int = 0) -> int:
    """Seed for randomized fixture generation, taken from ``SCHOTTKY_SEED``."""
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise InputError(SEED_ENV, detail=f"not an integer: {value!r}") from None


class _Out:
    """Collects report lines; files are written once, at the end."""

    def __init__(self, stdout):
        self.stdout = stdout

    def line(self, text: str = ""):
        self.stdout.write(text + "\n")

    def emit(self, payload: str, path: Optional[str]):
        if path:
            with open(path, "w", newline="\n") as fh:
                fh.write(payload)
        else:
            self.stdout.write(payload)


def _config(args) -> RunConfig:
    return RunConfig(args.command, getattr(args, "file", None), args.out, args.tol, args.depth,
                     args.max_words, args.format)


# -- subcommands -------------------------------------------------------------------


def cmd_verify(args, out: _Out) -> int:
    cfg = _config(args)
    doc = documents.load(cfg.input)
    group = documents.schottky_from_doc(doc, tol=cfg.tol, verify=False)
    try:
        group.verify()
    except ProjGraftError as err:
        out.line(f"FAIL build {err}")
        return EXIT_FAIL
    out.line(f"PASS build rank={group.rank} fuchsian={str(group.fuchsian).lower()}")
    max_len = cfg.depth or 6
    report = schottky.all_loxodromic_check(group, max_len, tol=cfg.tol, max_words=cfg.max_words)
    status = "PASS" if report.ok else "FAIL"
    out.line(f"{status} loxodromic max_len={max_len} words={report.words_checked} "
             f"violations={len(report.violations)} min_gap={report.min_gap:.6g}")
    for word, name, t2 in report.violations[:10]:
        out.line(f"  {word}: {name} tr2={t2.real:.6g}{t2.imag:+.6g}i")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_limitset(args, out: _Out) -> int:
    cfg = _config(args)
    doc = documents.load(cfg.input)
    group = documents.schottky_from_doc(doc, tol=cfg.tol)
    depth = cfg.depth or 8
    tree, points = schottky.limit_set_approx(group, depth, max_words=cfg.max_words, workers=args.workers)
    if cfg.format == "svg":
        payload = svg.limitset_svg(group.circles(), tree, points)
    else:
        payload = svg.points_csv(points)
    out.emit(payload, cfg.out)
    return EXIT_OK


def cmd_fold(args, out: _Out) -> int:
    cfg = _config(args)
    graph = documents.graph_from_doc(documents.load(cfg.input))
    result = foldgraph.decompose_to_rose(graph)
    for line in result.trace.lines():
        out.line(line)
    if isinstance(result, foldgraph.Iso):
        out.line(f"ISO rose({graph.rank})")
        return EXIT_OK
    out.line(f"NOT-ROSE rank={result.rank}")
    return EXIT_FAIL if args.expect_rose else EXIT_OK


def _int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise InputError(flag, detail=f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise InputError(flag, detail="expected non-negative integers")
    return values


def cmd_multiarc(args, out: _Out) -> int:
    degrees = _int_list(args.degrees, "--degrees")
    if not multiarc.feasible(degrees):
        out.line(f"INFEASIBLE degrees={','.join(map(str, degrees))}")
        return EXIT_FAIL
    diagram = multiarc.construct(degrees)
    out.line(f"FEASIBLE degrees={','.join(map(str, degrees))} chords={len(diagram.chords)}")
    for line in diagram.lines():
        out.line(line)
    svg_path = args.svg or (args.out if args.format == "svg" else None)
    if svg_path:
        out.emit(svg.multiarc_svg(diagram), svg_path)
    return EXIT_OK


def cmd_graft(args, out: _Out) -> int:
    cfg = _config(args)
    p = documents.presentation_from_doc(documents.load(cfg.input), tol=cfg.tol)
    results = graftcalc.verify_presentation(p)
    for r in results:
        out.line(r.line())
    failed = [r for r in results if not r.ok]
    if failed:
        out.line(f"RESULT FAIL first={failed[0].error}")
        return EXIT_FAIL
    out.line(f"NORMAL-FORM genus={p.genus} chi={graftcalc.euler_characteristic(p)} loops={len(p.loops)}")
    for pid, degrees, d in graftcalc.degree_table(p):
        out.line(f"PIECE {pid} degrees={','.join(map(str, degrees))} d={d}")
    out.line("RESULT PASS")
    return EXIT_OK


def _circle_arg(text: str):
    try:
        cx, cy, r = (float(x) for x in text.split(","))
    except ValueError:
        raise InputError("--circle", detail=f"expected cx,cy,r, got {text!r}") from None
    if not r > 0:
        raise InputError("--circle", detail="radius must be positive")
    return complex(cx, cy), r


def cmd_preimage(args, out: _Out) -> int:
    f = brancov.parse_map(args.map)
    center, radius = _circle_arg(args.circle)
    if args.samples < 3:
        raise InputError("--samples", detail="need at least 3 samples")
    marked = [brancov.parse_point(x) for x in args.marked.split(",")] if args.marked else []
    loop = brancov.LoopTrace.circle(center, radius, args.samples)
    result = brancov.preimage_loop(f, loop)
    essential = 0
    report = [f"map degree={f.degree}", f"components={len(result.components)}"]
    for k, comp in enumerate(result.components):
        w = brancov.windings(comp, marked) if marked else []
        ess = brancov.is_essential(comp, marked)
        essential += ess
        report.append(f"component {k} points={len(comp)} closure={comp.closure_error:.3e} "
                      f"windings={','.join(map(str, w)) or '-'} essential={'yes' if ess else 'no'}")
    report.append(f"essential={essential}")
    if args.format == "csv":
        rows = ["component,index,x,y"]
        for k, comp in enumerate(result.components):
            rows += [f"{k},{i},{z.real!r},{z.imag!r}" for i, z in enumerate(comp.points)]
        if args.out:
            for line in report:
                out.line(line)
        out.emit("\n".join(rows) + "\n", args.out)
    else:
        for line in report:
            out.line(line)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance (default 1e-9)")
    common.add_argument("--max-words", type=int, default=schottky.DEFAULT_MAX_WORDS,
                        help="cap on enumerated words or disks")
    common.add_argument("--depth", type=int, default=None, help="word length or tree depth")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("text", "csv", "svg"), default="text")

    parser = argparse.ArgumentParser(prog="projgraft", description="Schottky groups, foldings, multiarcs, "
                                                                   "grafting and branched covers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check a Schottky group document")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limitset", parents=[common], help="approximate the limit set (csv or svg)")
    p.add_argument("file")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_limitset)

    p = sub.add_parser("fold", parents=[common], help="fold a labeled graph onto the rose")
    p.add_argument("file")
    p.add_argument("--expect-rose", action="store_true")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("multiarc", parents=[common], help="construct a non-crossing multiarc")
    p.add_argument("--degrees", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_multiarc)

    p = sub.add_parser("graft", help="grafting presentations")
    gsub = p.add_subparsers(dest="graft_command", required=True)
    g = gsub.add_parser("verify", parents=[common], help="verify a presentation document")
    g.add_argument("file")
    g.set_defaults(func=cmd_graft)

    p = sub.add_parser("preimage", parents=[common], help="lift a circle through a rational map")
    p.add_argument("--map", required=True)
    p.add_argument("--circle", required=True)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--marked", default="", help="comma-separated points, e.g. 0,inf")
    p.set_defaults(func=cmd_preimage)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Out(stdout)
    try:
        return args.func(args, out)
    except InputError as err:
        stderr.write(f"error: {err}\n")
        return EXIT_INPUT
    except ProjGraftError as err:
        out.line(f"FAIL {err}")
        return EXIT_FAIL
    except ValueError as err:
        stderr.write(f"error: {err}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
