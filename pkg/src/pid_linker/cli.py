"""Command-line interface: ``pid-linker {digitize,eval,gen,query,render}``.

Exit codes: 0 success, 1 data error (validation, schema, unknown ids),
2 file error (missing or unreadable paths).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import format_config, load_config
from .errors import CanvasTooSmall, PidLinkerError, UnknownSymbol
from .evaluation import GroundTruth, batch_evaluate
from .graph import (
    detect_cycles,
    dump_graph,
    find_route,
    format_route,
    graph_from_dict,
    reachable_set,
    to_dot,
)
from .merge import dump_lines_document, read_lines_document
from .pipeline import digitize
from .render import render_svg
from .scene import dump_scene, parse_scene
from .synthetic import SynthSpec, generate, truth_document

log = logging.getLogger("pid_linker")

EXIT_OK, EXIT_DATA, EXIT_IO = 0, 1, 2

SCENE_SUFFIX = ".scene.json"
LINES_SUFFIX = ".lines.json"
TRUTH_SUFFIX = ".truth.json"
GRAPH_SUFFIX = ".graph.json"


class FileProblem(Exception):
    pass


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileProblem(f"{path}: no such file") from None
    except OSError as exc:
        raise FileProblem(f"{path}: {exc.strerror or exc}") from None


def _read_json(path: str | Path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise PidLinkerError(f"{path}: malformed JSON: {exc}") from None


def _write(path: str | Path, text: str) -> None:
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FileProblem(f"{path}: {exc.strerror or exc}") from None


def _stem(path: Path, suffix: str) -> str:
    name = path.name
    return name[: -len(suffix)] if name.endswith(suffix) else path.stem


def _merge_overrides(args) -> dict:
    return {
        "eps_gap": args.eps_gap,
        "eps_contact": args.eps_contact,
        "delta_collinear": args.delta_collinear,
        "crossing_margin": args.crossing_margin,
        "attach_inflation": args.attach_inflation,
        "corner_merge": False if args.no_corner_merge else None,
    }


def _resolve_config(args):
    cfg = load_config(args.config, _merge_overrides(args))
    log.info("resolved config:\n%s", format_config(cfg))
    return cfg


# -- digitize ----------------------------------------------------------------

def _digitize_one(scene_path, out_path, graph_path, svg_path, dot_path, cfg) -> str:
    scene = parse_scene(_read_text(scene_path))
    result = digitize(scene, cfg)
    _write(out_path, dump_lines_document(result.document()))
    if graph_path:
        _write(graph_path, dump_graph(result.graph))
    if dot_path:
        _write(dot_path, to_dot(result.graph, result.scene.sheet_id))
    if svg_path:
        _write(svg_path, render_svg(result.scene, result.lines, result.attachments,
                                    segments=result.merge.segments))
    return result.summary()


def _digitize_job(job):
    try:
        return EXIT_OK, _digitize_one(*job)
    except FileProblem as exc:
        return EXIT_IO, str(exc)
    except PidLinkerError as exc:
        return EXIT_DATA, f"{job[0]}: {exc}"


def cmd_digitize(args) -> int:
    cfg = _resolve_config(args)
    src = Path(args.scene)
    if src.is_dir():
        out = Path(args.out)
        jobs = []
        for path in sorted(src.glob("*" + SCENE_SUFFIX)):
            stem = _stem(path, SCENE_SUFFIX)
            jobs.append((path, out / (stem + LINES_SUFFIX),
                         Path(args.graph) / (stem + GRAPH_SUFFIX) if args.graph else None,
                         Path(args.svg) / (stem + ".svg") if args.svg else None,
                         Path(args.dot) / (stem + ".dot") if args.dot else None, cfg))
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(_digitize_job, jobs))
        else:
            results = [_digitize_job(j) for j in jobs]
        code = EXIT_OK
        for status, message in results:
            if status == EXIT_OK:
                print(message)
            else:
                print(f"error: {message}", file=sys.stderr)
                code = max(code, status)
        return code
    status, message = _digitize_job((src, args.out, args.graph, args.svg, args.dot, cfg))
    if status == EXIT_OK:
        print(message)
    else:
        print(f"error: {message}", file=sys.stderr)
    return status


# -- eval --------------------------------------------------------------------

def _load_pred(path):
    lines, replaced = read_lines_document(_read_json(path))
    return lines.with_replaced(replaced)


def cmd_eval(args) -> int:
    pred, truth = Path(args.pred), Path(args.truth)
    if truth.is_dir():
        names, cases = [], []
        for tpath in sorted(truth.glob("*" + TRUTH_SUFFIX)):
            stem = _stem(tpath, TRUTH_SUFFIX)
            names.append(stem)
            cases.append((_load_pred(pred / (stem + LINES_SUFFIX)),
                          GroundTruth.from_dict(_read_json(tpath))))
    else:
        names = [_stem(truth, TRUTH_SUFFIX)]
        cases = [(_load_pred(pred), GroundTruth.from_dict(_read_json(truth)))]
    report = batch_evaluate(cases, names)
    if len(cases) > 1:
        print(report.table())
    m = report.pooled
    print(f"precision={m.precision:.4f} recall={m.recall:.4f} f1={m.f1:.4f} "
          f"exact_accuracy={m.exact_accuracy:.4f} tp={m.tp} fp={m.fp} fn={m.fn}")
    if args.report:
        _write(args.report, report.to_json())
    return EXIT_OK


# -- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    base = SynthSpec.from_dict(_read_json(args.spec)) if args.spec else SynthSpec()
    seed = args.seed if args.seed is not None else base.seed
    out = Path(args.out_dir)
    entries, failures = [], 0
    for i in range(args.count):
        case_seed = seed + i
        stem = f"case_{case_seed:06d}"
        try:
            scene, truth = generate(base.replace(seed=case_seed))
        except CanvasTooSmall as exc:
            failures += 1
            print(f"error: seed {case_seed}: {exc}", file=sys.stderr)
            entries.append({"seed": case_seed, "error": str(exc)})
            continue
        _write(out / (stem + SCENE_SUFFIX), dump_scene(scene))
        _write(out / (stem + TRUTH_SUFFIX), truth_document(truth))
        entries.append({"seed": case_seed, "scene": stem + SCENE_SUFFIX,
                        "truth": stem + TRUTH_SUFFIX})
    manifest = {"spec": base.replace(seed=seed).to_dict(), "count": args.count, "cases": entries}
    _write(out / "manifest.json", json.dumps(manifest, indent=1) + "\n")
    print(f"generated {args.count - failures} of {args.count} cases in {out}")
    return EXIT_DATA if args.count and failures == args.count else EXIT_OK


# -- query -------------------------------------------------------------------

def _symbol_id(text: str) -> int:
    text = text.strip()
    if text[:1] in ("S", "s"):
        text = text[1:]
    try:
        return int(text)
    except ValueError:
        raise UnknownSymbol(text) from None


def cmd_query(args) -> int:
    g = graph_from_dict(_read_json(args.graph))
    try:
        if args.query == "route":
            print(format_route(find_route(g, _symbol_id(args.source), _symbol_id(args.target))))
        elif args.query == "cycles":
            cycles = detect_cycles(g)
            print(f"{len(cycles)} cycles")
            for c in cycles:
                print(" ".join(str(n) for n in c))
        else:
            print(" ".join(str(i) for i in sorted(reachable_set(g, _symbol_id(args.source)))))
    except UnknownSymbol as exc:
        print(f"error: unknown symbol {exc.args[0]}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


# -- render ------------------------------------------------------------------

def cmd_render(args) -> int:
    cfg = _resolve_config(args)
    result = digitize(parse_scene(_read_text(args.scene)), cfg)
    lines, atts, segments = result.lines, result.attachments, result.merge.segments
    if args.lines:
        lines, _ = read_lines_document(_read_json(args.lines))
        atts = ()
    if args.raw:
        svg = render_svg(result.scene, None, raw=True)
    else:
        svg = render_svg(result.scene, lines, atts, segments=segments)
    _write(args.out, svg)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _merge_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("merge tolerances (override the config file)")
    g.add_argument("--config", help="flat key = value config file "
                   "(default: $PID_LINKER_CONFIG)")
    g.add_argument("--eps-gap", type=float)
    g.add_argument("--eps-contact", type=float)
    g.add_argument("--delta-collinear", type=float)
    g.add_argument("--crossing-margin", type=float)
    g.add_argument("--attach-inflation", type=float)
    g.add_argument("--no-corner-merge", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pid-linker", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    flags = _merge_flags()

    p = sub.add_parser("digitize", parents=[flags], help="merge segments of a scene file or directory")
    p.add_argument("scene", help="scene file, or a directory of *.scene.json")
    p.add_argument("-o", "--out", required=True, help="merged-line document (or directory)")
    p.add_argument("--graph", help="write the connectivity graph export")
    p.add_argument("--dot", help="write the graph in DOT format")
    p.add_argument("--svg", help="write an SVG overlay")
    p.add_argument("--jobs", type=int, default=1, help="worker processes in directory mode")
    p.set_defaults(func=cmd_digitize)

    p = sub.add_parser("eval", help="score merged lines against ground truth")
    p.add_argument("pred", help="merged-line document or directory of *.lines.json")
    p.add_argument("truth", help="truth document or directory of *.truth.json")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate synthetic scenes with ground truth")
    p.add_argument("spec", nargs="?", help="JSON file of SynthSpec fields (defaults otherwise)")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("query", help="route / cycle / reachability queries on a graph export")
    p.add_argument("graph")
    qs = p.add_subparsers(dest="query", required=True)
    q = qs.add_parser("route")
    q.add_argument("source")
    q.add_argument("target")
    qs.add_parser("cycles")
    q = qs.add_parser("reach")
    q.add_argument("source")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("render", parents=[flags], help="render an SVG overlay")
    p.add_argument("scene")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--lines", help="use this merged-line document instead of re-merging")
    p.add_argument("--raw", action="store_true", help="colour each detected segment separately")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        return args.func(args)
    except FileProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PidLinkerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
