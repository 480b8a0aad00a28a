"""Command-line front door.

Exit status: 0 when the computation succeeds or the verification passes,
1 when a verification fails (or a design request cannot be met), 2 for
unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .afcore import AfCoreError, Truncation, bratteli
from .algebra import AlgebraError
from .cylinders import CylinderError
from .designer import (DesignError, UnsatisfiableRequest, default_catalog, dump_catalog,
                       load_catalog, parse_request, realize, verify_catalog)
from .graphs import GraphError, load_graph
from .ktheory import KTheoryError, graph_k, load_annotations, model_k
from .model import ModelError, load_model
from .reports import Report, structured, text
from .suites import DEFAULT_SEED, MODEL_SUITES, SUITES, run_suite

INPUT_ERRORS = (GraphError, ModelError, KTheoryError, CylinderError, AlgebraError,
                AfCoreError, OSError)


def _emit(args, body: str) -> None:
    if not body.endswith("\n"):
        body += "\n"
    if args.output:
        Path(args.output).write_text(body)
    else:
        sys.stdout.write(body)


def _report_out(args, rep: Report) -> int:
    if args.format == "structured":
        _emit(args, structured(rep.to_data()))
    elif args.format == "dot":
        raise DesignError("dot output is only available for bratteli")
    else:
        _emit(args, text(rep))
    return 0 if rep.ok else 1


def cmd_k_graph(args) -> int:
    g = load_graph(args.file)
    k = graph_k(g)
    if args.format == "structured":
        _emit(args, structured({"graph": g.name, "k0": k.k0.render(), "k1": k.k1.render()}))
    else:
        _emit(args, k.render())
    return 0


def cmd_k_model(args) -> int:
    m = load_model(args.file)
    k = model_k(m, load_annotations(args.file))
    if args.format == "structured":
        _emit(args, structured({"blocks": len(m.blocks), "k0": k.k0.render(), "k1": k.k1.render()}))
    else:
        _emit(args, k.render())
    return 0


def cmd_verify(args) -> int:
    opts: dict = {"seed": args.seed}
    if args.cap is not None:
        opts["cap"] = args.cap
    if args.k is not None:
        opts["levels"] = (args.k,)
        opts["max_k"] = args.k
    if args.depth is not None:
        opts["max_m"] = args.depth
        opts["bound"] = args.depth
    if args.cases is not None:
        opts["cases"] = args.cases
    if args.model:
        if args.suite not in MODEL_SUITES:
            raise DesignError(f"suite {args.suite!r} does not take a model file")
        opts["model"] = load_model(args.model)
    return _report_out(args, run_suite(args.suite, **opts))


def cmd_bratteli(args) -> int:
    m = load_model(args.model)
    k = args.k or 1
    cap = args.cap or k + 1
    level, rep = bratteli(Truncation(m, k, cap), Truncation(m, k + 1, cap))
    if args.format == "dot":
        _emit(args, level.to_dot())
        return 0 if rep.ok else 1
    if args.format == "structured":
        _emit(args, structured({"report": rep.to_data(), "level": level.to_data()}))
        return 0 if rep.ok else 1
    return _report_out(args, rep)


def cmd_design(args) -> int:
    entries = load_catalog(args.catalog) if args.catalog else default_catalog()
    try:
        design = realize(parse_request(args.request), args.k or 2, entries)
    except UnsatisfiableRequest as exc:
        rep = Report("design")
        rep.check("request realized", False, str(exc))
        return _report_out(args, rep)
    if args.emit_model:
        Path(args.emit_model).write_text(json.dumps(design.model_data(), indent=2) + "\n")
    if args.format == "structured":
        _emit(args, structured(design.to_data()))
    else:
        lines = [f"predicted: {design.predicted.render()}"]
        for i, names in enumerate(design.factorization):
            lines.append(f"block {i}: {' x '.join(names)}")
        for a in design.annotations:
            lines.append(f"annotated {a.graph}: {a.k.pair()} [{a.provenance}]")
        _emit(args, "\n".join(lines))
    return 0


def cmd_catalog(args) -> int:
    entries = load_catalog(args.catalog) if args.catalog else default_catalog()
    if args.dump:
        _emit(args, dump_catalog(entries))
        return 0
    chk = verify_catalog(entries)
    if args.format == "structured":
        _emit(args, structured(chk.to_data()))
    else:
        lines = [f"catalog: {'PASS' if chk.ok else 'FAIL'}"]
        for r in chk.rows:
            flag = " (relaxed)" if r["relaxed"] else ""
            lines.append(f"  {r['name']:6} {r['k']:16} {r['status']}{flag}")
        lines += [f"  failure: {f}" for f in chk.failures]
        _emit(args, "\n".join(lines))
    return 0 if chk.ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured", "dot"), default="text")
    common.add_argument("--output", "-o", help="write the output here instead of stdout")
    common.add_argument("--k", type=int, help="truncation level (or rank for design)")
    common.add_argument("--cap", type=int, help="edge cap at infinite emitters")
    common.add_argument("--depth", type=int, help="path depth for oracle and identity checks")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="kirchberg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"kirchberg {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("k-graph", parents=[common], help="K-theory of a graph file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_k_graph)

    s = sub.add_parser("k-model", parents=[common], help="K-theory of a hybrid model file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_k_model)

    s = sub.add_parser("verify", parents=[common], help="run one acceptance suite")
    s.add_argument("suite", choices=sorted(SUITES))
    s.add_argument("model", nargs="?", help="model file (suites that act on a model)")
    s.add_argument("--cases", type=int, help="number of random cases")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("bratteli", parents=[common], help="one level of the Bratteli diagram")
    s.add_argument("model")
    s.set_defaults(fn=cmd_bratteli)

    s = sub.add_parser("design", parents=[common], help="build a model with prescribed K-theory")
    s.add_argument("request", help='per-block pairs separated by ";", e.g. "(Z/5, 0); (Z, 0)"')
    s.add_argument("--catalog", help="catalog file (default: built-in catalog)")
    s.add_argument("--emit-model", help="write the resulting model file here")
    s.set_defaults(fn=cmd_design)

    s = sub.add_parser("catalog", parents=[common], help="verify or dump the block catalog")
    s.add_argument("--catalog", help="catalog file (default: built-in catalog)")
    s.add_argument("--dump", action="store_true", help="print the catalog file instead")
    s.set_defaults(fn=cmd_catalog)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    # argparse cannot match an optional positional that follows options
    # (``verify partition --k 1 model.hyb``), so pick it up by hand
    args, extra = parser.parse_known_args(argv)
    if args.verb == "verify" and args.model is None and len(extra) == 1 and not extra[0].startswith("-"):
        args.model = extra.pop()
    if extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.fn(args)
    except INPUT_ERRORS + (DesignError,) as exc:
        msg = exc.strerror + f": {exc.filename}" if isinstance(exc, OSError) and exc.filename else str(exc)
        print(f"kirchberg {args.verb}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
