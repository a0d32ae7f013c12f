"""Command-line interface.

Exit codes: 0 success, 1 input error (or a diagram failing ``verify``),
2 internal invariant violation.  Errors are reported on stderr as a JSON
record.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .classify import (
    CapTooSmall,
    RecognizerDisagreement,
    classify_diagram,
    enumerate_lanner,
    enumerate_quasi_lanner,
)
from .diagram import DiagramError, format_diagram, parse_diagram
from .enumerate import (
    FORMATS,
    PYRAMID_DIM_LIMIT,
    InvariantViolation,
    default_workers,
    emit_tables,
    search_products,
    search_pyramids,
    verify_polytope_diagram,
)
from .exact import diagram_determinant, diagram_signature
from .gale import GaleError, combinatorial_type, coxeter_admissible, faces, gale_from_multiplicities, vertices

log = logging.getLogger("coxn2")


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    inputs: list = field(default_factory=list)
    label_cap: int = 12
    param_scan_cap: int = 1000
    dim_range: tuple = (3, PYRAMID_DIM_LIMIT)
    order: int | None = None
    fmt: str = "json"
    output: str | None = None
    threads: int = 1
    validate: bool = False
    gale: tuple = ()
    gale_mode: str = ""

    def check(self) -> None:
        if self.label_cap < 1 or self.param_scan_cap < 1:
            raise ValueError("caps must be positive")
        lo, hi = self.dim_range
        if not 3 <= lo <= hi <= PYRAMID_DIM_LIMIT:
            raise ValueError(f"dimension range must lie within 3..{PYRAMID_DIM_LIMIT}")
        if self.threads < 1:
            raise ValueError("thread count must be positive")


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _read_diagram(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def _catalog_json(cat, kind: str) -> dict:
    items = []
    for d in cat.diagrams:
        cls = classify_diagram(d)
        items.append({
            "text": format_diagram(d),
            "class": cls.kind,
            "signature": diagram_signature(d).to_json(),
            "det": diagram_determinant(d).to_json(),
        })
    fams = [{"text": format_diagram(f.base), "symbols": {s: list(e) for s, e in f.symbols.items()},
             "constraint": f.constraint_text()} for f in cat.families]
    return {"schema": 1, "catalog": kind, "order": cat.order, "label_cap": cat.label_cap,
            "count": len(items), "diagrams": items, "families": fams, "note": cat.note,
            "validated": cat.validated}


def run(cfg: RunConfig) -> int:
    cfg.check()
    out: str
    status = 0
    if cfg.command == "classify":
        d = _read_diagram(cfg.inputs[0])
        cls = classify_diagram(d)
        res = {"class": cls.kind, "signature": diagram_signature(d).to_json()}
        res.update({k: v for k, v in cls.to_json().items() if k != "class"})
        out = _dump(res)
    elif cfg.command == "invariants":
        d = _read_diagram(cfg.inputs[0])
        out = _dump({"order": d.order, "det": diagram_determinant(d).to_json(),
                     "signature": diagram_signature(d).to_json()})
    elif cfg.command == "gale":
        g = gale_from_multiplicities(*cfg.gale)
        res = {"gale": g.to_json(), "type": combinatorial_type(g).to_json(),
               "description": str(combinatorial_type(g)), "coxeter_admissible": coxeter_admissible(g)}
        if cfg.gale_mode == "faces":
            res["faces"] = [sorted(f) for f in faces(g)]
        elif cfg.gale_mode == "vertices":
            res["vertices"] = [sorted(v) for v in vertices(g)]
        out = _dump(res)
    elif cfg.command == "enumerate":
        if cfg.order is None:
            raise ValueError("--order is required")
        if cfg.target == "lanner":
            cat = enumerate_lanner(cfg.order, cfg.label_cap, cfg.validate)
        else:
            cat = enumerate_quasi_lanner(cfg.order, cfg.label_cap, cfg.validate)
        out = _dump(_catalog_json(cat, cfg.target))
    elif cfg.command == "search":
        if cfg.target == "products":
            res = search_products(cfg.label_cap, cfg.param_scan_cap, cfg.threads)
        else:
            res = search_pyramids(cfg.dim_range[0], cfg.dim_range[1], cfg.label_cap, cfg.threads)
        log.info("search statistics: %s", json.dumps(res.stats, sort_keys=True))
        out = emit_tables(res, cfg.fmt)
    elif cfg.command == "verify":
        d = _read_diagram(cfg.inputs[0])
        rep = verify_polytope_diagram(d, cfg.dim_range[0])
        out = _dump(rep)
        status = 0 if rep["pass"] else 1
    elif cfg.command == "export-tables":
        outdir = Path(cfg.output or "tables")
        prod = search_products(cfg.label_cap, cfg.param_scan_cap, cfg.threads)
        pyr = search_pyramids(3, PYRAMID_DIM_LIMIT, cfg.label_cap, cfg.threads)
        for name, res in (("products", prod), ("pyramids", pyr)):
            for fmt, ext in (("json", "json"), ("text", "txt"), ("graph", "dot")):
                write_atomic(str(outdir / f"{name}.{ext}"), emit_tables(res, fmt))
        print(str(outdir))
        return 0
    else:
        raise ValueError(f"unknown command {cfg.command!r}")
    if cfg.output:
        write_atomic(cfg.output, out)
    else:
        sys.stdout.write(out)
    return status


def _dim_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or N, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coxn2", description="Coxeter polytopes with n+2 facets")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-o", "--output", help="write result to this path (atomically)")
    p.add_argument("--threads", type=int, default=None, help="worker processes (env COXETER_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="class of a diagram file")
    s.add_argument("file")
    s = sub.add_parser("invariants", help="determinant and signature of a diagram file")
    s.add_argument("file")
    s = sub.add_parser("gale", help="one-dimensional Gale diagram (p, q, r)")
    s.add_argument("p", type=int)
    s.add_argument("q", type=int)
    s.add_argument("r", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--faces", action="store_true")
    g.add_argument("--vertices", action="store_true")
    s = sub.add_parser("enumerate", help="Lannér or quasi-Lannér catalog")
    s.add_argument("kind", choices=("lanner", "quasi-lanner"))
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--label-cap", type=int, default=12)
    s.add_argument("--validate", action="store_true", help="cross-check recognizers spectrally")
    s = sub.add_parser("search", help="classification searches")
    s.add_argument("kind", choices=("products", "pyramids"))
    s.add_argument("--label-cap", type=int, default=12)
    s.add_argument("--param-scan", type=int, default=1000)
    s.add_argument("--dim", type=_dim_range, default=(3, PYRAMID_DIM_LIMIT))
    s.add_argument("--format", choices=FORMATS, default="json")
    s = sub.add_parser("verify", help="certificate report for a diagram file")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s = sub.add_parser("export-tables", help="run both searches and write all formats")
    s.add_argument("--label-cap", type=int, default=12)
    s.add_argument("--param-scan", type=int, default=1000)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    threads = ns.threads if ns.threads is not None else default_workers()
    cfg = RunConfig(command=ns.command, output=ns.output, threads=threads)
    if ns.command in ("classify", "invariants", "verify"):
        cfg.inputs = [ns.file]
    if ns.command == "verify":
        cfg.dim_range = (ns.dim, ns.dim)
    if ns.command == "gale":
        cfg.gale = (ns.p, ns.q, ns.r)
        cfg.gale_mode = "faces" if ns.faces else "vertices" if ns.vertices else ""
    if ns.command == "enumerate":
        cfg.target = ns.kind
        cfg.order = ns.order
        cfg.label_cap = ns.label_cap
        cfg.validate = ns.validate
    if ns.command == "search":
        cfg.target = ns.kind
        cfg.label_cap = ns.label_cap
        cfg.param_scan_cap = ns.param_scan
        cfg.dim_range = ns.dim
        cfg.fmt = ns.format
    if ns.command == "export-tables":
        cfg.label_cap = ns.label_cap
        cfg.param_scan_cap = ns.param_scan
    return cfg


def _error(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(ns.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except (InvariantViolation, CapTooSmall, RecognizerDisagreement) as exc:
        return _error("invariant_violation", exc, 2)
    except (DiagramError, GaleError, ValueError, OSError) as exc:
        return _error("input_error", exc, 1)
    except AssertionError as exc:
        return _error("invariant_violation", exc, 2)


if __name__ == "__main__":
    sys.exit(main())
