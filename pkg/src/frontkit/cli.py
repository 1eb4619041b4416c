"""frontkit command line: a thin client over the service layer.

Every subcommand builds the same pydantic request the HTTP endpoint
takes and either calls the handler in-process (default, deterministic
and offline) or posts it to a running service via ``--server``.
Structured results are written as JSON, sampled data as CSV; outputs
are byte-identical across runs with the same inputs.

Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from . import service
from .errors import FrontkitError, NumericalError, ParseError, PreconditionError
from .schemas import (
    FocalClassifyRequest,
    FocalClassifyResponse,
    FocalScanRequest,
    FocalScanResponse,
    FrameRequest,
    FrameResponse,
    GBRequest,
    GBResponse,
    InvariantsRequest,
    InvariantsResponse,
    ReduceRequest,
    ReduceResponse,
    SurfaceSampleRequest,
    SurfaceSampleResponse,
    SymmetryRequest,
    SymmetryResponse,
    parse_germ_document,
)

_ROUTES = {
    "reduce": ("/reduce", service.handle_reduce, ReduceResponse),
    "frame": ("/frame", service.handle_frame, FrameResponse),
    "invariants": ("/invariants", service.handle_invariants, InvariantsResponse),
    "symmetry": ("/symmetry", service.handle_symmetry, SymmetryResponse),
    "gb": ("/gaussbonnet", service.handle_gb, GBResponse),
    "focal-classify": ("/focal/classify", service.handle_focal_classify, FocalClassifyResponse),
    "focal-scan": ("/focal/scan", service.handle_focal_scan, FocalScanResponse),
    "sample-surface": ("/surface/sample", service.handle_surface_sample, SurfaceSampleResponse),
}

_ERROR_KINDS = {"parse": 2, "precondition": 3, "numerical": 4}


class _RemoteError(FrontkitError):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def _load_germ(path: str):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParseError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return parse_germ_document(data)


def _parse_floats(text: str, n: int, what: str):
    parts = text.split(",")
    if len(parts) != n:
        raise ParseError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def _parse_box(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"--box needs three lo:hi ranges, got {text!r}")
    box = []
    for part in parts:
        bounds = part.split(":")
        if len(bounds) != 2:
            raise ParseError(f"--box range {part!r} is not lo:hi")
        try:
            lo, hi = float(bounds[0]), float(bounds[1])
        except ValueError as exc:
            raise ParseError(f"--box: {exc}") from exc
        if hi < lo:
            raise ParseError(f"--box range {part!r} is empty")
        box.append((lo, hi))
    return tuple(box)


def _dispatch(args, command: str, request):
    path, handler, response_model = _ROUTES[command]
    if args.server:
        import httpx

        resp = httpx.post(args.server.rstrip("/") + path, json=request.model_dump(), timeout=600.0)
        if resp.status_code != 200:
            try:
                err = resp.json()["error"]
                raise _RemoteError(err["message"], _ERROR_KINDS.get(err.get("kind"), 4))
            except (KeyError, ValueError):
                raise _RemoteError(f"server error {resp.status_code}: {resp.text}", 4)
        return response_model.model_validate(resp.json())
    return handler(request)


def _write_text(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_json(args, model):
    _write_text(args, model.model_dump_json(indent=2) + "\n")


def _write_csv(args, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    _write_text(args, buf.getvalue())


# -- subcommand implementations ---------------------------------------------


def _cmd_reduce(args):
    req = ReduceRequest(germ=_load_germ(args.infile), degree=args.degree)
    resp = _dispatch(args, "reduce", req)
    _write_json(args, resp)


def _cmd_frame(args):
    source = args.germ or args.infile
    if source is None:
        raise ParseError("frame needs --germ (or --in) pointing at a germ JSON file")
    point = _parse_floats(args.point, 2, "--point")
    req = FrameRequest(germ=_load_germ(source), point=point)
    resp = _dispatch(args, "frame", req)
    _write_json(args, resp)


def _cmd_invariants(args):
    samples = (
        [float(s) for s in args.samples.split(",")] if args.samples else [0.1, 0.05, 0.01]
    )
    req = InvariantsRequest(germ=_load_germ(args.infile), samples=samples)
    resp = _dispatch(args, "invariants", req)
    if args.csv:
        rows = [
            (r.axis, repr(r.t), repr(r.kappa_s), repr(r.kappa_nu), repr(r.kappa_t), repr(r.kappa_c))
            for r in resp.rows
        ]
        csv_args = argparse.Namespace(out=args.csv)
        _write_csv(csv_args, ["axis", "t", "kappa_s", "kappa_nu", "kappa_t", "kappa_c"], rows)
    _write_json(args, resp)


def _cmd_symmetry(args):
    req = SymmetryRequest(germ=_load_germ(args.infile), tol=args.tol)
    resp = _dispatch(args, "symmetry", req)
    _write_json(args, resp)


def _cmd_gb(args):
    req = GBRequest(germ=_load_germ(args.infile), radius=args.radius, mesh=args.mesh)
    resp = _dispatch(args, "gb", req)
    _write_json(args, resp)


def _cmd_focal_classify(args):
    x = _parse_floats(args.x, 3, "--x")
    req = FocalClassifyRequest(germ=_load_germ(args.infile), x=x, tol=args.tol)
    resp = _dispatch(args, "focal-classify", req)
    _write_json(args, resp)


def _cmd_focal_scan(args):
    req = FocalScanRequest(
        germ=_load_germ(args.infile), box=_parse_box(args.box), step=args.step, tol=args.tol
    )
    resp = _dispatch(args, "focal-scan", req)
    rows = [(repr(x1), repr(x2), repr(x3), label) for x1, x2, x3, label in resp.rows]
    _write_csv(args, ["x1", "x2", "x3", "label"], rows)


def _cmd_sample_surface(args):
    req = SurfaceSampleRequest(germ=_load_germ(args.infile), radius=args.radius, n=args.grid)
    resp = _dispatch(args, "sample-surface", req)
    rows = [tuple(repr(v) for v in row) for row in resp.rows]
    _write_csv(args, ["u", "v", "x", "y", "z"], rows)


def _cmd_serve(args):
    import uvicorn

    uvicorn.run(service.app, host=args.host, port=args.port)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontkit",
        description="Normal form, invariants, Gauss-Bonnet and focal reports for wave-front germs",
    )
    parser.add_argument("--server", help="base URL of a running frontkit service", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, infile=True):
        if infile:
            p.add_argument("--in", dest="infile", required=True, help="germ JSON file")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("reduce", help="reduce a germ to normal form")
    add_common(p)
    p.add_argument("--degree", type=int, default=None, help="truncation degree (default: input degree)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("frame", help="curvature and frame data at a point")
    p.add_argument("--germ", help="germ JSON file (alias of --in)")
    p.add_argument("--in", dest="infile", help="germ JSON file")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--point", required=True, help="u,v")
    p.set_defaults(func=_cmd_frame)

    p = sub.add_parser("invariants", help="cuspidal-edge invariants along the axes")
    add_common(p)
    p.add_argument("--samples", help="comma-separated parameter values")
    p.add_argument("--csv", help="also write sampled rows as CSV to this path")
    p.set_defaults(func=_cmd_invariants)

    p = sub.add_parser("symmetry", help="detect extrinsic symmetries")
    add_common(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_symmetry)

    p = sub.add_parser("gb", help="sector Gauss-Bonnet verification")
    add_common(p)
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--mesh", type=int, default=200)
    p.set_defaults(func=_cmd_gb)

    focal_parser = sub.add_parser("focal", help="focal-locus classification")
    focal_sub = focal_parser.add_subparsers(dest="focal_command", required=True)

    p = focal_sub.add_parser("classify", help="classify one target point")
    add_common(p)
    p.add_argument("--x", required=True, help="x1,x2,x3")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_focal_classify)

    p = focal_sub.add_parser("scan", help="classify a lattice of target points (CSV)")
    add_common(p)
    p.add_argument("--box", required=True, help="x1lo:x1hi,x2lo:x2hi,x3lo:x3hi")
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_focal_scan)

    p = sub.add_parser("sample-surface", help="sample f on a (u,v) grid (CSV)")
    add_common(p)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=40)
    p.set_defaults(func=_cmd_sample_surface)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _RemoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except PreconditionError as exc:
        print(f"precondition violation: {exc}", file=sys.stderr)
        return 3
    except FrontkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
