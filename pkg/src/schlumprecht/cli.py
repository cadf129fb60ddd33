"""Command line front end.

Each command builds a request model and either runs the handler in-process
or, with ``--server URL``, posts it to a running ``schlumprecht serve``.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 a size or oracle
limit was hit.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .cache import cache_path, load_cache, save_cache
from .engine import default_engine
from .schemas import (
    BuildResponse,
    BuildSpec,
    CheckRequest,
    CheckResponse,
    LevelNormRequest,
    LevelNormResponse,
    NormRequest,
    NormResponse,
    ReportRequest,
    SplitSumRequest,
    SplitSumResponse,
)
from .suites import SUITES

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

log = logging.getLogger("schlumprecht")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _read_input(path: str | None) -> str:
    try:
        if path is None or path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_INPUT) from None


def _run(args, handler_name: str, request, response_model):
    """Run a handler locally or against ``--server``."""
    if args.server:
        import httpx

        route = {
            "handle_norm": "/norm",
            "handle_split_sum": "/split-sum",
            "handle_level_norm": "/level-norm",
            "handle_build": "/build",
            "handle_check": "/check",
            "handle_report": "/report",
        }[handler_name]
        try:
            resp = httpx.post(args.server.rstrip("/") + route, json=request.model_dump(mode="json"), timeout=None)
        except httpx.HTTPError as exc:
            raise CliError(f"server unreachable: {exc}", EXIT_INPUT) from None
        if resp.status_code == 413:
            raise CliError(resp.json().get("detail", "limit exceeded"), EXIT_LIMIT)
        if resp.status_code >= 400:
            raise CliError(str(resp.json().get("detail", resp.text)), EXIT_INPUT)
        return response_model.model_validate(resp.json())

    from . import service

    try:
        return getattr(service, handler_name)(request)
    except service.TOO_LARGE as exc:
        raise CliError(str(exc), EXIT_LIMIT) from None
    except service.BAD_REQUEST as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _vector_request(args, model, **extra):
    text = _read_input(args.input)
    try:
        return model(text=text, max_support=args.max_support, **extra)
    except ValidationError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _emit(args, text: str) -> None:
    if args.output:
        write_atomic(Path(args.output), text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_norm(args) -> int:
    req = _vector_request(args, NormRequest, certified=args.certified, oracle=args.oracle)
    resp = _run(args, "handle_norm", req, NormResponse)
    _emit(args, _dump(resp.model_dump(mode="json", exclude_none=True)))
    return EXIT_OK


def cmd_split_sum(args) -> int:
    req = _vector_request(args, SplitSumRequest, r=args.r)
    resp = _run(args, "handle_split_sum", req, SplitSumResponse)
    _emit(args, _dump(resp.model_dump(mode="json")))
    return EXIT_OK


def cmd_level_norm(args) -> int:
    req = _vector_request(args, LevelNormRequest, t=args.t)
    resp = _run(args, "handle_level_norm", req, LevelNormResponse)
    _emit(args, _dump(resp.model_dump(mode="json")))
    return EXIT_OK


def cmd_build(args) -> int:
    raw = _read_input(args.input)
    try:
        spec = BuildSpec.model_validate_json(raw)
    except ValidationError as exc:
        raise CliError(f"invalid build spec: {exc}", EXIT_INPUT) from None
    resp: BuildResponse = _run(args, "handle_build", spec, BuildResponse)
    if not args.output:
        sys.stdout.write(_dump(resp.model_dump(mode="json")))
        return EXIT_OK
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = resp.manifest()
    for rec, entry in zip(resp.vectors, manifest["vectors"]):
        fname = f"{rec.name}.txt"
        entry["file"] = fname
        text = "".join(f"{i}:{v!r}\n" for i, v in rec.entries)
        write_atomic(out / fname, text)
    write_atomic(out / "manifest.json", _dump(manifest))
    return EXIT_OK


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(_read_input(path))
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid config JSON: {exc}", EXIT_INPUT) from None
    if not isinstance(data, dict):
        raise CliError("config must be a JSON object", EXIT_INPUT)
    return data


def _write_report(args, resp: CheckResponse, csv_reports) -> None:
    doc = resp.model_dump(mode="json")
    if not args.output:
        sys.stdout.write(_dump(doc))
        return
    out = Path(args.output)
    write_atomic(out, _dump(doc))
    from .analysis import CheckItem, CheckReport

    for name, rep in csv_reports:
        report = CheckReport(
            rep["name"],
            [CheckItem(i["k"], i["measured"], i["bound"], i["pass"], i.get("label", "")) for i in rep["items"]],
            rep["notes"],
        )
        suffix = "" if name is None else f".{name}"
        write_atomic(out.with_name(out.stem + suffix + ".csv"), report.to_csv())


def cmd_check(args) -> int:
    if args.suite not in SUITES:
        raise CliError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", EXIT_INPUT)
    req = CheckRequest(
        suite=args.suite,
        seed=args.seed,
        tolerance=args.tolerance,
        config=_load_config(args.input),
        workers=args.workers,
    )
    resp = _run(args, "handle_check", req, CheckResponse)
    report = resp.body["report"]
    _write_report(args, resp, [(None, report)])
    log.info("%s: %s", report["name"], "pass" if report["pass"] else "FAIL")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_report(args) -> int:
    suites = args.suite.split(",") if args.suite else None
    if suites:
        unknown = [s for s in suites if s not in SUITES]
        if unknown:
            raise CliError(f"unknown suite(s): {', '.join(unknown)}", EXIT_INPUT)
    req = ReportRequest(suites=suites, seed=args.seed, tolerance=args.tolerance, workers=args.workers)
    resp = _run(args, "handle_report", req, CheckResponse)
    _write_report(args, resp, [(r["name"], r) for r in resp.body["reports"]])
    for r in resp.body["reports"]:
        sys.stderr.write(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}\n")
    return EXIT_OK if resp.body["pass"] else EXIT_FAIL


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("schlumprecht.service:app", host=args.host, port=args.port)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input file ('-' or omitted: stdin)")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default: 0)")
    common.add_argument("--tolerance", type=float, default=1e-10, help="absolute tolerance (default: 1e-10)")
    common.add_argument("--certified", action="store_true", help="also report a directed-rounding enclosure")
    common.add_argument("--cache-dir", help="norm cache directory (default: $SCHLUMPRECHT_CACHE_DIR)")
    common.add_argument("--max-support", type=int, default=None, help="refuse vectors with larger support")
    common.add_argument("--suite", help="suite name for check; comma list for report")
    common.add_argument("--workers", type=int, default=1, help="threads for suite items")
    common.add_argument("--server", help="send the request to a running service at this URL")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="schlumprecht", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="exact norm with partition certificate")
    p.add_argument("--oracle", action="store_true", help="cross-check with brute force (support <= 6)")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("split-sum", parents=[common], help="best sum of piece norms over <= r pieces")
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_split_sum)

    p = sub.add_parser("level-norm", parents=[common], help="t-level truncation of the norm")
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_level_norm)

    p = sub.add_parser("build", parents=[common], help="build vectors from a JSON spec")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", parents=[common], help=f"run a suite: {', '.join(SUITES)}")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", parents=[common], help="run several suites into one report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cpath = None if args.command == "serve" or args.server else cache_path(args.cache_dir)
    engine = default_engine()
    if cpath is not None:
        engine.preload(load_cache(cpath))
    try:
        code = args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    if cpath is not None:
        save_cache(cpath, engine.cached_values())
    return code


if __name__ == "__main__":
    sys.exit(main())
