"""Request handlers and the FastAPI application.

The handlers are plain functions on the pydantic models; the CLI calls them
in-process and the HTTP routes wrap them unchanged, so both produce the same
payloads.
"""

from __future__ import annotations

import datetime as _dt
import time

from fastapi import FastAPI, HTTPException

from . import __version__
from .analysis import AnalysisError
from .constructions import (
    ConstructionError,
    YardstickSpec,
    build_constant_block,
    build_interleaved_sequence,
    build_l1_average,
    build_yardstick,
    build_yardstick_average,
    l1_average_constants,
)
from .engine import SupportTooLarge, certified_norm, default_engine, level_norm
from .oracle import OracleLimitExceeded, brute_force_norm
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
    VectorRecord,
)
from .suites import SUITES, UnknownSuite, run_suite
from .vectors import SparseVector, VectorFormatError

# errors a client can fix by changing the request
BAD_REQUEST = (VectorFormatError, ConstructionError, AnalysisError, UnknownSuite)
# work refused because of a size guard
TOO_LARGE = (SupportTooLarge, OracleLimitExceeded)


def _guard(x: SparseVector, max_support: int | None) -> None:
    if max_support is not None and len(x) > max_support:
        raise SupportTooLarge(f"support size {len(x)} exceeds limit {max_support}")


def handle_norm(req: NormRequest) -> NormResponse:
    x = req.to_vector()
    _guard(x, req.max_support)
    t0 = time.perf_counter()
    oracle = brute_force_norm(x) if req.oracle else None
    result = default_engine().norm(x)
    enclosure = certified_norm(x) if req.certified else None
    return NormResponse(
        value=result.value,
        certificate=None if result.certificate is None else result.certificate.to_dict(),
        enclosure=enclosure,
        oracle_value=oracle,
        support_size=len(x),
        timing=time.perf_counter() - t0,
    )


def handle_split_sum(req: SplitSumRequest) -> SplitSumResponse:
    x = req.to_vector()
    _guard(x, req.max_support)
    t0 = time.perf_counter()
    value, pieces = default_engine().split_sum(x, req.r)
    return SplitSumResponse(value=value, pieces=[(E.lo, E.hi) for E in pieces], timing=time.perf_counter() - t0)


def handle_level_norm(req: LevelNormRequest) -> LevelNormResponse:
    x = req.to_vector()
    _guard(x, req.max_support)
    t0 = time.perf_counter()
    value = level_norm(x, req.t)
    return LevelNormResponse(value=value, timing=time.perf_counter() - t0)


def _record(name: str, x: SparseVector, block: int | None = None) -> VectorRecord:
    span = x.span()
    return VectorRecord(
        name=name,
        entries=[(i, v) for i, v in x.entries],
        support=None if span is None else (span.lo, span.hi),
        card=len(x),
        norm=default_engine().norm_value(x),
        block=block,
    )


def _need(spec: BuildSpec, *fields: str) -> None:
    missing = [f for f in fields if getattr(spec, f) is None]
    if missing:
        raise ConstructionError(f"{spec.kind} spec needs {', '.join(missing)}")


def handle_build(spec: BuildSpec) -> BuildResponse:
    params = spec.model_dump(exclude_none=True)
    extra: dict = {}
    if spec.kind == "constant-block":
        _need(spec, "length")
        records = [_record("block", build_constant_block(spec.length, spec.start, spec.normalized))]
    elif spec.kind == "yardstick":
        _need(spec, "q")
        n = spec.n if spec.n is not None else len(spec.q)
        ys = build_yardstick(YardstickSpec(n, tuple(spec.q), spec.start))
        records = [_record(f"y{i}", y) for i, y in enumerate(ys, 1)]
    elif spec.kind == "l1-average":
        _need(spec, "m")
        records = [_record("average", build_l1_average(spec.m, spec.block_length, spec.start))]
        extra["constants"] = l1_average_constants(spec.m, spec.block_length)
    elif spec.kind == "yardstick-average":
        _need(spec, "q", "m")
        n = spec.n if spec.n is not None else len(spec.q)
        z, parts = build_yardstick_average(n, spec.q, spec.m, spec.start)
        records = [_record("z", z)] + [_record(f"z{i}", p) for i, p in enumerate(parts, 1)]
    else:
        _need(spec, "n_seq", "count")
        blocks = build_interleaved_sequence(spec.n_seq, spec.count, spec.q_base, spec.start)
        records = [
            _record(f"V{b.m}_y{i}", y, block=b.m) for b in blocks for i, y in enumerate(b.vectors, 1)
        ]
        extra["block_types"] = [b.n for b in blocks]
        extra["blocks"] = [
            {"m": b.m, "i": b.i, "j": b.j, "n": b.n, "q": list(b.q), "support": [b.lo, b.hi]} for b in blocks
        ]
    return BuildResponse(kind=spec.kind, parameters=params, vectors=records, extra=extra)


def _meta(elapsed: float) -> dict:
    return {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "elapsed_s": elapsed,
        "version": __version__,
    }


def handle_check(req: CheckRequest) -> CheckResponse:
    t0 = time.perf_counter()
    report = run_suite(req.suite, req.seed, req.tolerance, req.config, req.workers)
    body = {
        "suite": req.suite,
        "seed": req.seed,
        "tolerance": req.tolerance,
        "report": report.to_dict(),
    }
    return CheckResponse(body=body, meta=_meta(time.perf_counter() - t0))


def handle_report(req: ReportRequest) -> CheckResponse:
    t0 = time.perf_counter()
    names = req.suites or list(SUITES)
    reports = [run_suite(n, req.seed, req.tolerance, None, req.workers).to_dict() for n in names]
    body = {
        "seed": req.seed,
        "tolerance": req.tolerance,
        "pass": all(r["pass"] for r in reports),
        "summary": {r["name"]: r["pass"] for r in reports},
        "reports": reports,
    }
    return CheckResponse(body=body, meta=_meta(time.perf_counter() - t0))


def _call(handler, request):
    try:
        return handler(request)
    except TOO_LARGE as exc:
        raise HTTPException(status_code=413, detail=str(exc)) from None
    except BAD_REQUEST as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def create_app() -> FastAPI:
    app = FastAPI(title="schlumprecht", version=__version__)

    @app.get("/health")
    def health():
        stats = default_engine().stats
        return {"status": "ok", "version": __version__, "cache": dict(stats)}

    @app.get("/suites")
    def suites():
        return {"suites": list(SUITES)}

    @app.post("/norm", response_model=NormResponse)
    def norm_route(req: NormRequest):
        return _call(handle_norm, req)

    @app.post("/split-sum", response_model=SplitSumResponse)
    def split_sum_route(req: SplitSumRequest):
        return _call(handle_split_sum, req)

    @app.post("/level-norm", response_model=LevelNormResponse)
    def level_norm_route(req: LevelNormRequest):
        return _call(handle_level_norm, req)

    @app.post("/build", response_model=BuildResponse)
    def build_route(spec: BuildSpec):
        return _call(handle_build, spec)

    @app.post("/check", response_model=CheckResponse)
    def check_route(req: CheckRequest):
        return _call(handle_check, req)

    @app.post("/report", response_model=CheckResponse)
    def report_route(req: ReportRequest):
        return _call(handle_report, req)

    return app


app = create_app()
