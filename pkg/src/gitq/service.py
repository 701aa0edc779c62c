"""HTTP facade: analysis requests, report retrieval, and badge endpoints."""

from __future__ import annotations

import hashlib
import logging
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import badges as badge_engine
from . import ingest
from .errors import (
    CloneFailed,
    EmptyRepository,
    GitqError,
    InvalidLocator,
    NotARepository,
    UnknownMetric,
)
from .pipeline import AnalysisOptions, CacheKey, ReportCache, analyze

log = logging.getLogger(__name__)

DEFAULT_LISTEN = "127.0.0.1:8490"


@dataclass(frozen=True)
class ApiError:
    code: str  # invalid_url | clone_failed | not_found | analysis_pending | internal
    message: str
    retryable: bool = False

    def response(self, status: int) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={
                "code": self.code,
                "message": self.message,
                "retryable": self.retryable,
            },
        )


@dataclass
class ServiceConfig:
    cache_dir: str | Path | None = None
    max_concurrent_analyses: int = 2
    queue_size: int = 8
    sync_budget_ms: int = 2000
    window_days: int = 90
    bug_labels: tuple[str, ...] = ("bug",)
    issue_snapshot: str | Path | None = None
    workspace_parent: str | Path | None = None
    thresholds: dict[str, tuple[float, float, float]] | None = None
    # Origins allowed to POST analyze; GET endpoints are world-readable.
    analyze_origins: tuple[str, ...] = field(default_factory=tuple)


class _Jobs:
    """In-flight analyses keyed by canonical URL, with a bounded queue."""

    def __init__(self, max_workers: int, queue_size: int):
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self.capacity = max_workers + queue_size
        self.lock = threading.Lock()
        self.futures: dict[str, Future] = {}

    def get(self, url: str) -> Future | None:
        with self.lock:
            return self.futures.get(url)

    def submit(self, url: str, fn) -> Future | None:
        """Queue an analysis; None when the queue is full."""
        with self.lock:
            existing = self.futures.get(url)
            if existing is not None:
                return existing
            pending = sum(1 for f in self.futures.values() if not f.done())
            if pending >= self.capacity:
                return None
            future = self.executor.submit(fn)
            self.futures[url] = future
            future.add_done_callback(lambda _f: self._forget_failed(url))
            return future

    def _forget_failed(self, url: str) -> None:
        # keep finished successes until the next poll clears them; drop
        # failures immediately so a retry can resubmit
        with self.lock:
            future = self.futures.get(url)
            if future is not None and future.done() and future.exception() is not None:
                del self.futures[url]

    def clear_done(self, url: str) -> None:
        with self.lock:
            future = self.futures.get(url)
            if future is not None and future.done():
                del self.futures[url]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    cfg = config or ServiceConfig()
    app = FastAPI(title="gitq", docs_url=None, redoc_url=None)
    cache = ReportCache(cfg.cache_dir)
    jobs = _Jobs(cfg.max_concurrent_analyses, cfg.queue_size)
    app.state.cache = cache
    app.state.jobs = jobs
    app.state.config = cfg

    def run_analysis(url: str, window_days: int, bug_labels: tuple[str, ...]):
        opts = AnalysisOptions(
            window_days=window_days,
            bug_labels=bug_labels,
            issue_snapshot=cfg.issue_snapshot,
            workspace_parent=cfg.workspace_parent,
            thresholds=cfg.thresholds,
        )
        return analyze(url, opts, cache)

    @app.middleware("http")
    async def cors(request: Request, call_next):
        origin = request.headers.get("origin")
        if request.method == "OPTIONS":
            response = Response(status_code=204)
        else:
            response = await call_next(request)
        if origin:
            analyzing = request.url.path.endswith("/analyze")
            if not analyzing or origin in cfg.analyze_origins:
                response.headers["Access-Control-Allow-Origin"] = (
                    origin if analyzing else "*"
                )
                response.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS"
                response.headers["Access-Control-Allow-Headers"] = "Content-Type"
        return response

    @app.post("/api/v1/analyze")
    async def post_analyze(request: Request):
        try:
            body = await request.json()
        except Exception:
            return ApiError("invalid_url", "request body must be JSON").response(422)
        if not isinstance(body, dict) or not isinstance(body.get("repo_url"), str):
            return ApiError("invalid_url", "body needs a string repo_url").response(422)
        window_days = body.get("window_days", cfg.window_days)
        if not isinstance(window_days, int) or window_days <= 0:
            return ApiError("invalid_url", "window_days must be a positive integer").response(422)
        labels = body.get("bug_labels", list(cfg.bug_labels))
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            return ApiError("invalid_url", "bug_labels must be a list of strings").response(422)
        repo_url = body["repo_url"]
        try:
            ref, head = ingest.peek_head(repo_url)
        except (InvalidLocator, NotARepository, EmptyRepository) as exc:
            return ApiError("invalid_url", str(exc)).response(422)
        except CloneFailed as exc:
            return ApiError("clone_failed", str(exc), retryable=True).response(502)
        if cache.lookup(CacheKey(ref.canonical_url, head)) is not None:
            return JSONResponse({"commit": head, "status": "done"})
        future = jobs.get(ref.canonical_url)
        if future is None:
            future = jobs.submit(
                ref.canonical_url,
                lambda: run_analysis(repo_url, window_days, tuple(labels)),
            )
            if future is None:
                return ApiError(
                    "internal", "analysis queue is full", retryable=True
                ).response(503)
        try:
            report = future.result(timeout=cfg.sync_budget_ms / 1000.0)
        except (FutureTimeout, TimeoutError):
            return JSONResponse({"status": "pending"}, status_code=202)
        except CloneFailed as exc:
            return ApiError("clone_failed", str(exc), retryable=True).response(502)
        except GitqError as exc:
            return ApiError("internal", str(exc)).response(500)
        jobs.clear_done(ref.canonical_url)
        return JSONResponse({"commit": report.commit, "status": "done"})

    def _find_report(url: str | None, commit: str | None):
        if not url:
            return None, ApiError("invalid_url", "missing url parameter").response(422)
        try:
            ref = ingest.canonicalize(url)
        except InvalidLocator as exc:
            return None, ApiError("invalid_url", str(exc)).response(422)
        commit = commit or cache.latest_commit(ref.canonical_url)
        if commit is None:
            future = jobs.get(ref.canonical_url)
            if future is not None and not future.done():
                return None, ApiError(
                    "analysis_pending", "analysis in progress", retryable=True
                ).response(404)
            return None, ApiError("not_found", f"{url} has not been analyzed").response(404)
        report = cache.lookup(CacheKey(ref.canonical_url, commit))
        if report is None:
            return None, ApiError(
                "not_found", f"no report for {url} at {commit}"
            ).response(404)
        return report, None

    @app.get("/api/v1/report")
    async def get_report(url: str | None = None, commit: str | None = None):
        report, error = _find_report(url, commit)
        if error is not None:
            return error
        return Response(content=report.to_json(), media_type="application/json")

    @app.get("/api/v1/badge/{metric_id}.svg")
    async def get_badge(metric_id: str, url: str | None = None, commit: str | None = None):
        if metric_id not in badge_engine.REGISTRY:
            return ApiError("not_found", f"unknown metric {metric_id!r}").response(404)
        report, error = _find_report(url, commit)
        if error is not None:
            return error
        badge = report.badge(metric_id)
        if badge is None:
            return ApiError(
                "not_found", f"metric {metric_id!r} not present in this report"
            ).response(404)
        svg = badge_engine.render_svg(badge)
        etag = '"' + hashlib.sha256(svg).hexdigest()[:32] + '"'
        headers = {
            "ETag": etag,
            "Cache-Control": (
                "public, max-age=31536000, immutable" if commit else "public, max-age=300"
            ),
        }
        return Response(content=svg, media_type="image/svg+xml", headers=headers)

    @app.exception_handler(Exception)
    async def internal_error(_request: Request, exc: Exception):
        log.exception("unhandled service error: %s", exc)
        return ApiError("internal", "internal server error").response(500)

    return app


def serve(
    listen: str = DEFAULT_LISTEN,
    config: ServiceConfig | None = None,
) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    host, _, port = listen.rpartition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port))
