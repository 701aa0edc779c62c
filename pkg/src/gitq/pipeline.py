"""Full-analysis orchestration: acquire, compute metric families in
parallel, assemble the report, cache it, and dispose the workspace."""

from __future__ import annotations

import errno
import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import badges as badge_engine
from . import history as history_metrics
from . import ingest
from . import issues as issue_metrics
from . import source_metrics
from . import source_model
from .badges import Badge, Tier
from .errors import GitqError, StorageFull
from .history import HistoryReport
from .ingest import RepoRef, Workspace
from .issues import IssueReport
from .source_metrics import ClassMetrics, SourceMetricsReport

ENGINE_VERSION = "0.1.0"
CACHE_DIR_ENV = "GITQ_CACHE_DIR"

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheKey:
    """Identity of one analysis: where it came from and which commit."""

    canonical_url: str
    commit: str

    def __post_init__(self):
        if not self.canonical_url or not self.commit:
            raise ValueError("cache key needs both a canonical URL and a commit")


@dataclass(frozen=True)
class AnalysisOptions:
    window_days: int = history_metrics.DEFAULT_WINDOW_DAYS
    bug_labels: tuple[str, ...] = ("bug",)
    issue_snapshot: str | Path | None = None
    issue_token: str | None = None
    include_source: bool = True
    include_maintenance: bool = True
    include_issues: bool = True
    mode: str = "parallel"  # or "sequential"
    workspace_parent: str | Path | None = None
    thresholds: dict[str, tuple[float, float, float]] | None = None


@dataclass
class AnalysisReport:
    repo: RepoRef
    commit: str
    source: SourceMetricsReport | None
    history: HistoryReport | None
    issues: IssueReport | None
    badges: list[Badge]
    diagnostics: list[str]
    generated_at: int
    engine_version: str = ENGINE_VERSION

    def badge(self, metric_id: str) -> Badge | None:
        return next((b for b in self.badges if b.metric_id == metric_id), None)

    def to_dict(self) -> dict:
        return {
            "repo": {
                "source": self.repo.source,
                "canonical_url": self.repo.canonical_url,
                "display_name": self.repo.display_name,
            },
            "commit": self.commit,
            "source": _source_to_dict(self.source),
            "history": _history_to_dict(self.history),
            "issues": _issues_to_dict(self.issues),
            "badges": [_badge_to_dict(b) for b in self.badges],
            "diagnostics": list(self.diagnostics),
            "generated_at": self.generated_at,
            "engine_version": self.engine_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        repo = RepoRef(
            source=data["repo"]["source"],
            canonical_url=data["repo"]["canonical_url"],
            display_name=data["repo"]["display_name"],
        )
        return cls(
            repo=repo,
            commit=data["commit"],
            source=_source_from_dict(data["source"]),
            history=_history_from_dict(data["history"]),
            issues=_issues_from_dict(data["issues"]),
            badges=[_badge_from_dict(b) for b in data["badges"]],
            diagnostics=list(data["diagnostics"]),
            generated_at=data["generated_at"],
            engine_version=data["engine_version"],
        )

    @classmethod
    def from_json(cls, raw: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(raw))


def reports_equal(a: AnalysisReport, b: AnalysisReport) -> bool:
    """Equality for determinism checks; generation time is excluded."""
    da, db = a.to_dict(), b.to_dict()
    da.pop("generated_at")
    db.pop("generated_at")
    return da == db


def _source_to_dict(report: SourceMetricsReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "per_class": {
            name: {
                "wmc": m.wmc,
                "dit": m.dit,
                "noc": m.noc,
                "cbo": m.cbo,
                "rfc": m.rfc,
                "lcom": m.lcom,
            }
            for name, m in sorted(report.per_class.items())
        },
        "aggregates": {
            "inherited_class_count": report.inherited_class_count,
            "overridden_method_count": report.overridden_method_count,
            "package_count": report.package_count,
            "dependency_edge_count": report.dependency_edge_count,
            "mean_fanout": report.mean_fanout,
            "analyzed_file_count": report.analyzed_file_count,
            "skipped_file_count": report.skipped_file_count,
        },
    }


def _source_from_dict(data: dict | None) -> SourceMetricsReport | None:
    if data is None:
        return None
    agg = data["aggregates"]
    return SourceMetricsReport(
        per_class={
            name: ClassMetrics(**metrics) for name, metrics in data["per_class"].items()
        },
        inherited_class_count=agg["inherited_class_count"],
        overridden_method_count=agg["overridden_method_count"],
        package_count=agg["package_count"],
        dependency_edge_count=agg["dependency_edge_count"],
        mean_fanout=agg["mean_fanout"],
        analyzed_file_count=agg["analyzed_file_count"],
        skipped_file_count=agg["skipped_file_count"],
    )


def _history_to_dict(report: HistoryReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "total_authors": report.total_authors,
        "active_authors": report.active_authors,
        "active_author_rate": report.active_author_rate,
        "mean_file_impact": report.mean_file_impact,
        "mean_line_impact": report.mean_line_impact,
        "commit_count": report.commit_count,
        "window_days": report.window_days,
    }


def _history_from_dict(data: dict | None) -> HistoryReport | None:
    return HistoryReport(**data) if data is not None else None


def _issues_to_dict(report: IssueReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "open_bugs": report.open_bugs,
        "closed_bugs": report.closed_bugs,
        "bug_open_share": report.bug_open_share,
        "source": report.source,
        "fetched_at": report.fetched_at,
    }


def _issues_from_dict(data: dict | None) -> IssueReport | None:
    return IssueReport(**data) if data is not None else None


def _badge_to_dict(badge: Badge) -> dict:
    return {
        "metric_id": badge.metric_id,
        "label": badge.label,
        "value_text": badge.value_text,
        "tier": {"level": badge.tier.level, "color": badge.tier.color},
        "insight": badge.insight,
    }


def _badge_from_dict(data: dict) -> Badge:
    return Badge(
        metric_id=data["metric_id"],
        label=data["label"],
        value_text=data["value_text"],
        tier=Tier(level=data["tier"]["level"], color=data["tier"]["color"]),
        insight=data["insight"],
    )


# --- on-disk report cache ----------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "gitq"


class ReportCache:
    """Durable report store, one file per (canonical URL, commit) key.

    Each entry is the report JSON followed by a trailing line with its
    SHA-256 checksum; entries failing the check are evicted as misses.
    A per-URL pointer file tracks the most recently stored commit.
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root else default_cache_dir()
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _url_hash(self, canonical_url: str) -> str:
        return hashlib.sha256(canonical_url.encode("utf-8")).hexdigest()[:24]

    def path_for(self, key: CacheKey) -> Path:
        return self.root / f"{self._url_hash(key.canonical_url)}-{key.commit}.json"

    def _latest_path(self, canonical_url: str) -> Path:
        return self.root / f"{self._url_hash(canonical_url)}-latest"

    def lookup(self, key: CacheKey) -> AnalysisReport | None:
        path = self.path_for(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            return None
        body, _, trailer = raw.rpartition(b"\nsha256:")
        digest = trailer.strip().decode("ascii", errors="replace")
        if not body or hashlib.sha256(body).hexdigest() != digest:
            log.warning("cache entry %s failed its integrity check; evicting", path.name)
            path.unlink(missing_ok=True)
            return None
        try:
            return AnalysisReport.from_json(body.decode("utf-8"))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            log.warning("cache entry %s unreadable (%s); evicting", path.name, exc)
            path.unlink(missing_ok=True)
            return None

    def store(self, key: CacheKey, report: AnalysisReport) -> None:
        if report.commit != key.commit:
            raise ValueError(
                f"report commit {report.commit} does not match key commit {key.commit}"
            )
        body = report.to_json().encode("utf-8")
        payload = body + b"\nsha256:" + hashlib.sha256(body).hexdigest().encode() + b"\n"
        with self._write_lock:
            try:
                self._write_atomic(self.path_for(key), payload)
            except OSError as exc:
                if exc.errno != errno.ENOSPC:
                    raise
                self._evict_oldest()
                try:
                    self._write_atomic(self.path_for(key), payload)
                except OSError as retry_exc:
                    raise StorageFull(str(retry_exc)) from retry_exc
            self._write_atomic(
                self._latest_path(key.canonical_url), key.commit.encode("ascii")
            )

    def latest_commit(self, canonical_url: str) -> str | None:
        try:
            return self._latest_path(canonical_url).read_text("ascii").strip() or None
        except FileNotFoundError:
            return None

    def _write_atomic(self, path: Path, payload: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(payload)
        os.replace(tmp, path)

    def _evict_oldest(self) -> None:
        entries = sorted(
            (p for p in self.root.glob("*.json")),
            key=lambda p: p.stat().st_mtime,
        )
        if entries:
            entries[0].unlink(missing_ok=True)


def cache_lookup(cache: ReportCache, key: CacheKey) -> AnalysisReport | None:
    return cache.lookup(key)


def cache_store(cache: ReportCache, key: CacheKey, report: AnalysisReport) -> None:
    cache.store(key, report)


# --- orchestration -----------------------------------------------------------


def analyze(
    source: str,
    options: AnalysisOptions | None = None,
    cache: ReportCache | None = None,
) -> AnalysisReport:
    """Analyze a repository end to end; serve from cache when the head
    commit is unchanged.

    Source metrics degrade per file, the issue family degrades to absent,
    and acquisition or history failures abort. The workspace is always
    disposed, on success and on error.
    """
    opts = options or AnalysisOptions()
    ref, head = ingest.peek_head(source)
    key = CacheKey(ref.canonical_url, head)
    if cache is not None:
        hit = cache.lookup(key)
        if hit is not None:
            return hit
    ws = ingest.acquire(ref, parent_dir=opts.workspace_parent)
    try:
        report = _compute(ws, opts)
    finally:
        ingest.dispose(ws)
    if cache is not None:
        cache.store(CacheKey(ref.canonical_url, report.commit), report)
    return report


def _compute(ws: Workspace, opts: AnalysisOptions) -> AnalysisReport:
    slots: dict[str, object] = {"source": None, "history": None, "issues": None}
    notes: dict[str, list[str]] = {"source": [], "history": [], "issues": []}

    def run_source():
        if not opts.include_source:
            notes["source"].append("source metrics disabled by options")
            return
        if not source_model.iter_source_files(ws.root):
            notes["source"].append("no analyzed-language files; source metrics skipped")
            return
        model = source_model.build_corpus(ws)
        notes["source"].extend(model.diagnostics)
        slots["source"] = source_metrics.source_report(model)

    def run_history():
        if not opts.include_maintenance:
            notes["history"].append("maintenance metrics disabled by options")
            return
        with ws.lease():
            slots["history"] = history_metrics.analyze_history(
                ws, window_days=opts.window_days
            )

    def run_issues():
        if not opts.include_issues:
            notes["issues"].append("issue metrics disabled by options")
            return
        labels = frozenset(opts.bug_labels) or issue_metrics.DEFAULT_BUG_LABELS
        try:
            if opts.issue_snapshot is not None:
                records = issue_metrics.load_issue_snapshot(opts.issue_snapshot)
                fetched_at = int(Path(opts.issue_snapshot).stat().st_mtime)
                slots["issues"] = issue_metrics.bug_ratio(
                    records, labels, source="offline", fetched_at=fetched_at
                )
            else:
                records = issue_metrics.fetch_issues(ws.repo, token=opts.issue_token)
                slots["issues"] = issue_metrics.bug_ratio(records, labels, source="api")
        except GitqError as exc:
            notes["issues"].append(f"issue metrics unavailable: {exc}")

    tasks = (run_source, run_history, run_issues)
    if opts.mode == "sequential":
        for task in tasks:
            task()
    else:
        with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
            futures = [pool.submit(task) for task in tasks]
            for future in futures:
                future.result()  # re-raise fatal family errors

    diagnostics = notes["source"] + notes["history"] + notes["issues"]
    report = AnalysisReport(
        repo=ws.repo,
        commit=ws.head_commit,
        source=slots["source"],  # type: ignore[arg-type]
        history=slots["history"],  # type: ignore[arg-type]
        issues=slots["issues"],  # type: ignore[arg-type]
        badges=[],
        diagnostics=diagnostics,
        generated_at=int(time.time()),
    )
    if any(slots[name] is not None for name in ("source", "history", "issues")):
        report.badges = badge_engine.make_badges(report, opts.thresholds)
    return report
