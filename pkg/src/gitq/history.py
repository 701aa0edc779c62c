"""Maintenance metrics mined from the commit log of a workspace."""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from pathlib import Path

from .errors import DegenerateSnapshot, EmptyLog, EmptyRepository, NotARepository
from .ingest import Workspace

DEFAULT_WINDOW_DAYS = 90
_DAY_SECONDS = 86400

# Record and field separators for the log format; never appear in git output.
_REC = "\x02"
_SEP = "\x01"


@dataclass(frozen=True)
class CommitRecord:
    """One commit with its author identity and diff size."""

    id: str
    author_key: str
    timestamp: int
    files_changed: int
    lines_changed: int


@dataclass(frozen=True)
class HistoryReport:
    total_authors: int
    active_authors: int
    active_author_rate: float
    mean_file_impact: float
    mean_line_impact: float
    commit_count: int
    window_days: int


def _run_git(args: list[str], cwd: Path) -> str:
    proc = subprocess.run(
        ["git", *args], cwd=cwd, capture_output=True, text=True, errors="replace"
    )
    if proc.returncode != 0:
        raise NotARepository(f"git {' '.join(args[:2])} failed: {proc.stderr.strip()}")
    return proc.stdout


def read_log(ws: Workspace) -> list[CommitRecord]:
    """Every commit reachable from the default branch tip, with numstat-style
    file and line counts. Merge commits are diffed against their first
    parent; binary changes count as a file with zero lines."""
    with ws.lease():
        out = _run_git(
            [
                "log",
                "--no-color",
                "--diff-merges=first-parent",
                "--numstat",
                f"--pretty=format:{_REC}%H{_SEP}%ae{_SEP}%an{_SEP}%at",
            ],
            cwd=ws.root,
        )
    records: list[CommitRecord] = []
    for block in out.split(_REC):
        if not block.strip():
            continue
        lines = block.splitlines()
        commit_id, email, name, raw_ts = lines[0].split(_SEP)
        files = 0
        changed = 0
        for line in lines[1:]:
            parts = line.split("\t")
            if len(parts) != 3:
                continue
            added, deleted, _path = parts
            files += 1
            if added != "-":  # '-' marks a binary change
                changed += int(added) + int(deleted)
        author_key = email.strip().lower() or name.strip().lower()
        records.append(
            CommitRecord(
                id=commit_id.lower(),
                author_key=author_key,
                timestamp=int(raw_ts),
                files_changed=files,
                lines_changed=changed,
            )
        )
    if not records:
        raise EmptyRepository(f"no commits in {ws.root}")
    return records


def head_snapshot_stats(ws: Workspace) -> tuple[int, int]:
    """(tracked file count, newline-delimited line count) of the head tree.

    Binary files (containing NUL) count as files but contribute no lines.
    A final line without a trailing newline still counts.
    """
    with ws.lease():
        out = _run_git(["ls-files", "-z"], cwd=ws.root)
        paths = [p for p in out.split("\0") if p]
        file_count = len(paths)
        line_count = 0
        for rel in paths:
            data = (ws.root / rel).read_bytes()
            if not data or b"\0" in data:
                continue
            line_count += data.count(b"\n")
            if not data.endswith(b"\n"):
                line_count += 1
    return file_count, line_count


def active_author_rate(
    log: list[CommitRecord],
    now: int | None = None,
    window_days: int = DEFAULT_WINDOW_DAYS,
) -> float:
    """Share of all historical authors with a commit inside the trailing
    window. ``now`` defaults to the newest commit timestamp, not wall clock."""
    if not log:
        raise EmptyLog("cannot compute author activity over an empty log")
    if window_days <= 0:
        raise ValueError("window_days must be positive")
    if now is None:
        now = max(r.timestamp for r in log)
    cutoff = now - window_days * _DAY_SECONDS
    all_authors = {r.author_key for r in log}
    active = {r.author_key for r in log if cutoff <= r.timestamp <= now}
    return len(active) / len(all_authors)


def commit_impact(
    log: list[CommitRecord], head_file_count: int, head_line_count: int
) -> tuple[float, float]:
    """Mean per-commit share of the head snapshot's files and lines touched.

    Denominators are the head tree's sizes, so single commits larger than
    the current tree can push a ratio above 1.
    """
    if not log:
        raise EmptyLog("cannot compute commit impact over an empty log")
    if head_file_count <= 0 or head_line_count <= 0:
        raise DegenerateSnapshot(
            f"head tree too small for impact ratios "
            f"(files={head_file_count}, lines={head_line_count})"
        )
    n = len(log)
    mean_files = sum(r.files_changed / head_file_count for r in log) / n
    mean_lines = sum(r.lines_changed / head_line_count for r in log) / n
    return mean_files, mean_lines


def build_history_report(
    log: list[CommitRecord],
    head_file_count: int,
    head_line_count: int,
    window_days: int = DEFAULT_WINDOW_DAYS,
    now: int | None = None,
) -> HistoryReport:
    """Assemble the maintenance report from an already-read log."""
    rate = active_author_rate(log, now=now, window_days=window_days)
    mean_files, mean_lines = commit_impact(log, head_file_count, head_line_count)
    if now is None:
        now = max(r.timestamp for r in log)
    cutoff = now - window_days * _DAY_SECONDS
    authors = {r.author_key for r in log}
    active = {r.author_key for r in log if cutoff <= r.timestamp <= now}
    return HistoryReport(
        total_authors=len(authors),
        active_authors=len(active),
        active_author_rate=rate,
        mean_file_impact=mean_files,
        mean_line_impact=mean_lines,
        commit_count=len(log),
        window_days=window_days,
    )


def analyze_history(ws: Workspace, window_days: int = DEFAULT_WINDOW_DAYS) -> HistoryReport:
    """Read the log and head stats of a workspace and build the report."""
    log = read_log(ws)
    files, line_total = head_snapshot_stats(ws)
    return build_history_report(log, files, line_total, window_days=window_days)
