"""Bug-issue counts from a hosting platform's issue API or an offline snapshot."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit

import requests

from .errors import (
    AuthFailed,
    NetworkError,
    RateLimited,
    SnapshotFormatError,
    UnsupportedHost,
)
from .ingest import RepoRef

TOKEN_ENV = "GITQ_ISSUE_TOKEN"
DEFAULT_BUG_LABELS = frozenset({"bug"})
_PAGE_SIZE = 100

_STATES = ("open", "closed")


@dataclass(frozen=True)
class IssueRecord:
    id: int
    state: str  # "open" | "closed"
    labels: frozenset[str]  # lowercased


@dataclass(frozen=True)
class IssueReport:
    open_bugs: int
    closed_bugs: int
    bug_open_share: float | None  # None when no bug issues exist
    source: str  # "api" | "offline"
    fetched_at: int


def fetch_issues(
    repo: RepoRef,
    token: str | None = None,
    session: requests.Session | None = None,
) -> list[IssueRecord]:
    """All issues of a hosted repository, open and closed, pull requests
    excluded. Paginates until exhausted; honors rate-limit responses."""
    host = urlsplit(repo.canonical_url).netloc
    if not host:
        raise UnsupportedHost(
            "local repositories have no issue API; provide an offline snapshot"
        )
    if host != "github.com":
        raise UnsupportedHost(f"no issue API support for host {host!r}")
    owner_name = urlsplit(repo.canonical_url).path.strip("/")
    token = token or os.environ.get(TOKEN_ENV)
    sess = session or requests.Session()
    headers = {"Accept": "application/vnd.github+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    records: list[IssueRecord] = []
    url = f"https://api.github.com/repos/{owner_name}/issues"
    page_no = 1
    while True:
        params = {"state": "all", "per_page": _PAGE_SIZE, "page": page_no}
        try:
            resp = sess.get(url, headers=headers, params=params, timeout=30)
        except requests.RequestException as exc:
            raise NetworkError(f"issue API request failed: {exc}") from exc
        if resp.status_code == 401:
            raise AuthFailed("issue API rejected the supplied token")
        if resp.status_code in (403, 429):
            retry = resp.headers.get("Retry-After")
            reset = resp.headers.get("X-RateLimit-Reset")
            retry_after = None
            if retry is not None:
                retry_after = float(retry)
            elif reset is not None:
                retry_after = max(0.0, float(reset) - time.time())
            raise RateLimited(
                f"issue API rate limited ({resp.status_code})", retry_after
            )
        if resp.status_code >= 400:
            raise NetworkError(f"issue API returned {resp.status_code}")
        page = resp.json()
        for entry in page:
            if "pull_request" in entry:
                continue
            labels = frozenset(
                str(label.get("name", "")).lower()
                for label in entry.get("labels", [])
                if label.get("name")
            )
            records.append(
                IssueRecord(
                    id=int(entry["number"]),
                    state=str(entry["state"]).lower(),
                    labels=labels,
                )
            )
        # exhausted when the raw page is short and no continuation is offered
        if len(page) < _PAGE_SIZE and "next" not in resp.links:
            break
        page_no += 1
    return records


def load_issue_snapshot(path: str | Path) -> list[IssueRecord]:
    """Parse an offline snapshot: a JSON array of
    ``{"id": int, "state": "open"|"closed", "labels": [str, ...]}`` objects.
    Unknown extra keys are ignored."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, list):
        raise SnapshotFormatError(f"{path}: top-level value must be an array")
    records: list[IssueRecord] = []
    seen_ids: set[int] = set()
    for index, entry in enumerate(data):
        where = f"{path}: record {index}"
        if not isinstance(entry, dict):
            raise SnapshotFormatError(f"{where}: expected an object")
        if "id" not in entry or not isinstance(entry["id"], int):
            raise SnapshotFormatError(f"{where}: missing or non-integer 'id'")
        if "state" not in entry:
            raise SnapshotFormatError(f"{where} (id {entry['id']}): missing 'state'")
        state = str(entry["state"]).lower()
        if state not in _STATES:
            raise SnapshotFormatError(
                f"{where} (id {entry['id']}): state must be 'open' or 'closed', "
                f"got {entry['state']!r}"
            )
        labels_raw = entry.get("labels", [])
        if not isinstance(labels_raw, list) or not all(
            isinstance(s, str) for s in labels_raw
        ):
            raise SnapshotFormatError(
                f"{where} (id {entry['id']}): labels must be an array of strings"
            )
        if entry["id"] in seen_ids:
            raise SnapshotFormatError(f"{where}: duplicate id {entry['id']}")
        seen_ids.add(entry["id"])
        records.append(
            IssueRecord(
                id=entry["id"],
                state=state,
                labels=frozenset(s.lower() for s in labels_raw),
            )
        )
    return records


def bug_ratio(
    issues: list[IssueRecord],
    bug_labels: frozenset[str] | set[str] = DEFAULT_BUG_LABELS,
    source: str = "offline",
    fetched_at: int | None = None,
) -> IssueReport:
    """Open/closed counts of bug-labeled issues, and the open share.

    The share is open/(open+closed) so it stays within [0, 1]; it is None
    when no issue carries a bug label.
    """
    if not bug_labels:
        raise ValueError("bug_labels must be non-empty")
    wanted = frozenset(s.lower() for s in bug_labels)
    open_bugs = sum(1 for i in issues if i.state == "open" and i.labels & wanted)
    closed_bugs = sum(1 for i in issues if i.state == "closed" and i.labels & wanted)
    total = open_bugs + closed_bugs
    share = open_bugs / total if total else None
    return IssueReport(
        open_bugs=open_bugs,
        closed_bugs=closed_bugs,
        bug_open_share=share,
        source=source,
        fetched_at=int(time.time()) if fetched_at is None else fetched_at,
    )
