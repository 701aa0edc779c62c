"""Repository acquisition: clone snapshots into disposable workspaces."""

from __future__ import annotations

import contextlib
import re
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlsplit

from .errors import (
    CloneFailed,
    DisposeFailed,
    EmptyRepository,
    InvalidLocator,
    NotARepository,
)

_HEX40 = re.compile(r"^[0-9a-f]{40}$")
_SCP_LIKE = re.compile(r"^(?P<user>[\w.-]+)@(?P<host>[\w.-]+):(?P<path>.+)$")

# Process-wide count of clone operations, read by the cache acceptance tests.
_clone_count = 0
_clone_lock = threading.Lock()


def clone_count() -> int:
    return _clone_count


def reset_clone_count() -> None:
    global _clone_count
    with _clone_lock:
        _clone_count = 0


def _record_clone() -> None:
    global _clone_count
    with _clone_lock:
        _clone_count += 1


@dataclass(frozen=True)
class RepoRef:
    """A repository locator plus its normalized identity."""

    source: str
    canonical_url: str
    display_name: str

    @property
    def is_local(self) -> bool:
        return self.canonical_url.startswith("file://")

    @property
    def local_path(self) -> Path | None:
        if not self.is_local:
            return None
        return Path(self.canonical_url[len("file://"):])


def canonicalize(source: str) -> RepoRef:
    """Normalize a locator into a RepoRef; purely syntactic, idempotent.

    Remote URLs lowercase to scheme://host/owner/name with trailing ``.git``
    and slashes stripped. Local paths canonicalize to file://<absolute path>
    with the path case preserved (local filesystems may be case sensitive).
    """
    source = source.strip()
    if not source:
        raise InvalidLocator("empty repository locator")

    scp = _SCP_LIKE.match(source)
    if scp and "://" not in source:
        path = scp.group("path")
        source_url = f"ssh://{scp.group('host')}/{path}"
        return _canonical_from_url(source, source_url)

    if "://" in source:
        scheme = source.split("://", 1)[0].lower()
        if scheme == "file":
            raw = source[len(scheme) + 3:]
            return _canonical_local(source, raw)
        return _canonical_from_url(source, source)

    return _canonical_local(source, source)


def _canonical_from_url(original: str, url: str) -> RepoRef:
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        raise InvalidLocator(f"malformed repository URL: {original!r}")
    host = parts.netloc.rsplit("@", 1)[-1]  # drop userinfo
    path = parts.path.strip("/")
    if path.endswith(".git"):
        path = path[: -len(".git")]
    path = path.strip("/")
    if not path:
        raise InvalidLocator(f"repository URL has no path: {original!r}")
    canonical = f"{parts.scheme.lower()}://{host.lower()}/{path.lower()}"
    segments = [s for s in path.split("/") if s]
    display = "/".join(segments[-2:]) if len(segments) >= 2 else segments[-1]
    return RepoRef(source=original, canonical_url=canonical, display_name=display)


def _canonical_local(original: str, raw_path: str) -> RepoRef:
    path = raw_path.rstrip("/") or "/"
    if path.endswith(".git"):
        path = path[: -len(".git")] or "/"
    resolved = Path(path).absolute()
    # absolute() keeps symlinks; collapse ".." lexically for stability
    resolved = Path(*_collapse_dots(resolved.parts))
    parts = [p for p in resolved.parts if p != "/"]
    display = "/".join(parts[-2:]) if len(parts) >= 2 else (parts[-1] if parts else "/")
    return RepoRef(source=original, canonical_url=f"file://{resolved}", display_name=display)


def _collapse_dots(parts: tuple[str, ...]) -> list[str]:
    out: list[str] = []
    for p in parts:
        if p == ".":
            continue
        if p == ".." and out and out[-1] not in ("/", ".."):
            out.pop()
            continue
        out.append(p)
    return out or ["/"]


@dataclass
class Workspace:
    """A disposable on-disk snapshot of a repository, full history included.

    The snapshot is read-only after acquisition. Computations take read
    leases via :meth:`lease`; disposal with live leases is deferred until
    the last lease is released.
    """

    root: Path
    repo: RepoRef
    head_commit: str
    acquired_at: float
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _leases: int = field(default=0, repr=False)
    _disposed: bool = field(default=False, repr=False)
    _dispose_pending: bool = field(default=False, repr=False)

    @property
    def disposed(self) -> bool:
        return self._disposed

    @property
    def active_leases(self) -> int:
        return self._leases

    @contextlib.contextmanager
    def lease(self):
        with self._lock:
            if self._disposed:
                raise NotARepository(f"workspace {self.root} already disposed")
            self._leases += 1
        try:
            yield self
        finally:
            deferred = False
            with self._lock:
                self._leases -= 1
                if self._dispose_pending and self._leases == 0:
                    deferred = True
            if deferred:
                dispose(self)


def _run_git(args: list[str], cwd: Path | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        ["git", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        errors="replace",
    )


def _clone_target(ref: RepoRef) -> str:
    """The argument handed to git for clone/ls-remote, validated for locals."""
    if not ref.is_local:
        return ref.source.strip()
    path = ref.local_path
    assert path is not None
    if not path.exists():
        raise InvalidLocator(f"local path does not exist: {path}")
    if not path.is_dir():
        raise InvalidLocator(f"local path is not a directory: {path}")
    if not (path / ".git").exists() and not (path / "HEAD").exists():
        raise NotARepository(f"no git metadata under {path}")
    return str(path)


def default_workspace_parent() -> Path:
    return Path(tempfile.gettempdir()) / "gitq-workspaces"


def acquire(source: str, parent_dir: str | Path | None = None) -> Workspace:
    """Clone ``source`` (URL or local path) into a fresh workspace.

    The clone carries full history; the head commit is the default branch
    tip. On any failure the partially created directory is removed.
    """
    ref = source if isinstance(source, RepoRef) else canonicalize(source)
    target = _clone_target(ref)
    parent = Path(parent_dir) if parent_dir else default_workspace_parent()
    parent.mkdir(parents=True, exist_ok=True)
    root = Path(tempfile.mkdtemp(prefix="ws-", dir=parent))
    _record_clone()
    proc = _run_git(["clone", "--quiet", target, str(root)])
    if proc.returncode != 0:
        shutil.rmtree(root, ignore_errors=True)
        raise CloneFailed(f"git clone failed for {ref.source!r}: {proc.stderr.strip()}")
    head = _run_git(["rev-parse", "HEAD"], cwd=root)
    if head.returncode != 0:
        shutil.rmtree(root, ignore_errors=True)
        raise EmptyRepository(f"{ref.source!r} has no commits on its default branch")
    commit = head.stdout.strip().lower()
    if not _HEX40.match(commit):
        shutil.rmtree(root, ignore_errors=True)
        raise CloneFailed(f"unexpected head commit {commit!r} for {ref.source!r}")
    return Workspace(root=root, repo=ref, head_commit=commit, acquired_at=time.time())


def resolve_head(ws: Workspace) -> str:
    """Current default-branch tip of the workspace snapshot."""
    if ws.disposed or not ws.root.exists():
        raise NotARepository(f"workspace root missing: {ws.root}")
    proc = _run_git(["rev-parse", "HEAD"], cwd=ws.root)
    if proc.returncode != 0:
        if "unknown revision" in proc.stderr or "ambiguous argument" in proc.stderr:
            raise EmptyRepository(f"no commits in {ws.root}")
        raise NotARepository(f"git rev-parse failed in {ws.root}: {proc.stderr.strip()}")
    return proc.stdout.strip().lower()


def peek_head(source: str) -> tuple[RepoRef, str]:
    """Resolve the default-branch tip of ``source`` without cloning.

    Used to build cache keys cheaply; a cache hit then skips the clone.
    """
    ref = source if isinstance(source, RepoRef) else canonicalize(source)
    target = _clone_target(ref)
    proc = _run_git(["ls-remote", target, "HEAD"])
    if proc.returncode != 0:
        raise CloneFailed(f"cannot reach {ref.source!r}: {proc.stderr.strip()}")
    line = proc.stdout.strip().splitlines()
    if not line:
        raise EmptyRepository(f"{ref.source!r} has no commits on its default branch")
    commit = line[0].split()[0].lower()
    if not _HEX40.match(commit):
        raise CloneFailed(f"unexpected ls-remote output for {ref.source!r}: {line[0]!r}")
    return ref, commit


def dispose(ws: Workspace) -> None:
    """Remove the workspace from disk. Idempotent; defers while leases live."""
    with ws._lock:
        if ws._disposed:
            return
        if ws._leases > 0:
            ws._dispose_pending = True
            raise DisposeFailed(
                f"workspace {ws.root} has {ws._leases} active lease(s); "
                "deletion deferred until release"
            )
        try:
            if ws.root.exists():
                shutil.rmtree(ws.root)
        except OSError as exc:
            ws._dispose_pending = True
            raise DisposeFailed(f"could not remove {ws.root}: {exc}") from exc
        ws._disposed = True
        ws._dispose_pending = False
