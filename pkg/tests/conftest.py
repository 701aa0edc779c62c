"""Shared fixtures: deterministic git repo builders and the synthetic history H1."""

from __future__ import annotations

import os
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_A = FIXTURES / "fixture_a"

DAY = 86400


def _git(args, cwd, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    proc = subprocess.run(
        ["git", *args], cwd=cwd, env=full_env, capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(f"git {' '.join(args)} failed: {proc.stderr}")
    return proc.stdout


@dataclass
class LedgerEntry:
    """Ground truth recorded by the builder as it creates each commit."""

    commit_id: str
    author_key: str
    timestamp: int
    files_changed: int
    lines_changed: int


@dataclass
class RepoBuilder:
    """Builds git repositories commit by commit with fixed authors and dates.

    Tracks its own per-commit file/line stats so tests can compare the
    engine's log reader against an independently recorded ledger.
    """

    path: Path
    entries: list[LedgerEntry] = field(default_factory=list)
    _line_counts: dict[str, int] = field(default_factory=dict)
    _binary_files: set[str] = field(default_factory=set)

    def __post_init__(self):
        self.path.mkdir(parents=True, exist_ok=True)
        _git(["init", "-q", "-b", "main"], cwd=self.path)
        _git(["config", "user.name", "Fixture"], cwd=self.path)
        _git(["config", "user.email", "fixture@example.com"], cwd=self.path)

    def commit(
        self,
        files: dict[str, str | bytes],
        author: tuple[str, str] = ("Fixture", "fixture@example.com"),
        timestamp: int = 1700000000,
        message: str = "update",
    ) -> str:
        """Write ``files`` (full replacement per path) and commit them.

        Text contents must be entirely distinct from the previous version of
        the same path so the diff is a clean delete-all/add-all; that keeps
        the recorded lines_changed exact.
        """
        files_changed = 0
        lines_changed = 0
        for rel, content in files.items():
            target = self.path / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            files_changed += 1
            if isinstance(content, bytes):
                target.write_bytes(content)
                self._binary_files.add(rel)
            else:
                if not content.endswith("\n"):
                    content += "\n"
                new_lines = content.count("\n")
                old_lines = self._line_counts.get(rel, 0)
                lines_changed += new_lines + old_lines
                self._line_counts[rel] = new_lines
                target.write_text(content, encoding="utf-8")
        name, email = author
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": f"{timestamp} +0000",
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": f"{timestamp} +0000",
        }
        _git(["add", "-A"], cwd=self.path)
        _git(["commit", "-q", "-m", message], cwd=self.path, env=env)
        commit_id = _git(["rev-parse", "HEAD"], cwd=self.path).strip()
        self.entries.append(
            LedgerEntry(
                commit_id=commit_id,
                author_key=email.lower(),
                timestamp=timestamp,
                files_changed=files_changed,
                lines_changed=lines_changed,
            )
        )
        return commit_id

    @property
    def head_file_count(self) -> int:
        return len(self._line_counts) + len(self._binary_files)

    @property
    def head_line_count(self) -> int:
        return sum(self._line_counts.values())

    @property
    def head_commit(self) -> str:
        return self.entries[-1].commit_id


def lines(tag: str, n: int) -> str:
    """n unique text lines; distinct for distinct tags, so diffs are clean."""
    return "".join(f"{tag} line {i}\n" for i in range(n))


@pytest.fixture
def repo_factory(tmp_path):
    made = []

    def factory(name: str = "repo") -> RepoBuilder:
        builder = RepoBuilder(tmp_path / name)
        made.append(builder)
        return builder

    return factory


@pytest.fixture
def fixture_a_repo(repo_factory) -> RepoBuilder:
    """Git repository containing the three-file class-hierarchy corpus."""
    builder = repo_factory("fixture-a")
    files = {
        str(p.relative_to(FIXTURE_A)): p.read_text()
        for p in sorted(FIXTURE_A.rglob("*.java"))
    }
    builder.commit(files, timestamp=1700000000, message="corpus")
    return builder


H1_BASE = 1700000000  # last-commit time for the synthetic history


def build_history_h1(path: Path) -> RepoBuilder:
    """Synthetic history: 4 authors, 10 commits, exactly 1 author in the
    90-day window ending at the last commit."""
    b = RepoBuilder(path)
    alice = ("Alice", "alice@example.com")
    bob = ("Bob", "bob@example.com")
    carol = ("Carol", "carol@example.com")
    dan = ("Dan", "dan@example.com")
    t = H1_BASE
    b.commit({"src/one.txt": lines("one v1", 10)}, alice, t - 200 * DAY)
    b.commit({"src/two.txt": lines("two v1", 8)}, bob, t - 190 * DAY)
    b.commit({"docs/readme.md": lines("readme v1", 5)}, carol, t - 180 * DAY)
    b.commit({"src/one.txt": lines("one v2", 12)}, alice, t - 170 * DAY)
    b.commit(
        {"src/three.txt": lines("three v1", 4), "src/two.txt": lines("two v2", 6)},
        bob,
        t - 160 * DAY,
    )
    b.commit({"assets/blob.bin": b"\x00\x01\x02gitq"}, carol, t - 150 * DAY)
    b.commit({"src/four.txt": lines("four v1", 7)}, alice, t - 140 * DAY)
    b.commit({"src/three.txt": lines("three v2", 9)}, bob, t - 130 * DAY)
    b.commit({"src/five.txt": lines("five v1", 3)}, carol, t - 120 * DAY)
    b.commit({"src/five.txt": lines("five v2", 5)}, dan, t)
    return b


@pytest.fixture
def history_h1(tmp_path) -> RepoBuilder:
    return build_history_h1(tmp_path / "h1")
