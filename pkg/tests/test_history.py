"""Commit-log mining against the fixture builder's independently recorded ledger."""

from __future__ import annotations

import random

import pytest

from gitq import history, ingest
from gitq.errors import DegenerateSnapshot, EmptyLog, EmptyRepository

from conftest import DAY, H1_BASE, lines


@pytest.fixture
def h1_workspace(history_h1, tmp_path):
    ws = ingest.acquire(str(history_h1.path), parent_dir=tmp_path / "ws")
    yield history_h1, ws
    ingest.dispose(ws)


class TestReadLog:
    def test_single_commit(self, repo_factory, tmp_path):
        builder = repo_factory()
        commit = builder.commit({"f.txt": lines("f", 10)})
        ws = ingest.acquire(str(builder.path), parent_dir=tmp_path / "ws")
        try:
            (record,) = history.read_log(ws)
            assert record.id == commit
            assert record.files_changed == 1
            assert record.lines_changed == 10
        finally:
            ingest.dispose(ws)

    def test_matches_ledger(self, h1_workspace):
        builder, ws = h1_workspace
        log = history.read_log(ws)
        by_id = {r.id: r for r in log}
        assert len(log) == len(builder.entries) == 10
        for entry in builder.entries:
            record = by_id[entry.commit_id]
            assert record.author_key == entry.author_key
            assert record.timestamp == entry.timestamp
            assert record.files_changed == entry.files_changed
            assert record.lines_changed == entry.lines_changed

    def test_binary_commit_has_zero_lines(self, h1_workspace):
        builder, ws = h1_workspace
        log = {r.id: r for r in history.read_log(ws)}
        binary_entry = builder.entries[5]  # the blob.bin commit
        assert log[binary_entry.commit_id].lines_changed == 0
        assert log[binary_entry.commit_id].files_changed == 1

    def test_merge_commit_own_diffstat(self, repo_factory, tmp_path):
        builder = repo_factory()
        builder.commit({"base.txt": lines("base", 3)}, timestamp=1700000000)
        from conftest import _git

        _git(["checkout", "-q", "-b", "side"], cwd=builder.path)
        (builder.path / "side.txt").write_text(lines("side", 4))
        _git(["add", "-A"], cwd=builder.path)
        env = {
            "GIT_AUTHOR_DATE": "1700000100 +0000",
            "GIT_COMMITTER_DATE": "1700000100 +0000",
        }
        _git(["commit", "-q", "-m", "side"], cwd=builder.path, env=env)
        _git(["checkout", "-q", "main"], cwd=builder.path)
        (builder.path / "main.txt").write_text(lines("main", 2))
        _git(["add", "-A"], cwd=builder.path)
        _git(["commit", "-q", "-m", "main"], cwd=builder.path, env=env)
        _git(["merge", "-q", "--no-ff", "side", "-m", "merge"], cwd=builder.path, env=env)
        ws = ingest.acquire(str(builder.path), parent_dir=tmp_path / "ws")
        try:
            log = history.read_log(ws)
            assert len(log) == 4  # base, side, main, merge
            merge = log[0]  # newest first
            assert merge.files_changed == 1  # side.txt against first parent
            assert merge.lines_changed == 4
        finally:
            ingest.dispose(ws)


class TestHeadSnapshotStats:
    def test_h1_head(self, h1_workspace):
        builder, ws = h1_workspace
        files, line_total = history.head_snapshot_stats(ws)
        assert files == builder.head_file_count == 7
        assert line_total == builder.head_line_count == 44

    def test_missing_trailing_newline_counts(self, repo_factory, tmp_path):
        builder = repo_factory()
        builder.commit({"f.txt": "a\nb"})  # builder appends newline; rewrite raw
        (builder.path / "g.txt").write_text("x\ny")  # no trailing newline
        from conftest import _git

        _git(["add", "-A"], cwd=builder.path)
        _git(["commit", "-q", "-m", "raw"], cwd=builder.path)
        ws = ingest.acquire(str(builder.path), parent_dir=tmp_path / "ws")
        try:
            files, line_total = history.head_snapshot_stats(ws)
            assert files == 2
            assert line_total == 2 + 2
        finally:
            ingest.dispose(ws)


class TestActiveAuthorRate:
    def test_single_author_is_one(self, repo_factory, tmp_path):
        builder = repo_factory()
        builder.commit({"f.txt": lines("f", 1)}, timestamp=1700000000)
        ws = ingest.acquire(str(builder.path), parent_dir=tmp_path / "ws")
        try:
            log = history.read_log(ws)
        finally:
            ingest.dispose(ws)
        assert history.active_author_rate(log) == 1.0

    def test_h1_rate_is_quarter(self, h1_workspace):
        _, ws = h1_workspace
        log = history.read_log(ws)
        assert history.active_author_rate(log, window_days=90) == 0.25

    def test_defaults_to_latest_commit_not_wall_clock(self, h1_workspace):
        _, ws = h1_workspace
        log = history.read_log(ws)
        explicit = history.active_author_rate(log, now=H1_BASE, window_days=90)
        assert history.active_author_rate(log, window_days=90) == explicit

    def test_monotone_in_window(self, h1_workspace):
        _, ws = h1_workspace
        log = history.read_log(ws)
        rates = [
            history.active_author_rate(log, window_days=w)
            for w in (1, 30, 90, 120, 150, 365)
        ]
        assert rates == sorted(rates)

    def test_window_spanning_history_is_one(self, h1_workspace):
        _, ws = h1_workspace
        log = history.read_log(ws)
        assert history.active_author_rate(log, window_days=250) == 1.0

    def test_empty_log(self):
        with pytest.raises(EmptyLog):
            history.active_author_rate([])


class TestCommitImpact:
    def test_brute_force_example(self):
        log = [
            history.CommitRecord("a" * 40, "a@x", 1, 2, 10),
            history.CommitRecord("b" * 40, "a@x", 2, 4, 30),
        ]
        mean_files, mean_lines = history.commit_impact(log, 10, 100)
        assert mean_files == pytest.approx(0.3)
        assert mean_lines == pytest.approx(0.2)

    def test_single_commit_creating_tree_is_one(self, repo_factory, tmp_path):
        builder = repo_factory()
        builder.commit({"a.txt": lines("a", 5), "b.txt": lines("b", 3)})
        ws = ingest.acquire(str(builder.path), parent_dir=tmp_path / "ws")
        try:
            log = history.read_log(ws)
            files, line_total = history.head_snapshot_stats(ws)
        finally:
            ingest.dispose(ws)
        mean_files, mean_lines = history.commit_impact(log, files, line_total)
        assert mean_files == 1.0
        assert mean_lines == 1.0

    def test_h1_matches_ledger_brute_force(self, h1_workspace):
        builder, ws = h1_workspace
        log = history.read_log(ws)
        files, line_total = history.head_snapshot_stats(ws)
        mean_files, mean_lines = history.commit_impact(log, files, line_total)
        n = len(builder.entries)
        expect_files = sum(e.files_changed / files for e in builder.entries) / n
        expect_lines = sum(e.lines_changed / line_total for e in builder.entries) / n
        assert abs(mean_files - expect_files) <= 1e-12
        assert abs(mean_lines - expect_lines) <= 1e-12

    def test_degenerate_snapshot(self):
        log = [history.CommitRecord("a" * 40, "a@x", 1, 1, 1)]
        with pytest.raises(DegenerateSnapshot):
            history.commit_impact(log, 0, 10)
        with pytest.raises(DegenerateSnapshot):
            history.commit_impact(log, 10, 0)


class TestHistoryReport:
    def test_permutation_invariant(self, h1_workspace):
        _, ws = h1_workspace
        log = history.read_log(ws)
        files, line_total = history.head_snapshot_stats(ws)
        shuffled = log[:]
        random.Random(7).shuffle(shuffled)
        a = history.build_history_report(log, files, line_total)
        b = history.build_history_report(shuffled, files, line_total)
        assert a == b

    def test_h1_report_fields(self, h1_workspace):
        builder, ws = h1_workspace
        report = history.analyze_history(ws, window_days=90)
        assert report.total_authors == 4
        assert report.active_authors == 1
        assert report.active_author_rate == 0.25
        assert report.commit_count == 10
        assert report.window_days == 90

    def test_empty_repo_raises(self, tmp_path):
        from conftest import _git

        bare = tmp_path / "empty"
        bare.mkdir()
        _git(["init", "-q", "-b", "main"], cwd=bare)
        with pytest.raises(EmptyRepository):
            ingest.acquire(str(bare), parent_dir=tmp_path / "ws")
