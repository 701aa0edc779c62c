"""HTTP facade: analyze, report, and badge endpoints."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import pytest
from fastapi.testclient import TestClient

from gitq import ingest
from gitq.badges import REGISTRY
from gitq.service import ServiceConfig, create_app

from conftest import FIXTURES, lines

API_ERROR_KEYS = {"code", "message", "retryable"}
ERROR_CODES = {"invalid_url", "clone_failed", "not_found", "analysis_pending", "internal"}


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(
        cache_dir=tmp_path / "cache",
        workspace_parent=tmp_path / "ws-parent",
        issue_snapshot=FIXTURES / "issues_basic.json",
        sync_budget_ms=30000,
        analyze_origins=("https://allowed.example",),
    )
    app = create_app(config)
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def analyze_ok(client, url: str) -> str:
    resp = client.post("/api/v1/analyze", json={"repo_url": url})
    assert resp.status_code == 200, resp.text
    body = resp.json()
    assert body["status"] == "done"
    return body["commit"]


def assert_api_error(resp, code):
    body = resp.json()
    assert set(body.keys()) == API_ERROR_KEYS
    assert body["code"] == code
    assert body["code"] in ERROR_CODES
    assert body["message"]


class TestAnalyzeEndpoint:
    def test_analyze_then_done(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        assert commit == fixture_a_repo.head_commit

    def test_cached_repo_answers_without_clone(self, client, fixture_a_repo):
        analyze_ok(client, str(fixture_a_repo.path))
        ingest.reset_clone_count()
        commit = analyze_ok(client, str(fixture_a_repo.path))
        assert commit == fixture_a_repo.head_commit
        assert ingest.clone_count() == 0

    def test_malformed_url(self, client):
        resp = client.post("/api/v1/analyze", json={"repo_url": "https://github.com"})
        assert resp.status_code == 422
        assert_api_error(resp, "invalid_url")

    def test_missing_repo_url(self, client):
        resp = client.post("/api/v1/analyze", json={"nope": 1})
        assert resp.status_code == 422
        assert_api_error(resp, "invalid_url")

    def test_unreachable_remote(self, client):
        resp = client.post(
            "/api/v1/analyze", json={"repo_url": "https://127.0.0.1:1/owner/repo.git"}
        )
        assert resp.status_code == 502
        assert_api_error(resp, "clone_failed")

    def test_idempotent_per_commit(self, client, fixture_a_repo):
        first = analyze_ok(client, str(fixture_a_repo.path))
        second = analyze_ok(client, str(fixture_a_repo.path))
        assert first == second


class TestReportEndpoint:
    def test_report_fields(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        resp = client.get(
            "/api/v1/report",
            params={"url": str(fixture_a_repo.path), "commit": commit},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["source"]["aggregates"]["package_count"] == 2
        assert body["commit"] == commit
        assert len(body["badges"]) == 11

    def test_latest_served_without_commit(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        resp = client.get("/api/v1/report", params={"url": str(fixture_a_repo.path)})
        assert resp.status_code == 200
        assert resp.json()["commit"] == commit

    def test_unknown_url_404(self, client, tmp_path):
        resp = client.get("/api/v1/report", params={"url": str(tmp_path / "never")})
        assert resp.status_code == 404
        assert_api_error(resp, "not_found")

    def test_keyed_retrieval_of_stale_commit(self, client, fixture_a_repo):
        c1 = analyze_ok(client, str(fixture_a_repo.path))
        fixture_a_repo.commit({"p2/D.java": "package p2;\n\npublic class D {\n}\n"})
        c2 = analyze_ok(client, str(fixture_a_repo.path))
        assert c1 != c2
        resp = client.get(
            "/api/v1/report", params={"url": str(fixture_a_repo.path), "commit": c1}
        )
        assert resp.status_code == 200
        assert resp.json()["commit"] == c1

    def test_per_metric_data_composes_full_report(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        report = client.get(
            "/api/v1/report",
            params={"url": str(fixture_a_repo.path), "commit": commit},
        ).json()
        for badge in report["badges"]:
            svg = client.get(
                f"/api/v1/badge/{badge['metric_id']}.svg",
                params={"url": str(fixture_a_repo.path), "commit": commit},
            )
            assert svg.status_code == 200
            title = ET.fromstring(svg.content).find(
                "{http://www.w3.org/2000/svg}title"
            )
            assert title.text == badge["insight"]


class TestBadgeEndpoint:
    def test_golden_bytes(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        resp = client.get(
            "/api/v1/badge/packages.svg",
            params={"url": str(fixture_a_repo.path), "commit": commit},
        )
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("image/svg+xml")
        golden = (FIXTURES.parent / "golden" / "packages-2-good.svg").read_bytes()
        assert resp.content == golden

    def test_identical_bytes_and_etag(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        params = {"url": str(fixture_a_repo.path), "commit": commit}
        a = client.get("/api/v1/badge/active-authors.svg", params=params)
        b = client.get("/api/v1/badge/active-authors.svg", params=params)
        assert a.content == b.content
        assert a.headers["etag"] == b.headers["etag"]
        assert "immutable" in a.headers["cache-control"]

    def test_unknown_metric_404(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        resp = client.get(
            "/api/v1/badge/made-up.svg",
            params={"url": str(fixture_a_repo.path), "commit": commit},
        )
        assert resp.status_code == 404
        assert_api_error(resp, "not_found")

    def test_badge_absent_family_404(self, client, repo_factory):
        builder = repo_factory("no-java")
        builder.commit({"readme.md": lines("readme", 3)})
        commit = analyze_ok(client, str(builder.path))
        resp = client.get(
            "/api/v1/badge/packages.svg",
            params={"url": str(builder.path), "commit": commit},
        )
        assert resp.status_code == 404

    def test_every_registry_metric_routes(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        for metric_id in REGISTRY:
            resp = client.get(
                f"/api/v1/badge/{metric_id}.svg",
                params={"url": str(fixture_a_repo.path), "commit": commit},
            )
            assert resp.status_code == 200, metric_id


class TestAsyncProtocol:
    def test_pending_then_done_on_repoll(self, tmp_path, fixture_a_repo):
        config = ServiceConfig(
            cache_dir=tmp_path / "cache",
            workspace_parent=tmp_path / "ws-parent",
            sync_budget_ms=0,  # force the polling path
        )
        with TestClient(create_app(config), raise_server_exceptions=False) as client:
            first = client.post(
                "/api/v1/analyze", json={"repo_url": str(fixture_a_repo.path)}
            )
            assert first.status_code == 202
            assert first.json() == {"status": "pending"}
            deadline = 50
            for _ in range(deadline):
                resp = client.post(
                    "/api/v1/analyze", json={"repo_url": str(fixture_a_repo.path)}
                )
                if resp.status_code == 200:
                    assert resp.json()["commit"] == fixture_a_repo.head_commit
                    break
            else:
                pytest.fail("analysis never completed")

    def test_report_pending_code_while_in_flight(self, tmp_path, fixture_a_repo):
        import threading

        config = ServiceConfig(
            cache_dir=tmp_path / "cache",
            workspace_parent=tmp_path / "ws-parent",
            sync_budget_ms=0,
        )
        app = create_app(config)
        gate = threading.Event()
        with TestClient(app, raise_server_exceptions=False) as client:
            ref = ingest.canonicalize(str(fixture_a_repo.path))
            app.state.jobs.submit(ref.canonical_url, gate.wait)
            resp = client.get(
                "/api/v1/report", params={"url": str(fixture_a_repo.path)}
            )
            gate.set()
            assert resp.status_code == 404
            assert_api_error(resp, "analysis_pending")
            assert resp.json()["retryable"] is True

    def test_queue_overflow_503(self, tmp_path, fixture_a_repo):
        import threading

        config = ServiceConfig(
            cache_dir=tmp_path / "cache",
            workspace_parent=tmp_path / "ws-parent",
            max_concurrent_analyses=1,
            queue_size=0,
            sync_budget_ms=0,
        )
        app = create_app(config)
        gate = threading.Event()
        with TestClient(app, raise_server_exceptions=False) as client:
            app.state.jobs.submit("file:///blocker", gate.wait)
            resp = client.post(
                "/api/v1/analyze", json={"repo_url": str(fixture_a_repo.path)}
            )
            gate.set()
            assert resp.status_code == 503
            body = resp.json()
            assert body["code"] == "internal"
            assert body["retryable"] is True


class TestCors:
    def test_get_is_permissive(self, client, fixture_a_repo):
        commit = analyze_ok(client, str(fixture_a_repo.path))
        resp = client.get(
            "/api/v1/report",
            params={"url": str(fixture_a_repo.path), "commit": commit},
            headers={"Origin": "https://anywhere.example"},
        )
        assert resp.headers.get("access-control-allow-origin") == "*"

    def test_analyze_restricted_to_allow_list(self, client, fixture_a_repo):
        allowed = client.post(
            "/api/v1/analyze",
            json={"repo_url": str(fixture_a_repo.path)},
            headers={"Origin": "https://allowed.example"},
        )
        assert (
            allowed.headers.get("access-control-allow-origin")
            == "https://allowed.example"
        )
        denied = client.post(
            "/api/v1/analyze",
            json={"repo_url": str(fixture_a_repo.path)},
            headers={"Origin": "https://evil.example"},
        )
        assert "access-control-allow-origin" not in denied.headers
