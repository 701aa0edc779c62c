"""Command-line front end: analyze repositories offline, print reports,
write badge files, or run the HTTP service."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import badges as badge_engine
from .errors import GitqError
from .pipeline import AnalysisOptions, AnalysisReport, ReportCache, analyze
from .service import DEFAULT_LISTEN, ServiceConfig, serve

THRESHOLDS_ENV = "GITQ_THRESHOLDS"

EXIT_OK = 0
EXIT_ANALYSIS_ERROR = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gitq",
        description="Repository quality badges from source and maintenance metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze a repository URL or local path")
    an.add_argument("target", help="repository URL or local path")
    an.add_argument("--format", choices=("json", "text"), default="text")
    an.add_argument("--badges-dir", metavar="DIR", help="write one SVG per badge")
    an.add_argument("--window-days", type=int, default=90, metavar="N")
    an.add_argument(
        "--bug-labels",
        default="bug",
        metavar="a,b",
        help="comma-separated issue labels counted as bugs",
    )
    an.add_argument("--issue-snapshot", metavar="FILE", help="offline issue JSON array")
    an.add_argument("--no-source", action="store_true", help="skip source metrics")
    an.add_argument("--no-maintenance", action="store_true", help="skip history metrics")
    an.add_argument("--no-issues", action="store_true", help="skip issue metrics")
    an.add_argument("--no-cache", action="store_true", help="bypass the report cache")
    an.add_argument("--sequential", action="store_true", help=argparse.SUPPRESS)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--listen", default=DEFAULT_LISTEN, metavar="host:port")
    sv.add_argument("--max-concurrent-analyses", type=int, default=2, metavar="N")
    sv.add_argument("--sync-budget-ms", type=int, default=2000, metavar="M")
    sv.add_argument("--issue-snapshot", metavar="FILE", help=argparse.SUPPRESS)
    return parser


def _load_thresholds():
    path = os.environ.get(THRESHOLDS_ENV)
    return badge_engine.load_thresholds(path) if path else None


def _run_analyze(args: argparse.Namespace) -> int:
    if args.window_days <= 0:
        print("gitq: --window-days must be positive", file=sys.stderr)
        return EXIT_USAGE
    labels = tuple(s.strip() for s in args.bug_labels.split(",") if s.strip())
    if not labels:
        print("gitq: --bug-labels must name at least one label", file=sys.stderr)
        return EXIT_USAGE
    if args.no_source and args.no_maintenance and args.no_issues:
        print("gitq: all metric families disabled", file=sys.stderr)
        return EXIT_USAGE
    try:
        thresholds = _load_thresholds()
    except Exception as exc:
        print(f"gitq: invalid threshold configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    options = AnalysisOptions(
        window_days=args.window_days,
        bug_labels=labels,
        issue_snapshot=args.issue_snapshot,
        include_source=not args.no_source,
        include_maintenance=not args.no_maintenance,
        include_issues=not args.no_issues,
        mode="sequential" if args.sequential else "parallel",
        thresholds=thresholds,
    )
    cache = None if args.no_cache else ReportCache()
    try:
        report = analyze(args.target, options, cache)
    except GitqError as exc:
        print(f"gitq: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_ERROR
    for note in report.diagnostics:
        print(f"gitq: {note}", file=sys.stderr)
    if args.format == "json":
        print(report.to_json())
    else:
        print(_text_table(report))
    if args.badges_dir:
        out = Path(args.badges_dir)
        out.mkdir(parents=True, exist_ok=True)
        for badge in report.badges:
            (out / f"{badge.metric_id}.svg").write_bytes(badge_engine.render_svg(badge))
    return EXIT_OK


def _text_table(report: AnalysisReport) -> str:
    rows = [("metric", "value", "tier", "insight")]
    for badge in report.badges:
        rows.append((badge.label, badge.value_text, badge.tier.level, badge.insight))
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    lines = [
        "  ".join(
            [row[0].ljust(widths[0]), row[1].rjust(widths[1]), row[2].ljust(widths[2]), row[3]]
        ).rstrip()
        for row in rows
    ]
    header = [
        f"{report.repo.display_name} @ {report.commit[:12]}",
        "",
    ]
    footer = []
    if report.source is None:
        footer.append("")
        footer.append("source metrics: not applicable")
    return "\n".join(header + lines + footer)


def _run_serve(args: argparse.Namespace) -> int:
    config = ServiceConfig(
        max_concurrent_analyses=args.max_concurrent_analyses,
        sync_budget_ms=args.sync_budget_ms,
        issue_snapshot=args.issue_snapshot,
        thresholds=_load_thresholds(),
    )
    serve(args.listen, config)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return _run_analyze(args)
    return _run_serve(args)


if __name__ == "__main__":
    sys.exit(main())
