"""Tier mapping, badge construction, and deterministic SVG rendering."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import UnknownMetric

PALETTE = {
    "excellent": "#4c1",
    "good": "#97ca00",
    "fair": "#dfb317",
    "poor": "#e05d44",
    "unknown": "#9f9f9f",
}

LEVELS = ("excellent", "good", "fair", "poor", "unknown")


@dataclass(frozen=True)
class Tier:
    level: str
    color: str


def tier(level: str) -> Tier:
    return Tier(level=level, color=PALETTE[level])


@dataclass(frozen=True)
class Badge:
    metric_id: str
    label: str
    value_text: str
    tier: Tier
    insight: str


@dataclass(frozen=True)
class MetricSpec:
    metric_id: str
    label: str
    # "percent" renders 0.25 as "25%"; "count" as an integer; "decimal"
    # with one fractional digit.
    value_format: str
    # "higher" = larger is better, "lower" = smaller is better,
    # "info" = informational count, always tiered good.
    direction: str
    family: str  # "maintenance" | "issues" | "source"


REGISTRY: dict[str, MetricSpec] = {
    spec.metric_id: spec
    for spec in (
        MetricSpec("active-authors", "active authors", "percent", "higher", "maintenance"),
        MetricSpec("commit-impact-files", "commit impact (files)", "percent", "lower", "maintenance"),
        MetricSpec("commit-impact-lines", "commit impact (lines)", "percent", "lower", "maintenance"),
        MetricSpec("bug-handling", "bug handling", "percent", "lower", "issues"),
        MetricSpec("inherited-classes", "inherited classes", "count", "info", "source"),
        MetricSpec("overridden-methods", "overridden methods", "count", "info", "source"),
        MetricSpec("packages", "packages", "count", "info", "source"),
        MetricSpec("file-dependencies", "file dependencies", "count", "info", "source"),
        MetricSpec("wmc-median", "wmc median", "decimal", "lower", "source"),
        MetricSpec("dit-max", "dit max", "count", "lower", "source"),
        MetricSpec("lcom-median", "lcom median", "decimal", "lower", "source"),
    )
}

# Three boundaries per tiered metric, best tier first. For "higher" metrics
# a value >= boundary reaches the tier; for "lower" metrics a value < boundary
# does. The remaining values are poor. The lcom excellent boundary of 0.5
# admits exactly the all-cohesive case: class-level values are integers, so
# a median below 0.5 means zero.
DEFAULT_THRESHOLDS: dict[str, tuple[float, float, float]] = {
    "active-authors": (0.50, 0.25, 0.10),
    "commit-impact-files": (0.05, 0.15, 0.50),
    "commit-impact-lines": (0.05, 0.15, 0.50),
    "bug-handling": (0.10, 0.25, 0.50),
    "wmc-median": (10, 20, 40),
    "dit-max": (3, 5, 7),
    "lcom-median": (0.5, 5, 20),
}


def load_thresholds(path: str | Path) -> dict[str, tuple[float, float, float]]:
    """Read a threshold override file: JSON object, metric id to an ordered
    list of three boundaries. Unknown ids are rejected; omitted ids keep
    their defaults."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: threshold file must be a JSON object")
    table = dict(DEFAULT_THRESHOLDS)
    for metric_id, bounds in data.items():
        if metric_id not in REGISTRY:
            raise UnknownMetric(metric_id)
        if REGISTRY[metric_id].direction == "info":
            raise ValueError(f"{path}: {metric_id} is informational, not tiered")
        if not isinstance(bounds, list) or len(bounds) != 3:
            raise ValueError(f"{path}: {metric_id} needs exactly three boundaries")
        table[metric_id] = tuple(float(b) for b in bounds)  # type: ignore[assignment]
    return table


def tier_for(
    metric_id: str,
    value: float | None,
    thresholds: dict[str, tuple[float, float, float]] | None = None,
) -> Tier:
    """Map a metric value to its qualitative tier; None means unknown."""
    spec = REGISTRY.get(metric_id)
    if spec is None:
        raise UnknownMetric(metric_id)
    if value is None:
        return tier("unknown")
    if spec.direction == "info":
        return tier("good")
    bounds = (thresholds or DEFAULT_THRESHOLDS)[metric_id]
    if spec.direction == "higher":
        for level, bound in zip(("excellent", "good", "fair"), bounds):
            if value >= bound:
                return tier(level)
        return tier("poor")
    for level, bound in zip(("excellent", "good", "fair"), bounds):
        if value < bound:
            return tier(level)
    return tier("poor")


def _pct(value: float) -> str:
    return f"{round(value * 100):.0f}%"


def _format_value(value: float | None, value_format: str) -> str:
    if value is None:
        return "n/a"
    if value_format == "percent":
        return _pct(value)
    if value_format == "count":
        return str(int(value))
    return f"{value:.1f}"


def _insight(
    metric_id: str,
    level: str,
    value: float | None,
    window_days: int,
    thresholds: dict[str, tuple[float, float, float]],
) -> str:
    """One plain-language sentence per metric and tier."""
    if metric_id == "active-authors":
        if level == "unknown":
            return "Author activity is unknown"
        bounds = thresholds[metric_id]
        if level == "poor":
            return (
                f"Less than {_pct(bounds[2])} of authors remain active "
                f"in the last {window_days} days"
            )
        floor = {"excellent": bounds[0], "good": bounds[1], "fair": bounds[2]}[level]
        return (
            f"At least {_pct(floor)} of authors remain active "
            f"in the last {window_days} days"
        )
    if metric_id in ("commit-impact-lines", "commit-impact-files"):
        what = "lines of code" if metric_id.endswith("lines") else "files"
        if level == "unknown":
            return f"Commit impact on {what} is unknown"
        bounds = thresholds[metric_id]
        if level == "poor":
            return (
                f"Poor code composition: at least {_pct(bounds[2])} of the "
                f"{what} are affected by an average commit"
            )
        ceiling = {"excellent": bounds[0], "good": bounds[1], "fair": bounds[2]}[level]
        return f"An average commit affects less than {_pct(ceiling)} of the {what}"
    if metric_id == "bug-handling":
        if level == "unknown":
            return "No issue data available"
        bounds = thresholds[metric_id]
        if level == "poor":
            return f"At least {_pct(bounds[2])} of bug issues remain open"
        ceiling = {"excellent": bounds[0], "good": bounds[1], "fair": bounds[2]}[level]
        if level == "excellent":
            return f"Excellent bug handling: less than {_pct(ceiling)} of bug issues are open"
        return f"Less than {_pct(ceiling)} of bug issues are open"
    if metric_id == "inherited-classes":
        return f"{int(value)} class(es) inherit from a declared parent"
    if metric_id == "overridden-methods":
        return f"{int(value)} method(s) override an inherited implementation"
    if metric_id == "packages":
        return f"Source code is organized into {int(value)} package(s)"
    if metric_id == "file-dependencies":
        return f"{int(value)} dependency link(s) between source files"
    quality = {
        "excellent": "very low",
        "good": "low",
        "fair": "moderate",
        "poor": "high",
        "unknown": "unknown",
    }[level]
    if metric_id == "wmc-median":
        if value is None:
            return "Median class size is unknown"
        return f"Median methods per class is {value:.1f} ({quality})"
    if metric_id == "dit-max":
        if value is None:
            return "Inheritance depth is unknown"
        return f"Deepest inheritance chain is {int(value)} ({quality})"
    if metric_id == "lcom-median":
        if value is None:
            return "Class cohesion is unknown"
        return f"Median lack of cohesion is {value:.1f} ({quality})"
    raise UnknownMetric(metric_id)


def _median(values: list[int]) -> float | None:
    return float(statistics.median(values)) if values else None


def metric_values(report) -> dict[str, float | None]:
    """Raw badge values present in an analysis report, keyed by metric id.

    Metrics of absent families are omitted entirely, except bug handling,
    which renders as unknown when issue data is missing.
    """
    values: dict[str, float | None] = {}
    history = getattr(report, "history", None)
    issues = getattr(report, "issues", None)
    if history is not None:
        values["active-authors"] = history.active_author_rate
        values["commit-impact-files"] = history.mean_file_impact
        values["commit-impact-lines"] = history.mean_line_impact
    if history is not None or issues is not None:
        values["bug-handling"] = issues.bug_open_share if issues is not None else None
    source = getattr(report, "source", None)
    if source is not None:
        values["inherited-classes"] = source.inherited_class_count
        values["overridden-methods"] = source.overridden_method_count
        values["packages"] = source.package_count
        values["file-dependencies"] = source.dependency_edge_count
        per_class = source.per_class.values()
        values["wmc-median"] = _median([m.wmc for m in per_class])
        values["dit-max"] = float(max((m.dit for m in per_class), default=0)) if per_class else None
        values["lcom-median"] = _median([m.lcom for m in per_class])
    return values


def make_badges(
    report,
    thresholds: dict[str, tuple[float, float, float]] | None = None,
) -> list[Badge]:
    """One badge per registry metric present in the report, registry order."""
    table = thresholds or DEFAULT_THRESHOLDS
    values = metric_values(report)
    if not values:
        raise ValueError("report contains no metric family")
    history = getattr(report, "history", None)
    window_days = history.window_days if history is not None else 0
    badges = []
    for metric_id, spec in REGISTRY.items():
        if metric_id not in values:
            continue
        value = values[metric_id]
        badge_tier = tier_for(metric_id, value, table)
        badges.append(
            Badge(
                metric_id=metric_id,
                label=spec.label,
                value_text=_format_value(value, spec.value_format),
                tier=badge_tier,
                insight=_insight(metric_id, badge_tier.level, value, window_days, table),
            )
        )
    return badges


# --- SVG rendering ---------------------------------------------------------

# Per-character advances in tenths of a pixel for an 11px sans face. A fixed
# table (instead of font metrics lookup) keeps output byte-identical across
# platforms; unknown characters fall back to the default advance.
_DEFAULT_ADVANCE = 70
_CHAR_ADVANCES = {}
for _chars, _adv in (
    ("iíìl!|.,:;'", 32),
    ("jft/\\()[]{} ", 45),
    ("r-\"`^", 48),
    ("abcdeghknopqsuvxyz0123456789_?=+<>", 69),
    ("mw", 103),
    ("ABCDEFGHJKLNOPQRSTUVXYZ", 80),
    ("I", 40),
    ("MW", 103),
    ("%@&#~", 105),
):
    for _c in _chars:
        _CHAR_ADVANCES[_c] = _adv


def _text_width(text: str) -> int:
    """Approximate pixel width of a text run at font-size 11."""
    tenths = sum(_CHAR_ADVANCES.get(c, _DEFAULT_ADVANCE) for c in text)
    return (tenths + 9) // 10


_SVG_TEMPLATE = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="20" '
    'role="img" aria-label="{aria}">'
    "<title>{title}</title>"
    '<rect width="{left}" height="20" fill="#555"/>'
    '<rect x="{left}" width="{right}" height="20" fill="{color}"/>'
    '<text x="{label_x}" y="14" text-anchor="middle" fill="#fff" '
    'font-family="Verdana,Geneva,DejaVu Sans,sans-serif" font-size="11">{label}</text>'
    '<text x="{value_x}" y="14" text-anchor="middle" fill="#fff" '
    'font-family="Verdana,Geneva,DejaVu Sans,sans-serif" font-size="11">{value}</text>'
    "</svg>"
)


def render_svg(badge: Badge) -> bytes:
    """Flat two-segment badge; deterministic bytes for identical badges."""
    if not badge.label or not badge.value_text or not badge.insight:
        raise ValueError("badge label, value and insight must be non-empty")
    pad = 10
    left = _text_width(badge.label) + pad
    right = _text_width(badge.value_text) + pad
    doc = _SVG_TEMPLATE.format(
        total=left + right,
        aria=escape(f"{badge.label}: {badge.value_text}", {'"': "&quot;"}),
        title=escape(badge.insight),
        left=left,
        right=right,
        color=badge.tier.color,
        label_x=left // 2,
        value_x=left + right // 2,
        label=escape(badge.label),
        value=escape(badge.value_text),
    )
    return doc.encode("utf-8")
