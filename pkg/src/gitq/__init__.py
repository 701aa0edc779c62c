"""Repository quality badges: source and maintenance metrics, reports, SVG badges."""

from .pipeline import (
    ENGINE_VERSION as __version__,
    AnalysisOptions,
    AnalysisReport,
    CacheKey,
    ReportCache,
    analyze,
)

__all__ = [
    "AnalysisOptions",
    "AnalysisReport",
    "CacheKey",
    "ReportCache",
    "analyze",
    "__version__",
]
