"""Per-class object-oriented metrics and repository-level source aggregates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import UnknownClass
from .source_model import ClassInfo, CorpusModel


@dataclass(frozen=True)
class ClassMetrics:
    """The six class metrics. All counts; never negative.

    wmc: declared method count (unit weight per method).
    dit: number of internal ancestors (external parents contribute 0).
    noc: number of internal classes whose resolved parent is this class.
    cbo: distinct other internal classes referenced via superclass,
         interfaces, field/parameter/return types, or call receivers.
    rfc: method count plus distinct call names across method bodies.
    lcom: method pairs sharing no field minus pairs sharing one, floored at 0.
    """

    wmc: int
    dit: int
    noc: int
    cbo: int
    rfc: int
    lcom: int


@dataclass(frozen=True)
class SourceMetricsReport:
    per_class: dict[str, ClassMetrics]
    inherited_class_count: int
    overridden_method_count: int
    package_count: int
    dependency_edge_count: int
    mean_fanout: float
    analyzed_file_count: int
    skipped_file_count: int


def _reference_candidates(cls: ClassInfo) -> set[str]:
    candidates: set[str] = set()
    if cls.superclass_name:
        candidates.add(cls.superclass_name)
    candidates.update(cls.interface_names)
    candidates.update(cls.type_reference_names)
    candidates.update(cls.receiver_names)
    return candidates


def _resolved_references(model: CorpusModel, name: str) -> set[str]:
    """Internal classes (other than itself) that ``name`` refers to."""
    cls = model.classes[name]
    resolved = {
        model.resolve_reference(written, name)
        for written in _reference_candidates(cls)
    }
    resolved.discard(None)
    resolved.discard(name)
    return resolved  # type: ignore[return-value]


def class_metrics(model: CorpusModel, name: str) -> ClassMetrics:
    """Compute all six metrics for one class."""
    cls = model.classes.get(name)
    if cls is None:
        raise UnknownClass(name)
    wmc = len(cls.methods)
    dit = len(model.ancestors(name))
    noc = len(model.children_of(name))
    cbo = len(_resolved_references(model, name))
    invoked: set[str] = set()
    for m in cls.methods:
        invoked |= m.invoked_names
    rfc = wmc + len(invoked)
    p = q = 0
    for a, b in combinations(cls.methods, 2):
        if a.referenced_fields & b.referenced_fields:
            q += 1
        else:
            p += 1
    lcom = max(0, p - q)
    return ClassMetrics(wmc=wmc, dit=dit, noc=noc, cbo=cbo, rfc=rfc, lcom=lcom)


def overridden_method_count(model: CorpusModel) -> int:
    """Methods redefining a same-name, same-arity method of an internal
    ancestor. Override markers pointing at external parents do not count."""
    total = 0
    for name, cls in model.classes.items():
        ancestors = model.ancestors(name)
        if not ancestors:
            continue
        inherited = {
            (m.name, m.arity)
            for anc in ancestors
            for m in model.classes[anc].methods
        }
        total += sum(1 for m in cls.methods if (m.name, m.arity) in inherited)
    return total


def dependency_graph(model: CorpusModel) -> tuple[dict[str, set[str]], int]:
    """File-level dependency edges: f -> g when a class in f imports or
    references a class declared in g. Self-edges excluded; deduplicated."""
    edges: dict[str, set[str]] = {}
    for unit in model.units:
        targets: set[str] = set()
        for imp in unit.imports:
            if imp in model.classes:
                targets.add(model.file_of[imp])
        for cls in unit.declared_classes:
            for ref in _resolved_references(model, cls.qualified_name):
                targets.add(model.file_of[ref])
        targets.discard(unit.path)
        if targets:
            edges[unit.path] = targets
    count = sum(len(t) for t in edges.values())
    return edges, count


def source_report(model: CorpusModel) -> SourceMetricsReport:
    """Assemble per-class metrics and the repository-level aggregates."""
    per_class = {name: class_metrics(model, name) for name in sorted(model.classes)}
    inherited = sum(
        1
        for cls in model.classes.values()
        if (cls.kind != "interface" and cls.superclass_name is not None)
        or (cls.kind == "interface" and cls.interface_names)
    )
    packages = {cls.package_name for cls in model.classes.values()}
    _, edge_count = dependency_graph(model)
    analyzed = len(model.units)
    return SourceMetricsReport(
        per_class=per_class,
        inherited_class_count=inherited,
        overridden_method_count=overridden_method_count(model),
        package_count=len(packages) if model.classes else 0,
        dependency_edge_count=edge_count,
        mean_fanout=edge_count / analyzed if analyzed else 0.0,
        analyzed_file_count=analyzed,
        skipped_file_count=len(model.diagnostics),
    )
