"""Deterministic emitters: control-structure graphs, matrices, registers.

Every emitter is a pure function of its inputs and byte-identical across
runs.  Graphs target the DOT language so figures render with stock tooling;
tabular outputs are CSV (RFC-style quoting) or Markdown.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .core import (
    ComponentKind,
    GapVerdict,
    Model,
    TraceGraph,
    build_traceability_graph,
    uca_node,
)
from .ids import ArtifactId, format_uca_id
from .priority import PriorityAssessment, dedupe_requirements, high_priority
from .ucas import guide_word


# ---------------------------------------------------------------------------
# Control-structure graph (DOT)
# ---------------------------------------------------------------------------

_KIND_SHAPES = {
    ComponentKind.ORGANIZATION: "box",
    ComponentKind.HUMAN: "ellipse",
    ComponentKind.MACHINE: "component",
}


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_control_structure_graph(model: Model, phase: str) -> str:
    """One phase's control structure as a DOT digraph.

    Components incident to the phase's edges become nodes (shape by kind,
    dashed border outside the system boundary); control actions are solid
    edges labeled "<number> <label>", feedback signals dashed edges.
    """
    if phase not in model.phase_ids():
        raise KeyError(f"unknown phase {phase}")
    cas = sorted(
        (ca for ca in model.control_actions if ca.phase == phase),
        key=lambda ca: ca.number,
    )
    feedbacks = sorted(
        (fb for fb in model.feedbacks if fb.phase == phase),
        key=lambda fb: (fb.label, fb.source, fb.destination),
    )
    incident: set[str] = set()
    for ca in cas:
        incident.update((ca.controller, ca.controlled_process))
    for fb in feedbacks:
        incident.update((fb.source, fb.destination))

    components = {c.id: c for c in model.components}
    lines = [f"digraph {_dot_quote(phase)} {{", "    rankdir=TB;"]
    for cid in sorted(incident):
        comp = components[cid]
        style = "solid" if comp.inside_boundary else "dashed"
        lines.append(
            f"    {_dot_quote(cid)} [label={_dot_quote(comp.display_name)} "
            f"shape={_KIND_SHAPES[comp.kind]} style={style}];"
        )
    for ca in cas:
        label = f"{ca.number} {ca.label}"
        lines.append(
            f"    {_dot_quote(ca.controller)} -> {_dot_quote(ca.controlled_process)} "
            f"[label={_dot_quote(label)} style=solid];"
        )
    for fb in feedbacks:
        lines.append(
            f"    {_dot_quote(fb.source)} -> {_dot_quote(fb.destination)} "
            f"[label={_dot_quote(fb.label)} style=dashed];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# UCA prioritization matrix
# ---------------------------------------------------------------------------

MATRIX_COLUMNS = (
    "id",
    "controller",
    "guide word",
    "losses",
    "pms",
    "cif",
    "ej",
    "ej lo",
    "ej hi",
    "value",
    "band",
    "boundary",
)


def _matrix_rows(assessments: list[PriorityAssessment], model: Model) -> list[list[str]]:
    cas = model.ca_by_key()
    ucas = model.uca_by_id()
    ordered = sorted(
        assessments,
        key=lambda a: (a.band, -a.uca_priority_value, a.uca_id.sort_key()),
    )
    rows = []
    for a in ordered:
        ca = cas.get((a.uca_id.phase, a.uca_id.ca_number))
        uca = ucas.get(a.uca_id)
        rows.append(
            [
                format_uca_id(a.uca_id),
                ca.controller if ca else "",
                guide_word(a.uca_id.uca_type),
                " ".join(sorted(uca.linked_losses)) if uca else "",
                f"{a.pms:.4f}",
                f"{a.cif:.4f}",
                f"{a.ej_point:.4f}",
                f"{a.ej_interval[0]:.4f}",
                f"{a.ej_interval[1]:.4f}",
                f"{a.uca_priority_value:.4f}",
                a.band,
                "yes" if a.boundary_flag else "no",
            ]
        )
    return rows


def emit_uca_matrix(assessments: list[PriorityAssessment], model: Model, fmt: str = "csv") -> str:
    """Prioritization matrix, one row per assessed UCA.

    Rows sort by band then priority value descending (ties by id), so no P2
    row ever precedes a P1 row.
    """
    rows = _matrix_rows(assessments, model)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(MATRIX_COLUMNS)
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "md":
        out = ["| " + " | ".join(MATRIX_COLUMNS) + " |", "|" + "---|" * len(MATRIX_COLUMNS)]
        for row in rows:
            out.append("| " + " | ".join(row) + " |")
        return "\n".join(out) + "\n"
    raise ValueError(f"unsupported matrix format {fmt!r}")


# ---------------------------------------------------------------------------
# Summary counts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SummaryCounts:
    total_losses: int
    total_ucas: int
    high_priority_ucas: int
    causal_factors: int
    requirements: int
    distinct_high_priority_requirements: int
    allocations_per_stakeholder: dict
    gaps: int
    gaps_affecting_helicopter_ops: int

    def __post_init__(self):
        if self.high_priority_ucas > self.total_ucas:
            raise ValueError("high-priority UCAs cannot exceed total UCAs")
        if self.gaps > self.distinct_high_priority_requirements:
            raise ValueError("gaps cannot exceed distinct requirements")
        if self.gaps_affecting_helicopter_ops > self.gaps:
            raise ValueError("helicopter-relevant gaps cannot exceed gaps")


def emit_summary(
    model: Model,
    assessments: list[PriorityAssessment] | None = None,
    merges: list[tuple[ArtifactId, ArtifactId]] = (),
    graph: TraceGraph | None = None,
) -> tuple[SummaryCounts, str]:
    """Recount the analysis from the trace graph (never cached counters).

    Without assessments every distinct requirement group counts as
    in-scope; with assessments the distinct count restricts to groups
    reaching a P1/P2 UCA through the graph.
    """
    if graph is None:
        graph = build_traceability_graph(model)
    dedup = dedupe_requirements(model, merges)

    high = {a.uca_id for a in high_priority(assessments)} if assessments else set()
    high_nodes = {uca_node(uid) for uid in high}

    def group_is_high(rep: ArtifactId) -> bool:
        if assessments is None or not assessments:
            return True
        for rid in dedup.groups[rep]:
            reached = graph.reachable(("requirement", str(rid)))
            if reached & high_nodes:
                return True
        return False

    in_scope_groups = [rep for rep in sorted(dedup.groups) if group_is_high(rep)]
    by_id = model.requirement_by_id()
    allocations: dict[str, int] = {}
    for rep in in_scope_groups:
        stakeholders = set()
        for rid in dedup.groups[rep]:
            stakeholders |= by_id[rid].stakeholders
        for s in sorted(stakeholders):
            allocations[s] = allocations.get(s, 0) + 1

    effective = model.effective_gap_records()
    gap_count = 0
    helicopter_count = 0
    for node in graph.nodes_of_kind("gap"):
        record = next(rec for rid, rec in effective.items() if str(rid) == node[1])
        if record.verdict is GapVerdict.GAP:
            gap_count += 1
            if record.applies_to_existing_helicopter_ops:
                helicopter_count += 1

    counts = SummaryCounts(
        total_losses=len(graph.nodes_of_kind("loss")),
        total_ucas=len(graph.nodes_of_kind("uca")),
        high_priority_ucas=len(high),
        causal_factors=len(graph.nodes_of_kind("cf")),
        requirements=len(graph.nodes_of_kind("requirement")),
        distinct_high_priority_requirements=len(in_scope_groups),
        allocations_per_stakeholder=allocations,
        gaps=gap_count,
        gaps_affecting_helicopter_ops=helicopter_count,
    )
    return counts, render_summary(counts)


def render_summary(counts: SummaryCounts) -> str:
    """Human-readable totals table (also used for injected metadata counts)."""
    lines = [
        "# Analysis summary",
        "",
        "| metric | count |",
        "|---|---|",
        f"| losses | {counts.total_losses} |",
        f"| unsafe control actions | {counts.total_ucas} |",
        f"| high-priority UCAs (P1+P2) | {counts.high_priority_ucas} |",
        f"| causal factors | {counts.causal_factors} |",
        f"| requirements | {counts.requirements} |",
        f"| distinct high-priority requirements | {counts.distinct_high_priority_requirements} |",
        f"| gaps | {counts.gaps} |",
        f"| gaps affecting existing helicopter operations | {counts.gaps_affecting_helicopter_ops} |",
    ]
    if counts.allocations_per_stakeholder:
        lines.append("")
        lines.append("Allocations per stakeholder: " + ", ".join(
            f"{name} - {n}" for name, n in sorted(counts.allocations_per_stakeholder.items())
        ))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Gap register
# ---------------------------------------------------------------------------

def emit_gap_register(
    model: Model,
    merges: list[tuple[ArtifactId, ArtifactId]] = (),
    assessments: list[PriorityAssessment] | None = None,
) -> str:
    """Markdown register of effective gap verdicts, grouped by stakeholder.

    An entry allocated to several stakeholders appears in each of their
    sections but is counted once in the footer totals, which match
    :func:`emit_summary`'s recount.
    """
    counts, _ = emit_summary(model, assessments=assessments, merges=merges)
    by_id = model.requirement_by_id()
    components = {c.id: c for c in model.components}
    dedup = dedupe_requirements(model, merges)

    effective = [
        (rid, record)
        for rid, record in sorted(model.effective_gap_records().items())
        if record.verdict is GapVerdict.GAP
    ]

    per_stakeholder: dict[str, list[tuple[ArtifactId, object]]] = {}
    for rid, record in effective:
        stakeholders = set()
        for member in dedup.groups[dedup.representative_of[rid]]:
            stakeholders |= by_id[member].stakeholders
        for s in stakeholders:
            per_stakeholder.setdefault(s, []).append((rid, record))

    lines = ["# Gap register", ""]
    for s in sorted(per_stakeholder):
        display = components[s].display_name if s in components else s
        lines.append(f"## {display}")
        lines.append("")
        for rid, record in sorted(per_stakeholder[s], key=lambda e: e[0].sort_key()):
            flags = [f"recommend {record.recommendation_type.value}"]
            if record.applies_to_existing_helicopter_ops:
                flags.append("also affects existing helicopter operations")
            lines.append(f"- **{rid}** ({'; '.join(flags)}): {by_id[rid].text}")
        lines.append("")
    lines.append(
        f"Totals: {counts.gaps} gaps, "
        f"{counts.gaps_affecting_helicopter_ops} affecting existing helicopter operations."
    )
    return "\n".join(lines) + "\n"
