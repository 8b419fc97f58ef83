"""Domain model for STPA analyses and the traceability graph over them.

A :class:`Model` is an immutable snapshot of one analysis universe: ranked
losses, phases, components with a system-boundary flag, control actions and
feedback signals, plus the step-3/step-4 artifacts layered on top (unsafe
control actions, loss scenarios, causal factors, requirements, gap records
and score sheets).  All operations here are pure functions of a snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .ids import ArtifactId, UcaId, is_phase_label


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """Location of a construct inside a DSL document (1-based)."""

    file: str
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan | None = None
    entity: tuple | None = None  # structured key of the entity at fault

    def render(self) -> str:
        loc = ""
        if self.span is not None:
            loc = f"{self.span.file}:{self.span.line}:{self.span.column}: "
        return f"{loc}{self.severity.value}[{self.code}] {self.message}"

    def with_span(self, span: SourceSpan | None) -> "Diagnostic":
        return replace(self, span=span)


# ---------------------------------------------------------------------------
# Entities
# ---------------------------------------------------------------------------

class ComponentKind(Enum):
    ORGANIZATION = "organization"
    HUMAN = "human"
    MACHINE = "machine"


class UcaStatus(Enum):
    CANDIDATE = "candidate"
    CONFIRMED = "confirmed"
    REJECTED = "rejected"


class ScenarioType(Enum):
    TYPE_A = "typeA"  # what triggers an unsafe control action
    TYPE_B = "typeB"  # why a correct control action is not executed properly


class GapVerdict(Enum):
    COVERED = "covered"
    GAP = "gap"


class RecommendationType(Enum):
    REGULATIONS = "Regulations"
    POLICY = "Policy"
    PROCEDURES = "Procedures"


@dataclass(frozen=True)
class Loss:
    id: str
    description: str
    rank: int  # 1 = most severe


@dataclass(frozen=True)
class Component:
    id: str
    display_name: str
    kind: ComponentKind
    inside_boundary: bool = True


@dataclass(frozen=True)
class Phase:
    id: str  # e.g. "Ph0.1"
    title: str


@dataclass(frozen=True)
class ControlAction:
    number: int
    label: str
    controller: str
    controlled_process: str
    phase: str

    def key(self) -> tuple[str, int]:
        return (self.phase, self.number)


@dataclass(frozen=True)
class FeedbackSignal:
    label: str
    source: str
    destination: str
    phase: str


@dataclass(frozen=True)
class Hazard:
    id: str
    description: str
    linked_losses: frozenset[str]


@dataclass(frozen=True)
class UnsafeControlAction:
    id: UcaId
    context: str = ""
    linked_losses: frozenset[str] = frozenset()
    status: UcaStatus = UcaStatus.CANDIDATE
    rejection_rationale: str = ""

    @property
    def ca_key(self) -> tuple[str, int]:
        return (self.id.phase, self.id.ca_number)


@dataclass(frozen=True)
class LossScenario:
    uca_id: UcaId
    scenario_type: ScenarioType
    description: str


@dataclass(frozen=True)
class CausalFactor:
    id: ArtifactId  # kind == "CF"
    description: str
    category: str
    scenario_type: ScenarioType

    @property
    def uca_id(self) -> UcaId:
        return self.id.uca


@dataclass(frozen=True)
class Requirement:
    id: ArtifactId  # kind == "RQ"
    text: str
    addresses: frozenset[ArtifactId]  # CF ids
    stakeholders: frozenset[str]  # component ids

    @property
    def uca_id(self) -> UcaId:
        return self.id.uca


@dataclass(frozen=True)
class GapRecord:
    requirement_id: ArtifactId  # representative of a distinct requirement group
    verdict: GapVerdict
    covered_by: tuple[str, ...] = ()  # citations; required when covered
    recommendation_type: RecommendationType | None = None  # required when gap
    applies_to_existing_helicopter_ops: bool = False


# Five factors scored by subject-matter experts per UCA, in canonical order.
EJ_FACTORS = (
    "operationalDisruption",
    "criticality",
    "detectability",
    "effectOnOtherStakeholders",
    "likelihoodOfOccurrence",
)

# Four factors scored per requirement, 5 = cheap/fast.
REQ_FACTORS = ("time", "cost", "typeOfRequirement", "likelihoodOfOccurrence")


@dataclass(frozen=True)
class EjScoreSheet:
    uca_id: UcaId
    expert_id: str
    factors: dict  # factor name -> int 1..5
    rationale: str = ""

    def validate(self) -> list[str]:
        return _sheet_problems(self.factors, EJ_FACTORS)


@dataclass(frozen=True)
class RequirementScoreSheet:
    requirement_id: ArtifactId
    expert_id: str
    factors: dict  # factor name -> int 1..5

    def validate(self) -> list[str]:
        return _sheet_problems(self.factors, REQ_FACTORS)


def _sheet_problems(factors: dict, expected: tuple[str, ...]) -> list[str]:
    problems = []
    for name in expected:
        if name not in factors:
            problems.append(f"{name} missing")
        elif not isinstance(factors[name], int) or not 1 <= factors[name] <= 5:
            problems.append(f"{name} out of range 1..5")
    for name in factors:
        if name not in expected:
            problems.append(f"unknown factor {name}")
    return problems


@dataclass(frozen=True)
class Model:
    """One immutable analysis snapshot."""

    losses: tuple[Loss, ...] = ()
    phases: tuple[Phase, ...] = ()
    components: tuple[Component, ...] = ()
    hazards: tuple[Hazard, ...] = ()
    control_actions: tuple[ControlAction, ...] = ()
    feedbacks: tuple[FeedbackSignal, ...] = ()
    ucas: tuple[UnsafeControlAction, ...] = ()
    scenarios: tuple[LossScenario, ...] = ()
    causal_factors: tuple[CausalFactor, ...] = ()
    requirements: tuple[Requirement, ...] = ()
    gap_records: tuple[GapRecord, ...] = ()
    ej_sheets: tuple[EjScoreSheet, ...] = ()
    req_sheets: tuple[RequirementScoreSheet, ...] = ()

    # -- lookups ----------------------------------------------------------

    def loss_ids(self) -> set[str]:
        return {l.id for l in self.losses}

    def component_ids(self) -> set[str]:
        return {c.id for c in self.components}

    def phase_ids(self) -> set[str]:
        return {p.id for p in self.phases}

    def ca_by_key(self) -> dict[tuple[str, int], ControlAction]:
        return {ca.key(): ca for ca in self.control_actions}

    def uca_by_id(self) -> dict[UcaId, UnsafeControlAction]:
        # A rejected closure record may share its placeholder id with a later
        # confirmation; the non-rejected entry wins the lookup.
        out: dict[UcaId, UnsafeControlAction] = {}
        for u in self.ucas:
            if u.id not in out or out[u.id].status is UcaStatus.REJECTED:
                out[u.id] = u
        return out

    def cf_by_id(self) -> dict[ArtifactId, CausalFactor]:
        return {c.id: c for c in self.causal_factors}

    def requirement_by_id(self) -> dict[ArtifactId, Requirement]:
        return {r.id: r for r in self.requirements}

    def confirmed_ucas(self) -> tuple[UnsafeControlAction, ...]:
        return tuple(u for u in self.ucas if u.status is UcaStatus.CONFIRMED)

    def with_(self, **changes) -> "Model":
        return replace(self, **changes)

    def effective_gap_records(self) -> dict[ArtifactId, GapRecord]:
        """Latest record per requirement group; earlier records are superseded."""
        effective: dict[ArtifactId, GapRecord] = {}
        for record in self.gap_records:
            effective[record.requirement_id] = record
        return effective


DEFAULT_CF_CATEGORIES = frozenset(
    {
        "process-model-flaw",
        "delayed-feedback",
        "missing-feedback",
        "communication-corruption",
        "organizational-degradation",
        "inadequate-control-algorithm",
        "misinterpretation",
        "conflicted-control",
        "processing-delay",
        "improper-execution",
    }
)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _err(code: str, message: str, entity: tuple | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, entity=entity)


def _warn(code: str, message: str, entity: tuple | None = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, entity=entity)


def validate_model(model: Model, cf_categories: frozenset[str] = DEFAULT_CF_CATEGORIES) -> list[Diagnostic]:
    """Check every structural invariant; empty result means the model is sound.

    Errors block downstream engines; warnings (boundary-crossing edges,
    feedback without a matching control loop, mis-homed requirements) do not.
    Each diagnostic carries a structured ``entity`` key so front ends can map
    it back to a source location.
    """
    out: list[Diagnostic] = []
    out.extend(_validate_losses(model))
    out.extend(_validate_phases(model))
    out.extend(_validate_components(model))
    out.extend(_validate_hazards(model))
    out.extend(_validate_control_actions(model))
    out.extend(_validate_feedbacks(model))
    out.extend(_validate_ucas(model))
    out.extend(_validate_scenarios(model))
    out.extend(_validate_causal_factors(model, cf_categories))
    out.extend(_validate_requirements(model))
    out.extend(_validate_gap_records(model))
    out.extend(_validate_sheets(model))
    return out


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def _validate_losses(model: Model) -> list[Diagnostic]:
    out = []
    seen_ids: set[str] = set()
    seen_ranks: set[int] = set()
    for loss in model.losses:
        key = ("loss", loss.id)
        if loss.id in seen_ids:
            out.append(_err("duplicate-loss", f"duplicate loss id {loss.id}", key))
        seen_ids.add(loss.id)
        if loss.rank < 1:
            out.append(_err("bad-loss-rank", f"{loss.id}: rank must be positive, got {loss.rank}", key))
        elif loss.rank in seen_ranks:
            out.append(_err("duplicate-loss-rank", f"{loss.id}: duplicate loss rank {loss.rank}", key))
        seen_ranks.add(loss.rank)
    n = len(model.losses)
    if n and seen_ranks != set(range(1, n + 1)) and not any(d.code == "duplicate-loss-rank" for d in out):
        out.append(_err("loss-rank-gap", f"loss ranks must form a contiguous 1..{n} sequence"))
    return out


def _validate_phases(model: Model) -> list[Diagnostic]:
    out = []
    seen: set[str] = set()
    for phase in model.phases:
        key = ("phase", phase.id)
        if phase.id in seen:
            out.append(_err("duplicate-phase", f"duplicate phase id {phase.id}", key))
        seen.add(phase.id)
        if not is_phase_label(phase.id):
            out.append(_err("bad-phase-label", f"{phase.id}: not of the form Ph<digits>[.<digits>]", key))
    return out


def _validate_components(model: Model) -> list[Diagnostic]:
    out = []
    seen: set[str] = set()
    for comp in model.components:
        if comp.id in seen:
            out.append(_err("duplicate-component", f"duplicate component id {comp.id}", ("component", comp.id)))
        seen.add(comp.id)
    return out


def _validate_hazards(model: Model) -> list[Diagnostic]:
    out = []
    losses = model.loss_ids()
    seen: set[str] = set()
    for hazard in model.hazards:
        key = ("hazard", hazard.id)
        if hazard.id in seen:
            out.append(_err("duplicate-hazard", f"duplicate hazard id {hazard.id}", key))
        seen.add(hazard.id)
        if not hazard.linked_losses:
            out.append(_err("hazard-no-losses", f"{hazard.id}: linkedLosses must be non-empty", key))
        for lid in sorted(hazard.linked_losses - losses):
            out.append(_err("unknown-loss", f"{hazard.id}: unknown loss {lid}", key))
    return out


def _validate_control_actions(model: Model) -> list[Diagnostic]:
    out = []
    comps = {c.id: c for c in model.components}
    phases = model.phase_ids()
    seen: set[tuple[str, int]] = set()
    for ca in model.control_actions:
        key = ("ca", ca.phase, ca.number)
        name = f"CA {ca.number} ({ca.phase})"
        if ca.number < 1:
            out.append(_err("bad-ca-number", f"{name}: number must be positive", key))
        if ca.key() in seen:
            out.append(_err("duplicate-ca", f"{name}: duplicate (phase, number) pair", key))
        seen.add(ca.key())
        if ca.phase not in phases:
            out.append(_err("unknown-phase", f"{name}: unknown phase {ca.phase}", key))
        for endpoint in (ca.controller, ca.controlled_process):
            if endpoint not in comps:
                out.append(_err("unknown-component", f"{name}: unknown component {endpoint}", key))
        if ca.controller == ca.controlled_process:
            out.append(_err("self-control", f"{name}: controller equals controlled process", key))
        if ca.controller in comps and ca.controlled_process in comps:
            if comps[ca.controller].inside_boundary != comps[ca.controlled_process].inside_boundary:
                out.append(_warn("boundary-crossing", f"{name}: edge crosses the system boundary", key))
    return out


def _validate_feedbacks(model: Model) -> list[Diagnostic]:
    out = []
    comps = {c.id: c for c in model.components}
    phases = model.phase_ids()
    reverse_cas = {(ca.phase, ca.controller, ca.controlled_process) for ca in model.control_actions}
    for index, fb in enumerate(model.feedbacks):
        key = ("feedback", index)
        name = f"feedback '{fb.label}' ({fb.phase})"
        if fb.phase not in phases:
            out.append(_err("unknown-phase", f"{name}: unknown phase {fb.phase}", key))
        for endpoint in (fb.source, fb.destination):
            if endpoint not in comps:
                out.append(_err("unknown-component", f"{name}: unknown component {endpoint}", key))
        if fb.source in comps and fb.destination in comps:
            if comps[fb.source].inside_boundary != comps[fb.destination].inside_boundary:
                out.append(_warn("boundary-crossing", f"{name}: edge crosses the system boundary", key))
            if (fb.phase, fb.destination, fb.source) not in reverse_cas:
                out.append(
                    _warn("orphan-feedback", f"{name}: no control action closes the loop in this phase", key)
                )
    return out


def _validate_ucas(model: Model) -> list[Diagnostic]:
    out = []
    cas = model.ca_by_key()
    losses = model.loss_ids()
    phases = model.phase_ids()
    seen: set[UcaId] = set()
    for uca in model.ucas:
        uid = str(uca.id)
        key = ("uca", uid)
        # Rejected entries close a (CA, type) cell with a placeholder sequence
        # and do not participate in id uniqueness.
        if uca.status is not UcaStatus.REJECTED:
            if uca.id in seen:
                out.append(_err("duplicate-uca", f"{uid}: duplicate UCA id", key))
            seen.add(uca.id)
        if uca.id.phase not in phases:
            out.append(_err("unknown-phase", f"{uid}: unknown phase {uca.id.phase}", key))
        if uca.ca_key not in cas:
            out.append(_err("unknown-ca", f"{uid}: no control action {uca.id.ca_number} in {uca.id.phase}", key))
        for lid in sorted(uca.linked_losses - losses):
            out.append(_err("unknown-loss", f"{uid}: unknown loss {lid}", key))
        if uca.status is UcaStatus.CONFIRMED:
            if not uca.context.strip():
                out.append(_err("missing-context", f"{uid}: confirmed UCA requires a context", key))
            if not uca.linked_losses:
                out.append(_err("missing-losses", f"{uid}: confirmed UCA requires loss links", key))
        if uca.status is UcaStatus.REJECTED and not uca.rejection_rationale.strip():
            out.append(_err("missing-rationale", f"{uid}: rejected UCA requires a rationale", key))
    return out


def _validate_scenarios(model: Model) -> list[Diagnostic]:
    out = []
    known = {u.id for u in model.ucas}
    for index, sc in enumerate(model.scenarios):
        if sc.uca_id not in known:
            out.append(_err("unknown-uca", f"scenario references unknown UCA {sc.uca_id}", ("scenario", index)))
    return out


def _validate_causal_factors(model: Model, categories: frozenset[str]) -> list[Diagnostic]:
    out = []
    ucas = model.uca_by_id()
    seen: set[ArtifactId] = set()
    per_uca: dict[UcaId, list[int]] = {}
    for cf in model.causal_factors:
        cid = str(cf.id)
        key = ("cf", cid)
        if cf.id in seen:
            out.append(_err("duplicate-cf", f"{cid}: duplicate causal factor id", key))
        seen.add(cf.id)
        parent = ucas.get(cf.uca_id)
        if parent is None:
            out.append(_err("unknown-uca", f"{cid}: unknown UCA {cf.uca_id}", key))
        elif parent.status is not UcaStatus.CONFIRMED:
            out.append(_err("unconfirmed-uca", f"{cid}: parent UCA is not confirmed", key))
        if cf.category not in categories:
            out.append(_err("unknown-category", f"{cid}: category {cf.category!r} not in taxonomy", key))
        per_uca.setdefault(cf.uca_id, []).append(cf.id.number)
    out.extend(_check_dense(per_uca, "CF", "sparse-cf-numbering"))
    return out


def _validate_requirements(model: Model) -> list[Diagnostic]:
    out = []
    cfs = model.cf_by_id()
    comps = model.component_ids()
    seen: set[ArtifactId] = set()
    per_uca: dict[UcaId, list[int]] = {}
    for req in model.requirements:
        rid = str(req.id)
        key = ("requirement", rid)
        if req.id in seen:
            out.append(_err("duplicate-requirement", f"{rid}: duplicate requirement id", key))
        seen.add(req.id)
        if not req.text.strip():
            out.append(_err("missing-text", f"{rid}: requirement text is empty", key))
        if not req.addresses:
            out.append(_err("missing-cfs", f"{rid}: must address at least one causal factor", key))
        for cf_id in sorted(req.addresses):
            if cf_id not in cfs:
                out.append(_err("unknown-cf", f"{rid}: unknown causal factor {cf_id}", key))
        if not req.stakeholders:
            out.append(_err("missing-stakeholders", f"{rid}: must name at least one stakeholder", key))
        for s in sorted(req.stakeholders - comps):
            out.append(_err("unknown-component", f"{rid}: unknown stakeholder {s}", key))
        if req.addresses and all(cf_id in cfs for cf_id in req.addresses):
            home = min(cf_id.uca for cf_id in req.addresses)
            if home != req.uca_id:
                out.append(
                    _warn(
                        "requirement-home-mismatch",
                        f"{rid}: homed under {req.uca_id} but lowest addressed parent is {home}",
                        key,
                    )
                )
        per_uca.setdefault(req.uca_id, []).append(req.id.number)
    out.extend(_check_dense(per_uca, "RQ", "sparse-rq-numbering"))
    return out


def _check_dense(per_uca: dict[UcaId, list[int]], kind: str, code: str) -> list[Diagnostic]:
    out = []
    for uca_id, numbers in per_uca.items():
        expected = set(range(1, len(numbers) + 1))
        if set(numbers) != expected or len(numbers) != len(set(numbers)):
            out.append(
                _err(
                    code,
                    f"{uca_id}: {kind} numbers {sorted(numbers)} are not dense 1..{len(numbers)}",
                    ("uca", str(uca_id)),
                )
            )
    return out


def _validate_gap_records(model: Model) -> list[Diagnostic]:
    out = []
    reqs = model.requirement_by_id()
    for index, record in enumerate(model.gap_records):
        key = ("gap", index)
        rid = str(record.requirement_id)
        if record.requirement_id not in reqs:
            out.append(_err("unknown-requirement", f"gap record references unknown requirement {rid}", key))
        if record.verdict is GapVerdict.GAP and record.recommendation_type is None:
            out.append(_err("missing-recommendation", f"{rid}: gap verdict requires a recommendation type", key))
        if record.verdict is GapVerdict.COVERED and not record.covered_by:
            out.append(_err("missing-citations", f"{rid}: covered verdict requires citations", key))
    return out


def _validate_sheets(model: Model) -> list[Diagnostic]:
    out = []
    ucas = {u.id for u in model.ucas}
    reqs = set(model.requirement_by_id())
    for index, sheet in enumerate(model.ej_sheets):
        key = ("ej_sheet", index)
        name = f"sheet {sheet.uca_id}/{sheet.expert_id}"
        if sheet.uca_id not in ucas:
            out.append(_err("unknown-uca", f"{name}: unknown UCA", key))
        for problem in sheet.validate():
            out.append(_err("bad-sheet", f"{name}: {problem}", key))
    for index, sheet in enumerate(model.req_sheets):
        key = ("req_sheet", index)
        name = f"sheet {sheet.requirement_id}/{sheet.expert_id}"
        if sheet.requirement_id not in reqs:
            out.append(_err("unknown-requirement", f"{name}: unknown requirement", key))
        for problem in sheet.validate():
            out.append(_err("bad-sheet", f"{name}: {problem}", key))
    return out


# ---------------------------------------------------------------------------
# Control-hierarchy span
# ---------------------------------------------------------------------------

def downstream_span(component_id: str, model: Model, phase: str | None = None) -> frozenset[str]:
    """Components transitively reachable over controller→controlled-process edges.

    The start component is excluded.  Cycles are permitted in the model; the
    visited set guarantees termination.  ``phase`` restricts the edge set to
    one phase's control structure.
    """
    if component_id not in model.component_ids():
        raise KeyError(f"unknown component {component_id}")
    edges: dict[str, set[str]] = {}
    for ca in model.control_actions:
        if phase is not None and ca.phase != phase:
            continue
        edges.setdefault(ca.controller, set()).add(ca.controlled_process)
    seen: set[str] = set()
    frontier = [component_id]
    while frontier:
        current = frontier.pop()
        for nxt in edges.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    seen.discard(component_id)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Traceability graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceGraph:
    """Typed derivation graph: gap → requirement → causal factor → UCA → loss.

    ``nodes`` are (kind, identifier) pairs; ``edges`` point from the derived
    entity toward its source, plus uca→ca links.  The layering makes the
    graph acyclic along the derivation direction by construction.
    """

    nodes: frozenset[tuple[str, str]]
    edges: frozenset[tuple[tuple[str, str], tuple[str, str]]]

    def out_edges(self, node: tuple[str, str]) -> list[tuple[str, str]]:
        return sorted(dst for src, dst in self.edges if src == node)

    def in_edges(self, node: tuple[str, str]) -> list[tuple[str, str]]:
        return sorted(src for src, dst in self.edges if dst == node)

    def reachable(self, start: tuple[str, str]) -> set[tuple[str, str]]:
        seen: set[tuple[str, str]] = set()
        frontier = [start]
        while frontier:
            current = frontier.pop()
            for nxt in self.out_edges(current):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    def nodes_of_kind(self, kind: str) -> list[tuple[str, str]]:
        return sorted(n for n in self.nodes if n[0] == kind)


def loss_node(loss_id: str) -> tuple[str, str]:
    return ("loss", loss_id)


def ca_node_key(phase: str, number: int) -> tuple[str, str]:
    return ("ca", f"{phase}:{number}")


def uca_node(uca_id: UcaId) -> tuple[str, str]:
    return ("uca", str(uca_id))


def cf_node(cf_id: ArtifactId) -> tuple[str, str]:
    return ("cf", str(cf_id))


def requirement_node(req_id: ArtifactId) -> tuple[str, str]:
    return ("requirement", str(req_id))


def gap_node(req_id: ArtifactId) -> tuple[str, str]:
    return ("gap", str(req_id))


def build_traceability_graph(model: Model) -> TraceGraph:
    """Build the derivation graph; rejects models with validation errors."""
    diagnostics = validate_model(model)
    if has_errors(diagnostics):
        rendered = "; ".join(d.render() for d in diagnostics if d.severity is Severity.ERROR)
        raise ValueError(f"model has validation errors: {rendered}")

    nodes: set[tuple[str, str]] = set()
    edges: set[tuple[tuple[str, str], tuple[str, str]]] = set()

    for loss in model.losses:
        nodes.add(loss_node(loss.id))
    for ca in model.control_actions:
        nodes.add(ca_node_key(ca.phase, ca.number))
    for uca in model.ucas:
        node = uca_node(uca.id)
        nodes.add(node)
        edges.add((node, ca_node_key(uca.id.phase, uca.id.ca_number)))
        for lid in uca.linked_losses:
            edges.add((node, loss_node(lid)))
    for cf in model.causal_factors:
        node = cf_node(cf.id)
        nodes.add(node)
        edges.add((node, uca_node(cf.uca_id)))
    for req in model.requirements:
        node = requirement_node(req.id)
        nodes.add(node)
        for cf_id in req.addresses:
            edges.add((node, cf_node(cf_id)))
    for req_id in model.effective_gap_records():
        node = gap_node(req_id)
        nodes.add(node)
        edges.add((node, requirement_node(req_id)))

    return TraceGraph(nodes=frozenset(nodes), edges=frozenset(edges))
