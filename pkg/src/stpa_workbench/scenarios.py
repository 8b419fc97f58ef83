"""Loss-scenario support: causal-factor checklists, requirements, gap verdicts.

Checklist templates are tailored to the controller's kind (organization,
human, machine); instantiating one for a UCA filters the prompts by the
UCA's guide type, so timing-type UCAs surface delayed-feedback prompts and
machine controllers never see human-misinterpretation prompts.

Causal factors and requirements are numbered densely per UCA; a requirement
addressing causal factors of several UCAs is homed under the lowest-ordered
parent but traced to all of them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    CausalFactor,
    ComponentKind,
    GapRecord,
    GapVerdict,
    Model,
    RecommendationType,
    Requirement,
    ScenarioType,
    UcaStatus,
    UnsafeControlAction,
)
from .ids import ArtifactId, UcaId

ALL_TYPES = frozenset(range(1, 8))
TIMING_TYPES = frozenset({4, 5, 6, 7})  # too early / late / long / short
OMISSION_TYPES = frozenset({1, 3})  # not provided / not needed


@dataclass(frozen=True)
class ChecklistEntry:
    category: str
    prompt: str
    scenario_type: ScenarioType
    uca_types: frozenset[int] = ALL_TYPES  # guide types this prompt applies to


@dataclass(frozen=True)
class ChecklistTemplate:
    controller_kind: ComponentKind
    entries: tuple[ChecklistEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"template for {self.controller_kind.value} must not be empty")


def _entry(category, prompt, stype, types=ALL_TYPES):
    return ChecklistEntry(category=category, prompt=prompt, scenario_type=stype, uca_types=frozenset(types))


_SHARED_ENTRIES = (
    _entry(
        "process-model-flaw",
        "The controller's picture of the controlled process is wrong or outdated",
        ScenarioType.TYPE_A,
    ),
    _entry(
        "delayed-feedback",
        "Feedback about the current state is delayed",
        ScenarioType.TYPE_A,
        TIMING_TYPES,
    ),
    _entry(
        "missing-feedback",
        "Feedback needed to detect the condition is missing or never received",
        ScenarioType.TYPE_A,
        OMISSION_TYPES | {2},
    ),
    _entry(
        "communication-corruption",
        "The control action is corrupted, jammed or lost in transmission",
        ScenarioType.TYPE_B,
    ),
    _entry(
        "conflicted-control",
        "A conflicting instruction from another controller overrides or contradicts this one",
        ScenarioType.TYPE_B,
    ),
)

DEFAULT_TEMPLATES: dict[ComponentKind, ChecklistTemplate] = {
    ComponentKind.ORGANIZATION: ChecklistTemplate(
        ComponentKind.ORGANIZATION,
        _SHARED_ENTRIES
        + (
            _entry(
                "organizational-degradation",
                "The internal process has degraded over time (overloaded tasks, flawed process)",
                ScenarioType.TYPE_A,
            ),
            _entry(
                "inadequate-control-algorithm",
                "The documented procedure is inadequate for this situation",
                ScenarioType.TYPE_A,
            ),
            _entry(
                "processing-delay",
                "Internal processing or approval chains delay the action past its window",
                ScenarioType.TYPE_A,
                TIMING_TYPES,
            ),
        ),
    ),
    ComponentKind.HUMAN: ChecklistTemplate(
        ComponentKind.HUMAN,
        _SHARED_ENTRIES
        + (
            _entry(
                "misinterpretation",
                "The operator misinterprets the received data due to its unclear format",
                ScenarioType.TYPE_A,
                frozenset({1, 2, 3}),
            ),
            _entry(
                "inadequate-control-algorithm",
                "Training or procedures do not cover this situation",
                ScenarioType.TYPE_A,
            ),
            _entry(
                "processing-delay",
                "High workload delays the decision past its window",
                ScenarioType.TYPE_A,
                TIMING_TYPES,
            ),
        ),
    ),
    ComponentKind.MACHINE: ChecklistTemplate(
        ComponentKind.MACHINE,
        _SHARED_ENTRIES
        + (
            _entry(
                "inadequate-control-algorithm",
                "The control algorithm's requirements do not cover this situation",
                ScenarioType.TYPE_A,
            ),
            _entry(
                "processing-delay",
                "Processing latency delays the action past its window",
                ScenarioType.TYPE_A,
                TIMING_TYPES,
            ),
        ),
    ),
}


def instantiate_checklist(
    uca: UnsafeControlAction,
    model: Model,
    templates: dict[ComponentKind, ChecklistTemplate] | None = None,
) -> list[ChecklistEntry]:
    """Prompts applicable to one confirmed UCA, in template order."""
    if uca.status is not UcaStatus.CONFIRMED:
        raise ValueError(f"{uca.id}: checklist requires a confirmed UCA")
    if templates is None:
        templates = DEFAULT_TEMPLATES
    ca = model.ca_by_key().get(uca.ca_key)
    if ca is None:
        raise ValueError(f"{uca.id}: no control action {uca.id.ca_number} in {uca.id.phase}")
    components = {c.id: c for c in model.components}
    controller = components[ca.controller]
    template = templates.get(controller.kind)
    if template is None:
        raise KeyError(f"no checklist template for controller kind {controller.kind.value}")
    return [entry for entry in template.entries if uca.id.uca_type in entry.uca_types]


# ---------------------------------------------------------------------------
# Recording (pure constructors; the analysis store applies them)
# ---------------------------------------------------------------------------

def next_causal_factor(
    model: Model,
    uca_id: UcaId,
    description: str,
    category: str,
    scenario_type: ScenarioType,
) -> CausalFactor:
    """Causal factor with the next dense per-UCA number."""
    uca = model.uca_by_id().get(uca_id)
    if uca is None:
        raise KeyError(f"unknown UCA {uca_id}")
    if uca.status is not UcaStatus.CONFIRMED:
        raise ValueError(f"{uca_id}: causal factors require a confirmed UCA")
    if not description.strip():
        raise ValueError("causal factor description must not be empty")
    numbers = [cf.id.number for cf in model.causal_factors if cf.uca_id == uca_id]
    return CausalFactor(
        id=ArtifactId(uca=uca_id, kind="CF", number=max(numbers, default=0) + 1),
        description=description,
        category=category,
        scenario_type=scenario_type,
    )


def next_requirement(
    model: Model,
    cf_ids: set[ArtifactId] | frozenset[ArtifactId],
    text: str,
    stakeholders: set[str] | frozenset[str],
) -> Requirement:
    """Requirement addressing one or more causal factors.

    The id is homed under the lowest-ordered parent UCA of the addressed
    factors, with the next dense number for that UCA.
    """
    if not cf_ids:
        raise ValueError("requirement must address at least one causal factor")
    if not text.strip():
        raise ValueError("requirement text must not be empty")
    if not stakeholders:
        raise ValueError("requirement must name at least one stakeholder")
    known_cfs = model.cf_by_id()
    for cf_id in sorted(cf_ids):
        if cf_id not in known_cfs:
            raise KeyError(f"unknown causal factor {cf_id}")
    unknown = sorted(set(stakeholders) - model.component_ids())
    if unknown:
        raise KeyError(f"unknown stakeholders: {', '.join(unknown)}")
    home = min(cf_id.uca for cf_id in cf_ids)
    numbers = [req.id.number for req in model.requirements if req.uca_id == home]
    return Requirement(
        id=ArtifactId(uca=home, kind="RQ", number=max(numbers, default=0) + 1),
        text=text,
        addresses=frozenset(cf_ids),
        stakeholders=frozenset(stakeholders),
    )


def make_gap_record(
    model: Model,
    requirement_id: ArtifactId,
    verdict: GapVerdict,
    citations: tuple[str, ...] = (),
    recommendation_type: RecommendationType | None = None,
    helicopter_flag: bool = False,
) -> GapRecord:
    """Coverage verdict for one distinct requirement (group representative).

    A gap needs a recommendation type; a covered verdict needs citations.
    Records are immutable: corrections are expressed by appending a
    superseding record for the same requirement.
    """
    if requirement_id not in model.requirement_by_id():
        raise KeyError(f"unknown requirement {requirement_id}")
    if verdict is GapVerdict.GAP and recommendation_type is None:
        raise ValueError("gap verdict requires a recommendation type")
    if verdict is GapVerdict.COVERED and not citations:
        raise ValueError("covered verdict requires at least one citation")
    return GapRecord(
        requirement_id=requirement_id,
        verdict=verdict,
        covered_by=tuple(citations),
        recommendation_type=recommendation_type,
        applies_to_existing_helicopter_ops=helicopter_flag,
    )
