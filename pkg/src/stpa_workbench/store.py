"""Mutable analysis session over an immutable model snapshot.

All mutations funnel through a single lock (writes are serialized, reads
take lock-free snapshots) and append to an audit log carrying enough payload
that :func:`replay` can rebuild the final state from the initial model --
the property the review API's audit trail relies on.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from .core import (
    EjScoreSheet,
    GapVerdict,
    Model,
    RecommendationType,
    RequirementScoreSheet,
    ScenarioType,
    UcaStatus,
    UnsafeControlAction,
)
from .ids import ArtifactId, UcaId, parse_artifact_id, parse_uca_id
from .scenarios import make_gap_record, next_causal_factor, next_requirement
from .ucas import confirm_uca, reject_uca


@dataclass(frozen=True)
class AuditEntry:
    actor: str
    timestamp: float
    operation: str
    payload: dict


class AnalysisStore:
    """Single-writer store for one analysis session."""

    def __init__(self, model: Model):
        self._initial = model
        self._model = model
        self._merges: list[tuple[ArtifactId, ArtifactId]] = []
        self._audit: list[AuditEntry] = []
        self._lock = threading.Lock()

    # -- reads -------------------------------------------------------------

    @property
    def model(self) -> Model:
        return self._model

    @property
    def initial_model(self) -> Model:
        return self._initial

    @property
    def merges(self) -> list[tuple[ArtifactId, ArtifactId]]:
        return list(self._merges)

    @property
    def audit_log(self) -> list[AuditEntry]:
        return list(self._audit)

    def ej_sheets_for(self, uca_id: UcaId) -> list[EjScoreSheet]:
        return [s for s in self._model.ej_sheets if s.uca_id == uca_id]

    # -- mutations ----------------------------------------------------------

    def _record(self, actor: str, operation: str, payload: dict) -> None:
        self._audit.append(
            AuditEntry(actor=actor, timestamp=time.time(), operation=operation, payload=payload)
        )

    def confirm_candidate(
        self,
        candidate: UnsafeControlAction,
        context: str,
        loss_ids: set[str],
        actor: str = "analyst",
    ) -> UnsafeControlAction:
        with self._lock:
            # Rejected candidates never consume sequence numbers.
            existing = {u.id for u in self._model.ucas if u.status is not UcaStatus.REJECTED}
            confirmed = confirm_uca(candidate, context, loss_ids, self._model, existing)
            self._model = self._model.with_(ucas=self._model.ucas + (confirmed,))
            self._record(
                actor,
                "confirm_uca",
                {
                    "phase": candidate.id.phase,
                    "ca_number": candidate.id.ca_number,
                    "uca_type": candidate.id.uca_type,
                    "context": context,
                    "losses": sorted(loss_ids),
                },
            )
            return confirmed

    def reject_candidate(
        self, candidate: UnsafeControlAction, rationale: str, actor: str = "analyst"
    ) -> UnsafeControlAction:
        with self._lock:
            rejected = reject_uca(candidate, rationale)
            self._model = self._model.with_(ucas=self._model.ucas + (rejected,))
            self._record(
                actor,
                "reject_uca",
                {
                    "phase": candidate.id.phase,
                    "ca_number": candidate.id.ca_number,
                    "uca_type": candidate.id.uca_type,
                    "sequence": candidate.id.sequence,
                    "rationale": rationale,
                },
            )
            return rejected

    def record_causal_factor(
        self,
        uca_id: UcaId,
        description: str,
        category: str,
        scenario_type: ScenarioType,
        actor: str = "analyst",
    ):
        with self._lock:
            cf = next_causal_factor(self._model, uca_id, description, category, scenario_type)
            self._model = self._model.with_(causal_factors=self._model.causal_factors + (cf,))
            self._record(
                actor,
                "record_cf",
                {
                    "uca": str(uca_id),
                    "description": description,
                    "category": category,
                    "scenario_type": scenario_type.value,
                },
            )
            return cf

    def derive_requirement(
        self,
        cf_ids: set[ArtifactId],
        text: str,
        stakeholders: set[str],
        actor: str = "analyst",
    ):
        with self._lock:
            req = next_requirement(self._model, cf_ids, text, stakeholders)
            self._model = self._model.with_(requirements=self._model.requirements + (req,))
            self._record(
                actor,
                "derive_requirement",
                {
                    "cfs": sorted(str(c) for c in cf_ids),
                    "text": text,
                    "stakeholders": sorted(stakeholders),
                },
            )
            return req

    def assess_gap(
        self,
        requirement_id: ArtifactId,
        verdict: GapVerdict,
        citations: tuple[str, ...] = (),
        recommendation_type: RecommendationType | None = None,
        helicopter_flag: bool = False,
        actor: str = "analyst",
    ):
        with self._lock:
            record = make_gap_record(
                self._model, requirement_id, verdict, citations, recommendation_type, helicopter_flag
            )
            self._model = self._model.with_(gap_records=self._model.gap_records + (record,))
            self._record(
                actor,
                "assess_gap",
                {
                    "requirement": str(requirement_id),
                    "verdict": verdict.value,
                    "citations": list(citations),
                    "recommendation": recommendation_type.value if recommendation_type else None,
                    "helicopter": helicopter_flag,
                },
            )
            return record

    def submit_ej_sheet(self, sheet: EjScoreSheet, actor: str | None = None) -> None:
        """Store one expert's sheet; resubmission for the same (UCA, expert)
        is last-write-wins, with both submissions audited."""
        problems = sheet.validate()
        if problems:
            raise ValueError("; ".join(problems))
        if sheet.uca_id not in {u.id for u in self._model.ucas}:
            raise KeyError(f"unknown UCA {sheet.uca_id}")
        with self._lock:
            kept = tuple(
                s
                for s in self._model.ej_sheets
                if not (s.uca_id == sheet.uca_id and s.expert_id == sheet.expert_id)
            )
            self._model = self._model.with_(ej_sheets=kept + (sheet,))
            self._record(
                actor or sheet.expert_id,
                "submit_ej_sheet",
                {
                    "uca": str(sheet.uca_id),
                    "expert": sheet.expert_id,
                    "factors": dict(sheet.factors),
                    "rationale": sheet.rationale,
                },
            )

    def submit_req_sheet(self, sheet: RequirementScoreSheet, actor: str | None = None) -> None:
        problems = sheet.validate()
        if problems:
            raise ValueError("; ".join(problems))
        if sheet.requirement_id not in self._model.requirement_by_id():
            raise KeyError(f"unknown requirement {sheet.requirement_id}")
        with self._lock:
            kept = tuple(
                s
                for s in self._model.req_sheets
                if not (s.requirement_id == sheet.requirement_id and s.expert_id == sheet.expert_id)
            )
            self._model = self._model.with_(req_sheets=kept + (sheet,))
            self._record(
                actor or sheet.expert_id,
                "submit_req_sheet",
                {
                    "requirement": str(sheet.requirement_id),
                    "expert": sheet.expert_id,
                    "factors": dict(sheet.factors),
                },
            )

    def declare_merge(self, a: ArtifactId, b: ArtifactId, actor: str = "analyst") -> None:
        known = self._model.requirement_by_id()
        for rid in (a, b):
            if rid not in known:
                raise KeyError(f"unknown requirement {rid}")
        with self._lock:
            self._merges.append((a, b))
            self._record(actor, "declare_merge", {"a": str(a), "b": str(b)})


def replay(initial: Model, audit_log: list[AuditEntry]) -> AnalysisStore:
    """Rebuild a store by replaying an audit log over the initial model."""
    store = AnalysisStore(initial)
    for entry in audit_log:
        payload = entry.payload
        if entry.operation == "confirm_uca":
            candidate = UnsafeControlAction(
                id=UcaId(
                    phase=payload["phase"],
                    ca_number=payload["ca_number"],
                    uca_type=payload["uca_type"],
                    sequence=1,
                )
            )
            store.confirm_candidate(candidate, payload["context"], set(payload["losses"]), entry.actor)
        elif entry.operation == "reject_uca":
            candidate = UnsafeControlAction(
                id=UcaId(
                    phase=payload["phase"],
                    ca_number=payload["ca_number"],
                    uca_type=payload["uca_type"],
                    sequence=payload["sequence"],
                )
            )
            store.reject_candidate(candidate, payload["rationale"], entry.actor)
        elif entry.operation == "record_cf":
            store.record_causal_factor(
                parse_uca_id(payload["uca"]),
                payload["description"],
                payload["category"],
                ScenarioType(payload["scenario_type"]),
                entry.actor,
            )
        elif entry.operation == "derive_requirement":
            store.derive_requirement(
                {parse_artifact_id(c, "CF") for c in payload["cfs"]},
                payload["text"],
                set(payload["stakeholders"]),
                entry.actor,
            )
        elif entry.operation == "assess_gap":
            store.assess_gap(
                parse_artifact_id(payload["requirement"], "RQ"),
                GapVerdict(payload["verdict"]),
                tuple(payload["citations"]),
                RecommendationType(payload["recommendation"]) if payload["recommendation"] else None,
                payload["helicopter"],
                entry.actor,
            )
        elif entry.operation == "submit_ej_sheet":
            store.submit_ej_sheet(
                EjScoreSheet(
                    uca_id=parse_uca_id(payload["uca"]),
                    expert_id=payload["expert"],
                    factors=dict(payload["factors"]),
                    rationale=payload.get("rationale", ""),
                ),
                entry.actor,
            )
        elif entry.operation == "submit_req_sheet":
            store.submit_req_sheet(
                RequirementScoreSheet(
                    requirement_id=parse_artifact_id(payload["requirement"], "RQ"),
                    expert_id=payload["expert"],
                    factors=dict(payload["factors"]),
                ),
                entry.actor,
            )
        elif entry.operation == "declare_merge":
            store.declare_merge(
                parse_artifact_id(payload["a"], "RQ"),
                parse_artifact_id(payload["b"], "RQ"),
                entry.actor,
            )
        else:
            raise ValueError(f"unknown audit operation {entry.operation!r}")
    return store
