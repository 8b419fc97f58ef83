"""HTTP review API for group scoring sessions.

Resource-oriented endpoints under ``/v1`` exchange JSON mirroring the domain
types.  Experts identify themselves with the ``X-Expert-Id`` header; what-if
weight/threshold overrides are scoped to the ``X-Session-Id`` header and
never touch the canonical config.  Every assessment returned is a fresh
recomputation from the stored sheets, and every mutation lands in the audit
log (conflicting submissions for one (UCA, expert) are last-write-wins).
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse

from .config import BandThresholds, ScoringConfig
from .core import EJ_FACTORS, EjScoreSheet, GapVerdict, Model, UcaStatus
from .ids import IdError, format_uca_id, parse_uca_id
from .priority import PriorityAssessment, assess_uca, dedupe_requirements, group_sheets
from .reports import emit_summary
from .store import AnalysisStore
from .ucas import guide_word


def _field_errors(errors: list[dict]) -> JSONResponse:
    return JSONResponse(status_code=422, content={"errors": errors})


def _not_found(message: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"errors": [{"field": "", "message": message}]})


def _sheet_payload_errors(factors: Any) -> list[dict]:
    errors = []
    if not isinstance(factors, dict):
        return [{"field": "factors", "message": "factors must be an object"}]
    for name in EJ_FACTORS:
        if name not in factors:
            errors.append({"field": name, "message": "missing"})
        elif not isinstance(factors[name], int) or isinstance(factors[name], bool) or not 1 <= factors[name] <= 5:
            errors.append({"field": name, "message": "out of range 1..5"})
    for name in factors:
        if name not in EJ_FACTORS:
            errors.append({"field": name, "message": "unknown factor"})
    return errors


def _assessment_payload(assessment: PriorityAssessment) -> dict:
    return {
        "ucaId": format_uca_id(assessment.uca_id),
        "pms": assessment.pms,
        "cif": assessment.cif,
        "ejPoint": assessment.ej_point,
        "ejInterval": {"lo": assessment.ej_interval[0], "hi": assessment.ej_interval[1]},
        "ucaPriorityValue": assessment.uca_priority_value,
        "band": assessment.band,
        "boundaryFlag": assessment.boundary_flag,
    }


def create_app(
    model: Model,
    config: ScoringConfig | None = None,
    sheets_path: str | None = None,
) -> FastAPI:
    """Build the review service around one model snapshot."""
    if config is None:
        config = ScoringConfig()
    store = AnalysisStore(model)
    overrides: dict[str, ScoringConfig] = {}
    overrides_lock = threading.Lock()
    app = FastAPI(title="stpa-workbench review API", version="1")

    def session_config(session_id: str) -> ScoringConfig:
        with overrides_lock:
            return overrides.get(session_id, config)

    def write_through() -> None:
        if sheets_path is None:
            return
        from .priority import write_sheets_csv

        snapshot = store.model
        with open(sheets_path, "w", encoding="utf-8") as fh:
            fh.write(write_sheets_csv(list(snapshot.ej_sheets), list(snapshot.req_sheets)))

    def assess(uca_id, session_id: str) -> PriorityAssessment | None:
        snapshot = store.model
        uca = snapshot.uca_by_id().get(uca_id)
        if uca is None or uca.status is not UcaStatus.CONFIRMED:
            return None
        sheets = [s for s in snapshot.ej_sheets if s.uca_id == uca_id]
        if not sheets:
            return None
        return assess_uca(uca, snapshot, sheets, session_config(session_id))

    def matrix_payload(session_id: str) -> dict:
        snapshot = store.model
        rows = []
        for uca in sorted(snapshot.confirmed_ucas(), key=lambda u: u.id.sort_key()):
            assessment = assess(uca.id, session_id)
            if assessment is not None:
                rows.append(_assessment_payload(assessment))
        rows.sort(key=lambda r: (r["band"], -r["ucaPriorityValue"], r["ucaId"]))
        return {"rows": rows}

    @app.get("/v1/ucas")
    def list_ucas(pending: bool = False):
        snapshot = store.model
        scored = {s.uca_id for s in snapshot.ej_sheets}
        out = []
        for uca in sorted(snapshot.confirmed_ucas(), key=lambda u: u.id.sort_key()):
            if pending and uca.id in scored:
                continue
            experts = sorted({s.expert_id for s in snapshot.ej_sheets if s.uca_id == uca.id})
            out.append(
                {
                    "id": format_uca_id(uca.id),
                    "guideWord": guide_word(uca.id.uca_type),
                    "context": uca.context,
                    "losses": sorted(uca.linked_losses),
                    "scoredBy": experts,
                }
            )
        return {"ucas": out}

    @app.post("/v1/ucas/{uca_id}/sheet")
    async def submit_sheet(
        uca_id: str,
        request: Request,
        x_expert_id: str = Header(default=""),
    ):
        if not x_expert_id.strip():
            return _field_errors([{"field": "X-Expert-Id", "message": "expert id header required"}])
        try:
            uid = parse_uca_id(uca_id)
        except IdError as exc:
            return _field_errors([{"field": "ucaId", "message": str(exc)}])
        body = await request.json()
        factors = body.get("factors")
        errors = _sheet_payload_errors(factors)
        if errors:
            return _field_errors(errors)
        rationale = body.get("rationale", "")
        if not isinstance(rationale, str):
            return _field_errors([{"field": "rationale", "message": "must be a string"}])
        sheet = EjScoreSheet(uca_id=uid, expert_id=x_expert_id, factors=dict(factors), rationale=rationale)
        try:
            store.submit_ej_sheet(sheet)
        except KeyError:
            return _not_found(f"unknown UCA {uca_id}")
        write_through()
        return {"submitted": {"ucaId": uca_id, "expert": x_expert_id}}

    @app.get("/v1/ucas/{uca_id}/assessment")
    def get_assessment(uca_id: str, x_session_id: str = Header(default="default")):
        try:
            uid = parse_uca_id(uca_id)
        except IdError as exc:
            return _field_errors([{"field": "ucaId", "message": str(exc)}])
        assessment = assess(uid, x_session_id)
        if assessment is None:
            return _not_found(f"no sheets or no confirmed UCA {uca_id}")
        return _assessment_payload(assessment)

    @app.get("/v1/matrix")
    def get_matrix(x_session_id: str = Header(default="default")):
        return matrix_payload(x_session_id)

    @app.post("/v1/session/overrides")
    async def set_overrides(request: Request, x_session_id: str = Header(default="default")):
        body = await request.json()
        errors = []
        ej_weights = None
        bands = None
        if "ejWeights" in body:
            raw = body["ejWeights"]
            if not isinstance(raw, dict):
                errors.append({"field": "ejWeights", "message": "must be an object"})
            else:
                merged = dict(config.ej_weights)
                for key, value in raw.items():
                    if not isinstance(value, (int, float)) or isinstance(value, bool):
                        errors.append({"field": f"ejWeights.{key}", "message": "must be a number"})
                    else:
                        merged[key] = float(value)
                if not errors:
                    try:
                        ScoringConfig(ej_weights=merged)
                        ej_weights = merged
                    except ValueError as exc:
                        errors.append({"field": "ejWeights", "message": str(exc)})
        if "bands" in body:
            raw = body["bands"]
            if not isinstance(raw, dict):
                errors.append({"field": "bands", "message": "must be an object"})
            else:
                merged_bands = {
                    "p1": config.bands.p1,
                    "p2": config.bands.p2,
                    "p3": config.bands.p3,
                    "p4": config.bands.p4,
                }
                for key, value in raw.items():
                    if key not in merged_bands:
                        errors.append({"field": f"bands.{key}", "message": "unknown threshold"})
                    elif not isinstance(value, (int, float)) or isinstance(value, bool):
                        errors.append({"field": f"bands.{key}", "message": "must be a number"})
                    else:
                        merged_bands[key] = float(value)
                if not errors:
                    try:
                        bands = BandThresholds(**merged_bands)
                    except ValueError as exc:
                        errors.append({"field": "bands", "message": str(exc)})
        if errors:
            return _field_errors(errors)
        with overrides_lock:
            overrides[x_session_id] = config.with_overrides(ej_weights=ej_weights, bands=bands)
        return {"session": x_session_id, "overrideActive": True}

    @app.delete("/v1/session/overrides")
    def reset_overrides(x_session_id: str = Header(default="default")):
        with overrides_lock:
            overrides.pop(x_session_id, None)
        return {"session": x_session_id, "overrideActive": False}

    @app.get("/v1/gaps")
    def get_gaps():
        snapshot = store.model
        by_id = snapshot.requirement_by_id()
        dedup = dedupe_requirements(snapshot, store.merges)
        entries = []
        for rid, record in sorted(snapshot.effective_gap_records().items()):
            if record.verdict is not GapVerdict.GAP:
                continue
            stakeholders: set[str] = set()
            for member in dedup.groups[dedup.representative_of[rid]]:
                stakeholders |= by_id[member].stakeholders
            entries.append(
                {
                    "requirementId": str(rid),
                    "text": by_id[rid].text,
                    "recommendationType": record.recommendation_type.value,
                    "helicopterRelevant": record.applies_to_existing_helicopter_ops,
                    "stakeholders": sorted(stakeholders),
                }
            )
        return {
            "gaps": entries,
            "totals": {
                "gaps": len(entries),
                "helicopterRelevant": sum(1 for e in entries if e["helicopterRelevant"]),
            },
        }

    @app.get("/v1/summary")
    def get_summary(x_session_id: str = Header(default="default")):
        snapshot = store.model
        by_uca = group_sheets(list(snapshot.ej_sheets))
        assessments = [
            a
            for a in (assess(uid, x_session_id) for uid in by_uca)
            if a is not None
        ]
        counts, rendered = emit_summary(snapshot, assessments=assessments or None, merges=store.merges)
        return {
            "counts": {
                "totalLosses": counts.total_losses,
                "totalUcas": counts.total_ucas,
                "highPriorityUcas": counts.high_priority_ucas,
                "causalFactors": counts.causal_factors,
                "requirements": counts.requirements,
                "distinctHighPriorityRequirements": counts.distinct_high_priority_requirements,
                "allocationsPerStakeholder": counts.allocations_per_stakeholder,
                "gaps": counts.gaps,
                "gapsAffectingHelicopterOps": counts.gaps_affecting_helicopter_ops,
            },
            "rendered": rendered,
        }

    @app.get("/v1/audit")
    def get_audit():
        return {
            "entries": [
                {
                    "actor": entry.actor,
                    "timestamp": entry.timestamp,
                    "operation": entry.operation,
                    "payload": entry.payload,
                }
                for entry in store.audit_log
            ]
        }

    app.state.store = store
    return app
