"""Guide-word generation and lifecycle management of unsafe control actions.

Every control action expands into exactly seven typed candidates (one per
guide word).  Candidates carry a placeholder sequence number; a permanent
number is allocated only at confirmation so rejected candidates never
consume id space.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .core import Model, UcaStatus, UnsafeControlAction
from .ids import UcaId, format_uca_id


@dataclass(frozen=True)
class UcaType:
    code: int  # 1..7
    guide_word: str


UCA_TYPES: tuple[UcaType, ...] = (
    UcaType(1, "not provided"),
    UcaType(2, "provided incorrectly"),
    UcaType(3, "provided when not needed"),
    UcaType(4, "too early"),
    UcaType(5, "too late"),
    UcaType(6, "too long"),
    UcaType(7, "too short"),
)

UCA_TYPE_BY_CODE = {t.code: t for t in UCA_TYPES}


def guide_word(code: int) -> str:
    return UCA_TYPE_BY_CODE[code].guide_word


def generate_candidates(model: Model, phase_filter: str | None = None) -> list[UnsafeControlAction]:
    """Expand every (filtered) control action into its 7 typed candidates.

    Candidates have empty context, empty loss links, status=candidate and a
    placeholder sequence of 1.  Order is deterministic: (phase, CA number,
    type code).
    """
    if phase_filter is not None and phase_filter not in model.phase_ids():
        raise KeyError(f"unknown phase {phase_filter}")
    cas = [ca for ca in model.control_actions if phase_filter is None or ca.phase == phase_filter]
    cas.sort(key=lambda ca: (ca.phase, ca.number))
    out: list[UnsafeControlAction] = []
    for ca in cas:
        for uca_type in UCA_TYPES:
            out.append(
                UnsafeControlAction(
                    id=UcaId(phase=ca.phase, ca_number=ca.number, uca_type=uca_type.code, sequence=1),
                    status=UcaStatus.CANDIDATE,
                )
            )
    return out


def allocate_uca_id(
    phase: str, ca_number: int, type_code: int, existing: set[UcaId] | frozenset[UcaId]
) -> UcaId:
    """Next free sequence number for (phase, CA, type): 1 + max existing Z.

    Sequence counters are independent per (CA, type) pair; the result never
    collides with ``existing``.
    """
    used = [
        uid.sequence
        for uid in existing
        if uid.phase == phase and uid.ca_number == ca_number and uid.uca_type == type_code
    ]
    sequence = 1 + max(used, default=0)
    return UcaId(phase=phase, ca_number=ca_number, uca_type=type_code, sequence=sequence)


def confirm_uca(
    candidate: UnsafeControlAction,
    context: str,
    loss_ids: set[str] | frozenset[str],
    model: Model,
    existing: set[UcaId] | frozenset[UcaId] = frozenset(),
) -> UnsafeControlAction:
    """Confirm a candidate with its unsafe context and loss links.

    Allocates the permanent sequence number against ``existing`` (typically
    the ids already confirmed in the analysis store).
    """
    if not context.strip():
        raise ValueError("confirmation requires a non-empty context")
    if not loss_ids:
        raise ValueError("confirmation requires at least one loss link")
    unknown = sorted(set(loss_ids) - model.loss_ids())
    if unknown:
        raise ValueError(f"unknown loss ids: {', '.join(unknown)}")
    uid = allocate_uca_id(candidate.id.phase, candidate.id.ca_number, candidate.id.uca_type, existing)
    return UnsafeControlAction(
        id=uid,
        context=context,
        linked_losses=frozenset(loss_ids),
        status=UcaStatus.CONFIRMED,
    )


def reject_uca(candidate: UnsafeControlAction, rationale: str) -> UnsafeControlAction:
    """Close a candidate as examined-and-rejected; the rationale is mandatory."""
    if not rationale.strip():
        raise ValueError("rejection requires a non-empty rationale")
    return UnsafeControlAction(
        id=candidate.id,
        context=candidate.context,
        linked_losses=candidate.linked_losses,
        status=UcaStatus.REJECTED,
        rejection_rationale=rationale,
    )


WORKSHEET_COLUMNS = ("id", "ca label", "guide word", "context", "losses", "status")


def write_candidate_worksheet(ucas: list[UnsafeControlAction], model: Model) -> str:
    """Render the candidate worksheet as CSV text (RFC-style quoting)."""
    cas = model.ca_by_key()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(WORKSHEET_COLUMNS)
    for uca in ucas:
        ca = cas.get(uca.ca_key)
        writer.writerow(
            [
                format_uca_id(uca.id),
                ca.label if ca else "",
                guide_word(uca.id.uca_type),
                uca.context,
                " ".join(sorted(uca.linked_losses)),
                uca.status.value,
            ]
        )
    return buffer.getvalue()
