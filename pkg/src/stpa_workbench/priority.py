"""Prioritization of unsafe control actions and derived requirements.

A UCA's priority combines three inputs: pre-mitigation severity (PMS, from
the ranked losses it leads to), the controller impact factor (CIF, from the
controller's downstream span in its phase's control hierarchy) and expert
judgment (EJ, a weighted mean of five SME-scored factors).  The UCA priority
value is EJ x CIF; together with PMS it maps to one of five bands, P1
(highest) to P5.  Requirement priority reuses the pipeline with the
requirement score in place of PMS and the maximum parent UCA value.

Monte Carlo simulation over the expert-provided factor values quantifies
disagreement between experts: the resulting 90% interval is mapped through
the same banding pipeline, and assessments whose interval straddles a band
edge are flagged for group review.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass

import numpy as np

from .config import BandThresholds, McsConfig, ScoringConfig
from .core import (
    EJ_FACTORS,
    REQ_FACTORS,
    EjScoreSheet,
    Model,
    RequirementScoreSheet,
    UcaStatus,
    UnsafeControlAction,
    downstream_span,
)
from .ids import ArtifactId, UcaId, format_uca_id, parse_any_id

BANDS = ("P1", "P2", "P3", "P4", "P5")


# ---------------------------------------------------------------------------
# Severity and controller impact
# ---------------------------------------------------------------------------

def severity_of_rank(rank: int, n_losses: int) -> float:
    """Linear map from loss rank to severity: rank 1 -> 5.0, rank N -> 1.0."""
    if n_losses <= 1:
        return 5.0
    return 1.0 + 4.0 * (n_losses - rank) / (n_losses - 1)


def compute_pms(uca: UnsafeControlAction, model: Model) -> float:
    """Pre-mitigation severity: the severity of the most severe linked loss."""
    if uca.status is not UcaStatus.CONFIRMED:
        raise ValueError(f"{uca.id}: PMS requires a confirmed UCA")
    ranks = {loss.id: loss.rank for loss in model.losses}
    linked = [ranks[lid] for lid in uca.linked_losses if lid in ranks]
    if not linked:
        raise ValueError(f"{uca.id}: no linked losses")
    return severity_of_rank(min(linked), len(model.losses))


def compute_cif(uca: UnsafeControlAction, model: Model) -> float:
    """Controller impact factor from the phase-local control hierarchy.

    CIF = 1 + 4 * span(controller) / maxSpan, where spans follow
    controller->controlled-process edges within the UCA's phase and maxSpan
    is the largest span among that phase's controllers.
    """
    ca = model.ca_by_key().get(uca.ca_key)
    if ca is None:
        raise ValueError(f"{uca.id}: no control action {uca.id.ca_number} in {uca.id.phase}")
    return component_cif(ca.controller, uca.id.phase, model)


def component_cif(component_id: str, phase: str, model: Model) -> float:
    controllers = {ca.controller for ca in model.control_actions if ca.phase == phase}
    max_span = max(
        (len(downstream_span(c, model, phase=phase)) for c in controllers),
        default=0,
    )
    if max_span == 0:
        return 1.0
    span = len(downstream_span(component_id, model, phase=phase))
    return 1.0 + 4.0 * span / max_span


# ---------------------------------------------------------------------------
# Expert judgment
# ---------------------------------------------------------------------------

def _combine(weights: dict, factor_values: dict) -> float:
    # One canonical accumulation order so the deterministic aggregate and the
    # per-iteration MCS combination are bit-identical on degenerate input.
    total = 0.0
    for name in EJ_FACTORS:
        total += weights[name] * factor_values[name]
    return total


def _require_sheets(sheets: list[EjScoreSheet]) -> None:
    if not sheets:
        raise ValueError("at least one expert sheet is required")
    for sheet in sheets:
        problems = sheet.validate()
        if problems:
            raise ValueError(f"sheet {sheet.uca_id}/{sheet.expert_id}: {'; '.join(problems)}")


def aggregate_ej(sheets: list[EjScoreSheet], weights: dict | None = None) -> float:
    """Deterministic EJ point value: weighted mean of per-factor expert means."""
    _require_sheets(sheets)
    if weights is None:
        weights = {name: 1.0 / len(EJ_FACTORS) for name in EJ_FACTORS}
    means = {
        name: float(np.mean([sheet.factors[name] for sheet in sheets])) for name in EJ_FACTORS
    }
    return _combine(weights, means)


@dataclass(frozen=True)
class EjDistribution:
    """Summary of the Monte Carlo EJ samples for one UCA."""

    mean: float
    stddev: float
    interval90: tuple[float, float]
    minimum: float
    maximum: float
    iterations: int


def derive_seed(base_seed: int, uca_id: UcaId) -> int:
    """Stable per-UCA seed so parallel runs are scheduling-independent."""
    digest = hashlib.sha256(format_uca_id(uca_id).encode("utf-8")).digest()
    return (base_seed ^ int.from_bytes(digest[:8], "big")) & 0xFFFFFFFFFFFFFFFF

def run_mcs(
    sheets: list[EjScoreSheet],
    weights: dict | None = None,
    config: McsConfig | None = None,
) -> EjDistribution:
    """Monte Carlo aggregation of expert judgment.

    Per iteration each factor is drawn independently across the experts'
    values -- ``empirical``: uniformly over the provided values;
    ``triangular``: from triangular(min, mode=median, max) -- and combined
    with the same weights as :func:`aggregate_ej`.  Identical seed and
    config give bit-identical output.
    """
    _require_sheets(sheets)
    if weights is None:
        weights = {name: 1.0 / len(EJ_FACTORS) for name in EJ_FACTORS}
    if config is None:
        config = McsConfig()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    iterations = config.iterations

    samples = np.zeros(iterations, dtype=np.float64)
    for name in EJ_FACTORS:
        values = np.array([sheet.factors[name] for sheet in sheets], dtype=np.float64)
        if config.sampling_scheme == "empirical":
            draws = values[rng.integers(0, len(values), size=iterations)]
        else:
            low, high = float(values.min()), float(values.max())
            mode = float(np.median(values))
            if low == high:
                draws = np.full(iterations, low)
            else:
                draws = rng.triangular(low, mode, high, size=iterations)
        samples += weights[name] * draws

    if np.ptp(samples) == 0.0:
        # All iterations identical: report the exact common value (np.mean
        # of a constant array is not guaranteed to be exact).
        value = float(samples[0])
        mean, stddev = value, 0.0
        lo = hi = minimum = maximum = value
    else:
        mean = float(np.mean(samples))
        stddev = float(np.std(samples))
        lo, hi = (float(q) for q in np.quantile(samples, [0.05, 0.95]))
        minimum, maximum = float(samples.min()), float(samples.max())

    # Keep the deterministic point estimate inside the reported interval.
    point = aggregate_ej(sheets, weights)
    lo, hi = min(lo, point), max(hi, point)
    return EjDistribution(
        mean=mean,
        stddev=stddev,
        interval90=(lo, hi),
        minimum=minimum,
        maximum=maximum,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# Banding
# ---------------------------------------------------------------------------

def normalize_priority_value(value: float) -> float:
    """Map a priority value in [1, 25] (EJ x CIF) onto the [1, 5] scale."""
    return 1.0 + 4.0 * (value - 1.0) / 24.0

def band_for(axis: float, value: float, bands: BandThresholds) -> str:
    """Band from one axis score (PMS or requirement score) and a value.

    The combined criticality is the mean of the axis score and the
    normalized value; thresholds are right-open except the top, and
    boundary values round toward higher criticality.
    """
    if not 1.0 <= axis <= 5.0:
        raise ValueError(f"axis score {axis} outside [1, 5]")
    if not 1.0 <= value <= 25.0:
        raise ValueError(f"priority value {value} outside [1, 25]")
    combined = (axis + normalize_priority_value(value)) / 2.0
    for threshold, band in zip(bands.as_tuple(), BANDS):
        if combined >= threshold:
            return band
    return "P5"


def assign_uca_priority(
    pms: float,
    uca_priority_value: float,
    bands: BandThresholds | None = None,
    value_interval: tuple[float, float] | None = None,
) -> tuple[str, bool]:
    """Band a UCA; the boundary flag is set when ``value_interval`` (the EJ
    90% interval mapped through EJ x CIF) straddles a band edge."""
    if bands is None:
        bands = BandThresholds()
    band = band_for(pms, uca_priority_value, bands)
    boundary = False
    if value_interval is not None:
        lo, hi = value_interval
        boundary = band_for(pms, lo, bands) != band_for(pms, hi, bands)
    return band, boundary


def compute_requirement_score(
    sheet: RequirementScoreSheet, weights: dict | None = None
) -> float:
    """Weighted mean of the four requirement factors (5 = cheap/fast)."""
    problems = sheet.validate()
    if problems:
        raise ValueError(f"sheet {sheet.requirement_id}/{sheet.expert_id}: {'; '.join(problems)}")
    if weights is None:
        weights = {name: 1.0 / len(REQ_FACTORS) for name in REQ_FACTORS}
    return sum(weights[name] * sheet.factors[name] for name in REQ_FACTORS)


def assign_requirement_priority(
    parent_uca_priority_values: list[float],
    req_score: float,
    bands: BandThresholds | None = None,
) -> str:
    """Band a requirement from its most critical parent UCA and its score."""
    if not parent_uca_priority_values:
        raise ValueError("requirement must trace to at least one UCA")
    if bands is None:
        bands = BandThresholds()
    return "Req" + band_for(req_score, max(parent_uca_priority_values), bands)


# ---------------------------------------------------------------------------
# Full assessment pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriorityAssessment:
    uca_id: UcaId
    pms: float
    cif: float
    ej_point: float
    ej_interval: tuple[float, float]
    uca_priority_value: float  # ej_point x cif
    band: str
    boundary_flag: bool


def assess_uca(
    uca: UnsafeControlAction,
    model: Model,
    sheets: list[EjScoreSheet],
    config: ScoringConfig | None = None,
) -> PriorityAssessment:
    """Assess one confirmed UCA from its expert sheets.

    The MCS seed is derived per UCA from the configured base seed, so
    assessments are independent of evaluation order.
    """
    if config is None:
        config = ScoringConfig()
    pms = compute_pms(uca, model)
    cif = compute_cif(uca, model)
    ej_point = aggregate_ej(sheets, config.ej_weights)
    mcs_config = McsConfig(
        iterations=config.mcs.iterations,
        seed=derive_seed(config.mcs.seed, uca.id),
        sampling_scheme=config.mcs.sampling_scheme,
    )
    distribution = run_mcs(sheets, config.ej_weights, mcs_config)
    value = ej_point * cif
    lo, hi = distribution.interval90
    band, boundary = assign_uca_priority(
        pms, value, config.bands, value_interval=(lo * cif, hi * cif)
    )
    return PriorityAssessment(
        uca_id=uca.id,
        pms=pms,
        cif=cif,
        ej_point=ej_point,
        ej_interval=distribution.interval90,
        uca_priority_value=value,
        band=band,
        boundary_flag=boundary,
    )


def assess_all(
    model: Model,
    sheets_by_uca: dict[UcaId, list[EjScoreSheet]],
    config: ScoringConfig | None = None,
) -> list[PriorityAssessment]:
    """Assess every confirmed UCA that has sheets, in id order."""
    out = []
    for uca in sorted(model.confirmed_ucas(), key=lambda u: u.id.sort_key()):
        sheets = sheets_by_uca.get(uca.id)
        if sheets:
            out.append(assess_uca(uca, model, sheets, config))
    return out


def high_priority(assessments: list[PriorityAssessment]) -> list[PriorityAssessment]:
    """The P1/P2 subset that proceeds to loss-scenario analysis."""
    return [a for a in assessments if a.band in ("P1", "P2")]


def group_sheets(sheets: list[EjScoreSheet]) -> dict[UcaId, list[EjScoreSheet]]:
    by_uca: dict[UcaId, list[EjScoreSheet]] = {}
    for sheet in sheets:
        by_uca.setdefault(sheet.uca_id, []).append(sheet)
    return by_uca


# ---------------------------------------------------------------------------
# Requirement dedup
# ---------------------------------------------------------------------------

def normalize_requirement_text(text: str) -> str:
    return " ".join(text.casefold().split())


class _UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class DedupResult:
    """Partition of requirements into distinct groups.

    ``groups`` maps each representative (lexicographically smallest RQ id)
    to the sorted ids in its group.  ``allocation_count`` sums, over groups,
    the size of the union of stakeholder allocations, so one requirement
    allocated to several stakeholders is counted once per stakeholder.
    """

    groups: dict  # ArtifactId -> tuple[ArtifactId, ...]
    representative_of: dict  # ArtifactId -> ArtifactId
    distinct_count: int
    allocation_count: int
    allocations_per_stakeholder: dict  # component id -> group count


def dedupe_requirements(
    model: Model, merge_decls: list[tuple[ArtifactId, ArtifactId]] = ()
) -> DedupResult:
    """Partition requirements into groups of duplicates.

    Groups are the connected components of exact-normalized-text equality
    unioned with analyst-declared merge pairs.  The result is invariant
    under input ordering.
    """
    requirements = model.requirements
    by_id = model.requirement_by_id()
    ids = sorted(by_id)
    uf = _UnionFind(ids)

    by_text: dict[str, ArtifactId] = {}
    for rid in ids:
        key = normalize_requirement_text(by_id[rid].text)
        if key in by_text:
            uf.union(by_text[key], rid)
        else:
            by_text[key] = rid

    for a, b in merge_decls:
        if a not in by_id:
            raise KeyError(f"merge declaration references unknown requirement {a}")
        if b not in by_id:
            raise KeyError(f"merge declaration references unknown requirement {b}")
        uf.union(a, b)

    members: dict[ArtifactId, list[ArtifactId]] = {}
    for rid in ids:
        members.setdefault(uf.find(rid), []).append(rid)

    # Representative: lexicographically smallest rendered RQ id.
    groups = {
        min(group, key=str): tuple(sorted(group)) for group in members.values()
    }
    representative_of = {rid: rep for rep, group in groups.items() for rid in group}

    per_stakeholder: dict[str, int] = {}
    allocation_count = 0
    for rep, group in sorted(groups.items()):
        stakeholders = set()
        for rid in group:
            stakeholders |= by_id[rid].stakeholders
        allocation_count += len(stakeholders)
        for s in stakeholders:
            per_stakeholder[s] = per_stakeholder.get(s, 0) + 1

    assert len(requirements) == sum(len(g) for g in groups.values())
    return DedupResult(
        groups=groups,
        representative_of=representative_of,
        distinct_count=len(groups),
        allocation_count=allocation_count,
        allocations_per_stakeholder=per_stakeholder,
    )


# ---------------------------------------------------------------------------
# Score-sheet CSV ingest
# ---------------------------------------------------------------------------

SHEET_COLUMNS = ("id", "expert", "factor", "value")


def read_sheets_csv(text: str) -> tuple[list[EjScoreSheet], list[RequirementScoreSheet]]:
    """Read long-format score sheets: one row per (id, expert, factor).

    UCA ids yield EJ sheets, RQ ids requirement sheets.  Incomplete or
    out-of-range sheets are reported with the offending ids.
    """
    reader = csv.DictReader(io.StringIO(text))
    missing = set(SHEET_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"sheet CSV missing columns: {', '.join(sorted(missing))}")

    ej_factors: dict[tuple[UcaId, str], dict[str, int]] = {}
    req_factors: dict[tuple[ArtifactId, str], dict[str, int]] = {}
    for row_no, row in enumerate(reader, start=2):
        ident = parse_any_id(row["id"].strip())
        factor = row["factor"].strip()
        try:
            value = int(row["value"])
        except ValueError as exc:
            raise ValueError(f"row {row_no}: value {row['value']!r} is not an integer") from exc
        expert = row["expert"].strip()
        if isinstance(ident, UcaId):
            ej_factors.setdefault((ident, expert), {})[factor] = value
        elif ident.kind == "RQ":
            req_factors.setdefault((ident, expert), {})[factor] = value
        else:
            raise ValueError(f"row {row_no}: {row['id']} is not a UCA or requirement id")

    ej_sheets = [
        EjScoreSheet(uca_id=uid, expert_id=expert, factors=factors)
        for (uid, expert), factors in sorted(ej_factors.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))
    ]
    req_sheets = [
        RequirementScoreSheet(requirement_id=rid, expert_id=expert, factors=factors)
        for (rid, expert), factors in sorted(req_factors.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))
    ]
    problems = []
    for sheet in ej_sheets:
        for problem in sheet.validate():
            problems.append(f"{sheet.uca_id}/{sheet.expert_id}: {problem}")
    for sheet in req_sheets:
        for problem in sheet.validate():
            problems.append(f"{sheet.requirement_id}/{sheet.expert_id}: {problem}")
    if problems:
        raise ValueError("bad score sheets: " + "; ".join(problems))
    return ej_sheets, req_sheets


def write_sheets_csv(
    ej_sheets: list[EjScoreSheet], req_sheets: list[RequirementScoreSheet] = ()
) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SHEET_COLUMNS)
    for sheet in sorted(ej_sheets, key=lambda s: (s.uca_id.sort_key(), s.expert_id)):
        for name in EJ_FACTORS:
            if name in sheet.factors:
                writer.writerow([format_uca_id(sheet.uca_id), sheet.expert_id, name, sheet.factors[name]])
    for sheet in sorted(req_sheets, key=lambda s: (s.requirement_id.sort_key(), s.expert_id)):
        for name in REQ_FACTORS:
            if name in sheet.factors:
                writer.writerow([str(sheet.requirement_id), sheet.expert_id, name, sheet.factors[name]])
    return buffer.getvalue()
