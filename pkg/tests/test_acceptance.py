"""Acceptance suite: one test per release criterion, at stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  Criteria cover fixture fidelity, the identifier grammar, the
candidate generator, prioritization monotonicity, Monte Carlo behavior,
requirement dedup, high-priority semantics, report determinism and the
documented CIF/PMS spot values.
"""

from __future__ import annotations

import random
import time

import pytest

from stpa_workbench.config import BandThresholds, McsConfig, ScoringConfig
from stpa_workbench.core import (
    EJ_FACTORS,
    Component,
    ComponentKind,
    ControlAction,
    Loss,
    Model,
    Phase,
)
from stpa_workbench.dsl import parse_model
from stpa_workbench.ids import IdError, parse_any_id, parse_uca_id
from stpa_workbench.priority import (
    aggregate_ej,
    assess_all,
    assign_uca_priority,
    component_cif,
    compute_pms,
    dedupe_requirements,
    high_priority,
    run_mcs,
    severity_of_rank,
)
from stpa_workbench.reports import (
    emit_control_structure_graph,
    emit_gap_register,
    emit_summary,
    emit_uca_matrix,
)
from stpa_workbench.scenarios import instantiate_checklist
from stpa_workbench.ucas import generate_candidates, write_candidate_worksheet

from dot_validator import validate_dot
from test_core import closure_oracle
from test_dedupe import oracle_partition, requirements_model, rq
from test_ids import CASE_STUDY_ID_STRINGS
from test_priority import confirmed as confirmed_uca
from test_priority import losses_model, sheet

ORG = ComponentKind.ORGANIZATION


def report(criterion: str, detail: str) -> None:
    print(f"[acceptance] PASS {criterion}: {detail}")


# -- criterion 1: fixture fidelity ------------------------------------------

def test_criterion_1_fixture_fidelity(corpus_path):
    started = time.perf_counter()
    result = parse_model(corpus_path.read_text(encoding="utf-8"), file=str(corpus_path))
    assert result.diagnostics == [], [d.render() for d in result.diagnostics]
    counts, _ = emit_summary(result.model)
    elapsed = time.perf_counter() - started
    assert counts.total_losses == 5
    assert counts.total_ucas == 10
    assert counts.causal_factors == 5
    assert counts.gaps == 12
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    report(
        "1 fixture-fidelity",
        f"corpus parses clean; recount 5/10/5/12 via graph traversal in {elapsed * 1000:.0f} ms",
    )


# -- criterion 2: id grammar --------------------------------------------------

def test_criterion_2_id_grammar():
    for literal in CASE_STUDY_ID_STRINGS:
        parsed = parse_any_id(literal, lenient=True)
        canonical = str(parsed)
        assert str(parse_any_id(canonical)) == canonical, literal
        if " " not in literal and "RQ." not in literal:
            assert canonical == literal
    with pytest.raises(IdError):
        parse_uca_id("UCA(Ph1)-18.0.1")
    with pytest.raises(IdError):
        parse_uca_id("UCA(Ph1)-18.8.1")
    report(
        "2 id-grammar",
        f"{len(CASE_STUDY_ID_STRINGS)} case-study ids round-trip; Y=0 and Y=8 rejected",
    )


# -- criterion 3: generator cardinality --------------------------------------

def _random_model(rng: random.Random) -> Model:
    n_cas = rng.randint(1, 20)
    n_phases = rng.randint(1, 3)
    phases = tuple(Phase(f"Ph{i}", f"phase {i}") for i in range(1, n_phases + 1))
    components = tuple(
        Component(f"C{i}", f"component {i}", ORG) for i in range(rng.randint(2, 6))
    )
    cas = []
    for number in range(1, n_cas + 1):
        controller, process = rng.sample(range(len(components)), 2)
        cas.append(
            ControlAction(
                number,
                f"action {number}",
                components[controller].id,
                components[process].id,
                phases[rng.randrange(n_phases)].id,
            )
        )
    return Model(phases=phases, components=components, control_actions=tuple(cas))


def test_criterion_3_generator_cardinality():
    rng = random.Random(314159)
    for _ in range(200):
        model = _random_model(rng)
        first = generate_candidates(model)
        second = generate_candidates(model)
        assert len(first) == 7 * len(model.control_actions)
        assert first == second
        assert write_candidate_worksheet(first, model) == write_candidate_worksheet(second, model)
    report("3 generator-cardinality", "200 random models: 7 x CA count, deterministic order")


# -- criterion 4: prioritization monotonicity ---------------------------------

def test_criterion_4_monotonicity():
    rng = random.Random(271828)
    violations = 0
    checks = 0
    bands = BandThresholds()

    def band_number(pms, ej, cif):
        band, _ = assign_uca_priority(pms, ej * cif, bands)
        return int(band[1])

    for _ in range(10_000):
        pms = rng.uniform(1.0, 5.0)
        cif = rng.uniform(1.0, 5.0)
        n_experts = rng.randint(1, 3)
        values = [[rng.randint(1, 5) for _ in EJ_FACTORS] for _ in range(n_experts)]
        sheets = [sheet(v, expert=f"E{i}") for i, v in enumerate(values)]
        base = band_number(pms, aggregate_ej(sheets), cif)

        expert = rng.randrange(n_experts)
        factor = rng.randrange(len(EJ_FACTORS))
        bumped = [list(v) for v in values]
        bumped[expert][factor] = min(5, bumped[expert][factor] + 1)
        bumped_sheets = [sheet(v, expert=f"E{i}") for i, v in enumerate(bumped)]
        checks += 1
        if band_number(pms, aggregate_ej(bumped_sheets), cif) > base:
            violations += 1

        ej = aggregate_ej(sheets)
        for new_pms in (min(5.0, pms + rng.uniform(0, 1)),):
            checks += 1
            if band_number(new_pms, ej, cif) > base:
                violations += 1
        for new_cif in (min(5.0, cif + rng.uniform(0, 1)),):
            checks += 1
            if band_number(pms, ej, new_cif) > base:
                violations += 1

    assert violations == 0
    report("4 monotonicity", f"{checks} increase checks over 10,000 assessments, 0 violations")


# -- criterion 5: Monte Carlo -------------------------------------------------

def test_criterion_5_mcs():
    started = time.perf_counter()
    # (a) degenerate agreement: exact equality with the deterministic aggregate
    agreeing = [sheet([3, 2, 4, 2, 3], "E1"), sheet([3, 2, 4, 2, 3], "E2")]
    degenerate = run_mcs(agreeing, config=McsConfig(iterations=10_000, seed=1))
    assert degenerate.stddev == 0.0
    assert degenerate.interval90[0] == degenerate.interval90[1]
    assert degenerate.mean == aggregate_ej(agreeing)

    # (b) empirical scheme, one factor {1, 5}, others constant 3
    split = [sheet([1, 3, 3, 3, 3], "E1"), sheet([5, 3, 3, 3, 3], "E2")]
    estimate = run_mcs(split, config=McsConfig(iterations=100_000, seed=2))
    assert abs(estimate.mean - 3.0) <= 0.05

    # (c) fixed seed twice: bit-identical distributions
    config = McsConfig(iterations=100_000, seed=42)
    first = run_mcs(split, config=config)
    second = run_mcs(split, config=config)
    assert first == second

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"took {elapsed:.3f}s"
    report(
        "5 mcs",
        f"degenerate exact, |mean-3| = {abs(estimate.mean - 3.0):.4f} <= 0.05 at 1e5 iterations, "
        f"seed 42 bit-identical, {elapsed:.2f}s",
    )


# -- criterion 6: dedup oracle ------------------------------------------------

def test_criterion_6_dedup_oracle():
    rng = random.Random(161803)
    for _ in range(100):
        n = rng.randint(1, 50)
        vocabulary = [f"requirement text {k}" for k in range(max(2, n // 2))]
        texts = [rng.choice(vocabulary) for _ in range(n)]
        merge_pairs = {(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n // 3))}
        result = dedupe_requirements(
            requirements_model(texts), [(rq(a + 1), rq(b + 1)) for a, b in sorted(merge_pairs)]
        )
        ours = {
            frozenset(member.number - 1 for member in group) for group in result.groups.values()
        }
        assert ours == oracle_partition(texts, merge_pairs)

    multi = dedupe_requirements(
        requirements_model(
            ["alpha", "beta", "gamma"], stakeholders=[{"Reg"}, {"Vert", "Nats"}, {"Op"}]
        )
    )
    assert multi.distinct_count == 3
    assert multi.allocation_count == 4
    report("6 dedup-oracle", "100 random instances match the pairwise oracle; 3 distinct / 4 allocations")


# -- criterion 7: high-priority semantics -------------------------------------

def test_criterion_7_high_priority(corpus_model, sheets_by_uca):
    config = ScoringConfig(mcs=McsConfig(iterations=5000, seed=42))
    assessments = assess_all(corpus_model, sheets_by_uca, config)
    selected = high_priority(assessments)
    assert all(a.band in ("P1", "P2") for a in selected)
    assert {a for a in assessments if a.band in ("P1", "P2")} == set(selected)
    expected = {
        "UCA(Ph0.1)-28.2.1",
        "UCA(Ph1)-18.2.1",
        "UCA(Ph1)-20.7.1",
        "UCA(Ph0.1)-50.2.1",
    }
    assert {str(a.uca_id) for a in selected} == expected

    # the step-4 worksheet (checklist targets) covers exactly those four
    ucas = corpus_model.uca_by_id()
    worksheet = {
        str(a.uca_id): instantiate_checklist(ucas[a.uca_id], corpus_model)
        for a in selected
    }
    assert set(worksheet) == expected
    assert all(prompts for prompts in worksheet.values())
    report("7 high-priority", "P1+P2 filter selects exactly the 4 calibrated UCAs for step-4")


# -- criterion 8: report determinism ------------------------------------------

def test_criterion_8_report_determinism(corpus_model, sheets_by_uca):
    config = ScoringConfig(mcs=McsConfig(iterations=5000, seed=42))
    assessments = assess_all(corpus_model, sheets_by_uca, config)

    for phase in sorted(corpus_model.phase_ids()):
        first = emit_control_structure_graph(corpus_model, phase)
        assert first == emit_control_structure_graph(corpus_model, phase)
        validate_dot(first)

    matrix = emit_uca_matrix(assessments, corpus_model)
    assert matrix == emit_uca_matrix(assess_all(corpus_model, sheets_by_uca, config), corpus_model)

    register = emit_gap_register(corpus_model)
    assert register == emit_gap_register(corpus_model)
    counts, _ = emit_summary(corpus_model)
    footer = (
        f"Totals: {counts.gaps} gaps, {counts.gaps_affecting_helicopter_ops} "
        "affecting existing helicopter operations."
    )
    assert footer in register
    report("8 report-determinism", "graphs/matrix/register byte-stable; DOT grammar-validated")


# -- criterion 9: CIF/PMS spot values ------------------------------------------

def test_criterion_9_cif_pms_spot_values():
    chain = Model(
        losses=(Loss("L1", "l", 1),),
        phases=(Phase("Ph1", "t"),),
        components=(Component("A", "A", ORG), Component("B", "B", ORG), Component("C", "C", ORG)),
        control_actions=(
            ControlAction(1, "top", "A", "B", "Ph1"),
            ControlAction(2, "mid", "B", "C", "Ph1"),
        ),
    )
    # closure oracle cross-check of the spans feeding CIF
    edges = {("A", "B"), ("B", "C")}
    oracle = closure_oracle(edges, {"A", "B", "C"})
    assert {len(oracle[n]) for n in oracle} == {2, 1, 0}
    assert abs(component_cif("A", "Ph1", chain) - 5.0) < 1e-9
    assert abs(component_cif("B", "Ph1", chain) - 3.0) < 1e-9
    assert abs(component_cif("C", "Ph1", chain) - 1.0) < 1e-9

    five = losses_model(5)
    assert abs(compute_pms(confirmed_uca({"L1"}), five) - 5.0) < 1e-9
    assert abs(compute_pms(confirmed_uca({"L5"}), five) - 1.0) < 1e-9
    assert abs(compute_pms(confirmed_uca({"L3"}), five) - 3.0) < 1e-9
    assert abs(severity_of_rank(1, 5) - 5.0) < 1e-9
    report("9 cif-pms-spot-values", "chain CIF {5,3,1} and PMS {5,1,3} within 1e-9 of the mappings")
