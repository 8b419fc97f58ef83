from __future__ import annotations

import pytest

from stpa_workbench.core import (
    CausalFactor,
    Component,
    ComponentKind,
    ControlAction,
    GapRecord,
    GapVerdict,
    Loss,
    Model,
    Phase,
    RecommendationType,
    Requirement,
    ScenarioType,
    UcaStatus,
    UnsafeControlAction,
    build_traceability_graph,
)
from stpa_workbench.ids import ArtifactId, UcaId, parse_any_id
from stpa_workbench.priority import assess_all
from stpa_workbench.reports import (
    SummaryCounts,
    emit_control_structure_graph,
    emit_gap_register,
    emit_summary,
    emit_uca_matrix,
    render_summary,
)

from dot_validator import DotSyntaxError, validate_dot

ORG = ComponentKind.ORGANIZATION


class TestControlStructureGraph:
    def test_phase1_contains_labeled_clearance_edge(self, corpus_model):
        dot = emit_control_structure_graph(corpus_model, "Ph1")
        graph = validate_dot(dot)
        assert graph["directed"]
        assert ("NATS", "Commander", {"label": "18 OnwardClearance", "style": "solid"}) in graph[
            "edges"
        ]

    def test_feedback_edges_are_dashed(self, corpus_model):
        graph = validate_dot(emit_control_structure_graph(corpus_model, "Ph1"))
        feedback_edges = [e for e in graph["edges"] if e[2].get("style") == "dashed"]
        assert ("Commander", "NATS", {"label": "RadarReturns", "style": "dashed"}) in feedback_edges

    def test_nodes_styled_by_kind_and_boundary(self, corpus_model):
        graph = validate_dot(emit_control_structure_graph(corpus_model, "Ph1"))
        assert graph["nodes"]["Commander"]["shape"] == "ellipse"
        assert graph["nodes"]["NATS"]["shape"] == "box"
        assert graph["nodes"]["Aircraft"]["shape"] == "component"

    def test_empty_phase_is_header_only(self):
        model = Model(phases=(Phase("Ph1", "t"),))
        dot = emit_control_structure_graph(model, "Ph1")
        graph = validate_dot(dot)
        assert graph["nodes"] == {} and graph["edges"] == []

    def test_unknown_phase_raises(self, corpus_model):
        with pytest.raises(KeyError):
            emit_control_structure_graph(corpus_model, "Ph9")

    def test_byte_identical_across_runs(self, corpus_model):
        assert emit_control_structure_graph(corpus_model, "Ph0.1") == emit_control_structure_graph(
            corpus_model, "Ph0.1"
        )

    def test_every_phase_parses_under_dot_grammar(self, corpus_model):
        for phase in sorted(corpus_model.phase_ids()):
            validate_dot(emit_control_structure_graph(corpus_model, phase))

    def test_quoting_survives_special_characters(self):
        model = Model(
            phases=(Phase("Ph1", "t"),),
            components=(
                Component("A", 'He said "go"', ORG),
                Component("B", "Operator \\ unit", ORG, inside_boundary=False),
            ),
            control_actions=(ControlAction(1, 'cmd "now"', "A", "B", "Ph1"),),
        )
        graph = validate_dot(emit_control_structure_graph(model, "Ph1"))
        assert graph["nodes"]['A']["label"] == 'He said "go"'
        assert graph["nodes"]["B"]["style"] == "dashed"

    def test_oracle_rejects_malformed_dot(self):
        with pytest.raises(DotSyntaxError):
            validate_dot("digraph { a -> ; }")
        with pytest.raises(DotSyntaxError):
            validate_dot('digraph { "unterminated -> b; }')


class TestUcaMatrix:
    def test_row_count_and_high_priority_filter(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        csv_text = emit_uca_matrix(assessments, corpus_model)
        lines = csv_text.strip().split("\n")
        assert len(lines) == 1 + len(assessments)
        high_rows = [line for line in lines[1:] if ",P1," in line or ",P2," in line]
        assert len(high_rows) == 4

    def test_band_ordering(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        csv_text = emit_uca_matrix(assessments, corpus_model)
        bands = [line.split(",")[-2] for line in csv_text.strip().split("\n")[1:]]
        assert bands == sorted(bands)

    def test_values_descend_within_band(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        rows = emit_uca_matrix(assessments, corpus_model).strip().split("\n")[1:]
        by_band: dict[str, list[float]] = {}
        for row in rows:
            parts = row.split(",")
            by_band.setdefault(parts[-2], []).append(float(parts[-3]))
        for band, values in by_band.items():
            assert values == sorted(values, reverse=True), band

    def test_empty_input_is_header_only(self, corpus_model):
        assert emit_uca_matrix([], corpus_model).strip().split("\n") == [
            "id,controller,guide word,losses,pms,cif,ej,ej lo,ej hi,value,band,boundary"
        ]

    def test_markdown_variant(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        md = emit_uca_matrix(assessments, corpus_model, fmt="md")
        assert md.startswith("| id | controller |")
        assert md.count("\n") == 2 + len(assessments)

    def test_deterministic(self, corpus_model, sheets_by_uca, fast_config):
        a = emit_uca_matrix(assess_all(corpus_model, sheets_by_uca, fast_config), corpus_model)
        b = emit_uca_matrix(assess_all(corpus_model, sheets_by_uca, fast_config), corpus_model)
        assert a == b

    def test_ids_parse_back(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        for line in emit_uca_matrix(assessments, corpus_model).strip().split("\n")[1:]:
            parse_any_id(line.split(",")[0])


def notam_fixture() -> Model:
    """Small model carrying the published NOTAM gap row under its true id."""
    uca = UnsafeControlAction(
        id=UcaId("Ph0.1", 16, 1, 1),
        context="a NOTAM is required for the planned operation",
        linked_losses=frozenset({"L1"}),
        status=UcaStatus.CONFIRMED,
    )
    cf = CausalFactor(
        ArtifactId(uca.id, "CF", 1),
        "the NOTAM issuing process degraded over time",
        "organizational-degradation",
        ScenarioType.TYPE_A,
    )
    reqs = tuple(
        Requirement(
            ArtifactId(uca.id, "RQ", n),
            text,
            frozenset({cf.id}),
            frozenset(stakeholders),
        )
        for n, (text, stakeholders) in enumerate(
            [
                ("NOTAM requests shall be tracked to completion.", {"Regulator"}),
                ("NOTAM content shall be reviewed by a second controller.", {"Regulator"}),
                (
                    "Performance review of the relevant team issuing NOTAM within Regulator "
                    "shall be conducted periodically to ensure that the team operates "
                    "properly and safely.",
                    {"Regulator", "NATS"},
                ),
            ],
            start=1,
        )
    )
    return Model(
        losses=(Loss("L1", "loss of life", 1),),
        phases=(Phase("Ph0.1", "regulatory preparation"),),
        components=(
            Component("Regulator", "Regulator (UK CAA)", ORG),
            Component("NATS", "NATS (LHR RADAR)", ORG),
            Component("Operator", "eVTOL Operator", ORG),
        ),
        control_actions=(ControlAction(16, "NOTAM", "Regulator", "Operator", "Ph0.1"),),
        ucas=(uca,),
        causal_factors=(cf,),
        requirements=reqs,
        gap_records=(
            GapRecord(
                requirement_id=reqs[2].id,
                verdict=GapVerdict.GAP,
                recommendation_type=RecommendationType.PROCEDURES,
            ),
        ),
    )


class TestGapRegister:
    def test_regulator_section_contains_notam_review(self):
        register = emit_gap_register(notam_fixture())
        regulator_section = register.split("## Regulator (UK CAA)")[1]
        assert "UCA(Ph0.1)-16.1.1-RQ3" in regulator_section
        assert "Performance review of the relevant team issuing NOTAM" in regulator_section

    def test_zero_gaps_omits_sections(self):
        model = notam_fixture().with_(gap_records=())
        register = emit_gap_register(model)
        assert "##" not in register
        assert "Totals: 0 gaps, 0 affecting existing helicopter operations." in register

    def test_two_stakeholder_entry_in_both_sections_counted_once(self):
        register = emit_gap_register(notam_fixture())
        assert register.count("UCA(Ph0.1)-16.1.1-RQ3") == 2  # Regulator and NATS sections
        assert "Totals: 1 gaps" in register

    def test_footer_matches_summary(self, corpus_model):
        register = emit_gap_register(corpus_model)
        counts, _ = emit_summary(corpus_model)
        assert (
            f"Totals: {counts.gaps} gaps, {counts.gaps_affecting_helicopter_ops} "
            "affecting existing helicopter operations." in register
        )

    def test_deterministic(self, corpus_model):
        assert emit_gap_register(corpus_model) == emit_gap_register(corpus_model)

    def test_covered_records_not_listed(self):
        model = notam_fixture()
        model = model.with_(
            gap_records=model.gap_records
            + (
                GapRecord(
                    requirement_id=model.requirements[0].id,
                    verdict=GapVerdict.COVERED,
                    covered_by=("CAP 168 chapter 5",),
                ),
            )
        )
        register = emit_gap_register(model)
        assert "RQ1" not in register


def recount_from_model(model: Model) -> tuple[int, int, int, int, int]:
    """Independent recount straight off the entity lists (not the graph)."""
    gaps = [r for r in model.effective_gap_records().values() if r.verdict is GapVerdict.GAP]
    return (
        len(model.losses),
        len({u.id for u in model.ucas if u.status is not UcaStatus.REJECTED}),
        len(model.causal_factors),
        len(model.requirements),
        len(gaps),
    )


class TestSummary:
    def test_counts_match_independent_recount(self, corpus_model):
        counts, rendered = emit_summary(corpus_model)
        losses, ucas, cfs, reqs, gaps = recount_from_model(corpus_model)
        assert counts.total_losses == losses
        assert counts.total_ucas == ucas
        assert counts.causal_factors == cfs
        assert counts.requirements == reqs
        assert counts.gaps == gaps
        assert str(counts.gaps) in rendered

    def test_empty_analysis_is_all_zero(self):
        counts, _ = emit_summary(Model())
        assert counts.total_ucas == 0 and counts.gaps == 0 and counts.requirements == 0
        assert counts.allocations_per_stakeholder == {}

    def test_high_priority_restriction(self, corpus_model, sheets_by_uca, fast_config):
        assessments = assess_all(corpus_model, sheets_by_uca, fast_config)
        with_scores, _ = emit_summary(corpus_model, assessments=assessments)
        without_scores, _ = emit_summary(corpus_model)
        assert with_scores.high_priority_ucas == 4
        assert without_scores.high_priority_ucas == 0
        assert (
            with_scores.distinct_high_priority_requirements
            <= without_scores.distinct_high_priority_requirements
        )
        assert with_scores.gaps <= with_scores.distinct_high_priority_requirements

    def test_case_study_headline_totals_render(self):
        # counts injected as metadata for documentation rendering
        counts = SummaryCounts(
            total_losses=5,
            total_ucas=317,
            high_priority_ucas=110,
            causal_factors=377,
            requirements=432,
            distinct_high_priority_requirements=124,
            allocations_per_stakeholder={
                "Regulator": 58,
                "Vertiport": 40,
                "Operator": 16,
                "NATS": 17,
            },
            gaps=56,
            gaps_affecting_helicopter_ops=27,
        )
        rendered = render_summary(counts)
        for expected in ("317", "110", "377", "432", "124", "56", "27"):
            assert expected in rendered
        assert "Regulator - 58" in rendered

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SummaryCounts(
                total_losses=5,
                total_ucas=10,
                high_priority_ucas=11,
                causal_factors=0,
                requirements=0,
                distinct_high_priority_requirements=0,
                allocations_per_stakeholder={},
                gaps=0,
                gaps_affecting_helicopter_ops=0,
            )
        with pytest.raises(ValueError):
            SummaryCounts(
                total_losses=5,
                total_ucas=10,
                high_priority_ucas=4,
                causal_factors=5,
                requirements=16,
                distinct_high_priority_requirements=10,
                allocations_per_stakeholder={},
                gaps=12,
                gaps_affecting_helicopter_ops=5,
            )

    def test_counts_derive_from_graph_not_stale_lists(self, corpus_model):
        graph = build_traceability_graph(corpus_model)
        counts, _ = emit_summary(corpus_model, graph=graph)
        assert counts.total_ucas == len(graph.nodes_of_kind("uca"))
