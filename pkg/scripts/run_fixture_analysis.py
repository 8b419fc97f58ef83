#!/usr/bin/env python3
"""End-to-end walkthrough of the analysis pipeline on the shipped corpus.

Parses the eVTOL operations fixture, generates candidate UCAs for one phase,
prioritizes the confirmed UCAs from the calibrated expert sheets, dedupes
requirements and prints the summary, matrix and gap register to stdout.

Usage: python scripts/run_fixture_analysis.py [--seed N] [--iterations N]
"""

import argparse
from importlib import resources

from stpa_workbench.config import McsConfig, ScoringConfig
from stpa_workbench.dsl import parse_model
from stpa_workbench.priority import (
    assess_all,
    dedupe_requirements,
    group_sheets,
    high_priority,
    read_sheets_csv,
)
from stpa_workbench.reports import emit_gap_register, emit_summary, emit_uca_matrix
from stpa_workbench.scenarios import instantiate_checklist
from stpa_workbench.ucas import generate_candidates


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--iterations", type=int, default=10_000)
    args = parser.parse_args()

    fixtures = resources.files("stpa_workbench") / "fixtures"
    result = parse_model(
        (fixtures / "evtol_ops.stpa").read_text(encoding="utf-8"), "evtol_ops.stpa"
    )
    assert result.ok, [d.render() for d in result.diagnostics]
    model = result.model

    candidates = generate_candidates(model, phase_filter="Ph1")
    print(f"phase Ph1 expands to {len(candidates)} guide-word candidates\n")

    ej_sheets, _ = read_sheets_csv((fixtures / "ej_sheets.csv").read_text(encoding="utf-8"))
    config = ScoringConfig(mcs=McsConfig(iterations=args.iterations, seed=args.seed))
    assessments = assess_all(model, group_sheets(ej_sheets), config)

    print(emit_uca_matrix(assessments, model, fmt="md"))
    selected = high_priority(assessments)
    print(f"{len(selected)} high-priority UCAs proceed to loss-scenario analysis:")
    ucas = model.uca_by_id()
    for assessment in selected:
        prompts = instantiate_checklist(ucas[assessment.uca_id], model)
        print(f"  {assessment.uca_id}  ({assessment.band}, {len(prompts)} checklist prompts)")
    print()

    dedup = dedupe_requirements(model)
    print(
        f"{len(model.requirements)} requirements form {dedup.distinct_count} distinct groups "
        f"({dedup.allocation_count} stakeholder allocations)\n"
    )

    counts, rendered = emit_summary(model, assessments=assessments)
    print(rendered)
    print(emit_gap_register(model, assessments=assessments))


if __name__ == "__main__":
    main()
