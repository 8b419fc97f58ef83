#!/usr/bin/env python3
"""Regenerate the shipped eVTOL operations fixture corpus.

Builds the model programmatically, prints it in canonical form and writes
``src/stpa_workbench/fixtures/evtol_ops.stpa`` plus the calibrated expert
score sheets (``ej_sheets.csv``) and the default scoring config.

The corpus encodes the published extracts of the eVTOL case study: the five
ranked losses, ten unsafe control actions with their loss links, five causal
factor / requirement pairs and twelve gap verdicts.  Step-4 rows whose
original parent UCA is not among the ten are homed on the closest present
UCA with densely renumbered ids (texts, stakeholders, recommendation types
and loss links are kept verbatim).
"""

from pathlib import Path

from stpa_workbench.config import ScoringConfig, McsConfig, render_config
from stpa_workbench.core import (
    CausalFactor,
    Component,
    ComponentKind,
    ControlAction,
    EjScoreSheet,
    FeedbackSignal,
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
    validate_model,
)
from stpa_workbench.dsl import print_model
from stpa_workbench.ids import ArtifactId, parse_uca_id
from stpa_workbench.priority import write_sheets_csv

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "stpa_workbench" / "fixtures"


def uca(text: str) -> "UcaId":
    return parse_uca_id(text)


def cf_id(uca_text: str, n: int) -> ArtifactId:
    return ArtifactId(uca=uca(uca_text), kind="CF", number=n)


def rq_id(uca_text: str, n: int) -> ArtifactId:
    return ArtifactId(uca=uca(uca_text), kind="RQ", number=n)


LOSSES = (
    Loss("L1", "Loss of life or injury to 1st, 2nd or 3rd parties", 1),
    Loss("L2", "Loss of or damage to the eVTOL or surrounding item/property/infrastructure", 2),
    Loss("L3", "Loss of transportation mission", 3),
    Loss("L4", "Loss of customer satisfaction or public confidence in eVTOL", 4),
    Loss("L5", "Loss of business goal of eVTOL Operator", 5),
)

PHASES = (
    Phase("Ph0.1", "Regulatory Preparation"),
    Phase("Ph0.2", "Operational Preparation"),
    Phase("Ph1", "Take-Off"),
    Phase("Ph2", "Cruise"),
    Phase("Ph3", "Descent and Landing"),
)

ORG = ComponentKind.ORGANIZATION
COMPONENTS = (
    Component("Regulator", "Regulator (UK CAA)", ORG),
    Component("NATS", "NATS (LHR RADAR)", ORG),
    Component("Operator", "eVTOL Operator", ORG),
    Component("Heliport", "Licensed Vertiport (London Heliport)", ORG),
    Component("Aerodrome", "Licensed Aerodrome (Silverstone Aerodrome)", ORG),
    Component("LocalAuthority", "Local Authority", ORG),
    Component("Manufacturer", "eVTOL Manufacturer", ORG),
    Component("GroundServices", "Ground Services", ORG),
    Component("Commander", "Commander", ComponentKind.HUMAN),
    Component("Passengers", "Passengers", ComponentKind.HUMAN),
    Component("Aircraft", "eVTOL Aircraft", ComponentKind.MACHINE),
    Component("UKPowerNet", "UK Power Network Operator", ORG, inside_boundary=False),
    Component("UKDataNet", "UK Data Network Operator", ORG, inside_boundary=False),
)

CAS = (
    ControlAction(24, "Categorisation", "Regulator", "Operator", "Ph0.1"),
    ControlAction(28, "Vertiport / Aerodrome Licence", "Regulator", "Heliport", "Ph0.1"),
    ControlAction(32, "SlotApproval", "Aerodrome", "Operator", "Ph0.1"),
    ControlAction(50, "Aircraft Release To Service", "Operator", "Aircraft", "Ph0.1"),
    ControlAction(33, "Number of Movements & Operational Hours", "LocalAuthority", "Aerodrome", "Ph0.2"),
    ControlAction(15, "SafetyInstructions", "Commander", "Passengers", "Ph1"),
    ControlAction(17, "Safety Briefing", "Operator", "Passengers", "Ph1"),
    ControlAction(18, "OnwardClearance", "NATS", "Commander", "Ph1"),
    ControlAction(20, "HoldingCommand", "NATS", "Commander", "Ph1"),
    ControlAction(25, "Aircraft Control", "Commander", "Aircraft", "Ph1"),
    ControlAction(6, "Hold outside RA(T)", "Aerodrome", "Commander", "Ph2"),
    ControlAction(7, "RF/TransponderSetting", "Aerodrome", "Commander", "Ph2"),
    ControlAction(12, "GroundOpsDirective", "Aerodrome", "GroundServices", "Ph3"),
    ControlAction(13, "MarshallingInstruction", "GroundServices", "Commander", "Ph3"),
    ControlAction(14, "LandingManoeuvre", "Commander", "Aircraft", "Ph3"),
)

FEEDBACKS = (
    FeedbackSignal("LicenceApplication", "Heliport", "Regulator", "Ph0.1"),
    FeedbackSignal("SlotRequest", "Operator", "Aerodrome", "Ph0.1"),
    FeedbackSignal("MovementReports", "Aerodrome", "LocalAuthority", "Ph0.2"),
    FeedbackSignal("RadarReturns", "Commander", "NATS", "Ph1"),
    FeedbackSignal("FlightStatus", "Aircraft", "Commander", "Ph1"),
    FeedbackSignal("CapacityStatus", "Commander", "Aerodrome", "Ph2"),
    FeedbackSignal("LandingConditions", "Commander", "GroundServices", "Ph3"),
)


def confirmed(uca_text, context, losses):
    return UnsafeControlAction(
        id=uca(uca_text),
        context=context,
        linked_losses=frozenset(losses),
        status=UcaStatus.CONFIRMED,
    )


UCAS = (
    confirmed(
        "UCA(Ph0.1)-28.2.1",
        "the vertiport is actively being used for flight operations and the reissued "
        "licence carries insufficient risk assessments",
        {"L1", "L2"},
    ),
    confirmed(
        "UCA(Ph0.1)-24.5.1",
        "the flight is being planned; late categorisation delays the planning progress",
        {"L3", "L4", "L5"},
    ),
    confirmed(
        "UCA(Ph1)-18.2.1",
        "there is a conflict (proximity to other aircraft, such as eVTOLs, helicopters "
        "and fixed wing) and the clearance carries incorrect height or routing",
        {"L1", "L2", "L3", "L4", "L5"},
    ),
    confirmed(
        "UCA(Ph1)-20.7.1",
        "the eVTOL aircraft is in hold and conflict prevails",
        {"L1", "L2", "L3"},
    ),
    confirmed(
        "UCA(Ph0.1)-50.2.1",
        "adequate checks on the aircraft have not been carried out, this has not been "
        "detected, and the eVTOL aircraft flies",
        {"L1", "L2"},
    ),
    confirmed(
        "UCA(Ph1)-17.1.1",
        "the eVTOL experiences turbulence while flying with seat belts unfastened, "
        "cargo unstowed and portable electronic devices in use",
        {"L1", "L2"},
    ),
    confirmed(
        "UCA(Ph0.1)-32.5.1",
        "the slot request has been submitted and the flight is scheduled",
        {"L3", "L4", "L5"},
    ),
    confirmed(
        "UCA(Ph3)-13.2.1",
        "the eVTOL is in the landing phase at a vertiport with low visibility conditions",
        {"L1", "L2", "L3"},
    ),
    confirmed(
        "UCA(Ph1)-25.5.1",
        "the eVTOL aircraft is about to collide with an object (infrastructure or "
        "other aircraft/drones)",
        {"L1", "L2"},
    ),
    confirmed(
        "UCA(Ph1)-15.1.1",
        "the eVTOL aircraft flies and an emergency occurs requiring the passengers to "
        "disembark swiftly",
        {"L1"},
    ),
)

CFS = (
    CausalFactor(
        cf_id("UCA(Ph0.1)-28.2.1", 1),
        "The supplementary documents (compliance with regulatory standards, safety "
        "management systems, training and competency of personnel, operational "
        "readiness, data integrity and cybersecurity, environmental compliance) were "
        "incomplete although the licensed vertiport met the licence criteria",
        "process-model-flaw",
        ScenarioType.TYPE_A,
    ),
    CausalFactor(
        cf_id("UCA(Ph0.1)-50.2.1", 1),
        "The issuing team is unable to correctly provide Aircraft Release To Service "
        "due to degradation of the internal process over time (overloaded tasks, "
        "flawed process)",
        "organizational-degradation",
        ScenarioType.TYPE_A,
    ),
    CausalFactor(
        cf_id("UCA(Ph1)-18.2.1", 1),
        "An aircraft has deviated from its flight plan and both NATS and the eVTOL "
        "crew are unaware",
        "process-model-flaw",
        ScenarioType.TYPE_A,
    ),
    CausalFactor(
        cf_id("UCA(Ph1)-20.7.1", 1),
        "Feedback about the current state of airspace congestion is delayed",
        "delayed-feedback",
        ScenarioType.TYPE_A,
    ),
    CausalFactor(
        cf_id("UCA(Ph0.1)-32.5.1", 1),
        "The controller misinterprets the airspace data due to its unclear format",
        "misinterpretation",
        ScenarioType.TYPE_A,
    ),
)


def req(uca_text, n, text, stakeholders, cf_parent=None):
    parent = cf_parent or uca_text
    return Requirement(
        id=rq_id(uca_text, n),
        text=text,
        addresses=frozenset({cf_id(parent, 1)}),
        stakeholders=frozenset(stakeholders),
    )


REQUIREMENTS = (
    req(
        "UCA(Ph0.1)-28.2.1", 1,
        "Licensed Vertiport shall ensure that the provided supplementary documents for "
        "vertiport / aerodrome licence application are complete and up to date.",
        {"Heliport"},
    ),
    req(
        "UCA(Ph0.1)-28.2.1", 2,
        "The regulator shall train their staff adequately to ensure that the "
        "supplementary documents regarding categorisation of eVTOL are reviewed properly.",
        {"Regulator"},
    ),
    req(
        "UCA(Ph0.1)-28.2.1", 3,
        "The assessment criteria for Categorisation (CAT/NCC/NCO/SPO) shall be clearly "
        "presented to the applicant and shall be consistent both internally within the "
        "Regulator and externally with the applicant.",
        {"Regulator"},
    ),
    req(
        "UCA(Ph1)-18.2.1", 1,
        "There must be a mechanism for NATS to monitor and issue alerts when the "
        "performance (position, altitude, airspeed) of aircraft in flow is not within "
        "the expected values.",
        {"NATS"},
    ),
    req(
        "UCA(Ph1)-18.2.1", 2,
        "The Meteorological conditions must be provided over a periodicity so that "
        "information is of a sufficient accuracy and available to NATS.",
        {"NATS"},
    ),
    req(
        "UCA(Ph1)-18.2.1", 3,
        "NATS shall ensure that modified flight plans, or new clearances, are updated "
        "within a defined time and managed centrally for all aircraft operating in a "
        "particular sector.",
        {"NATS"},
    ),
    req(
        "UCA(Ph0.1)-50.2.1", 1,
        "Performance review of the relevant team issuing Aircraft Release To Service "
        "within the eVTOL Operator shall be conducted periodically to ensure that the "
        "team operates properly and safely.",
        {"Operator"},
    ),
    req(
        "UCA(Ph0.1)-50.2.1", 2,
        "Process review of the relevant team issuing Aircraft Release to Service within "
        "the eVTOL Operator shall be conducted periodically to ensure that the team "
        "operates properly and safely.",
        {"Operator"},
    ),
    req(
        "UCA(Ph0.1)-50.2.1", 3,
        "Performance review of the relevant team issuing NOTAM within Regulator shall "
        "be conducted periodically to ensure that the team operates properly and safely.",
        {"Regulator"},
    ),
    req(
        "UCA(Ph0.1)-50.2.1", 4,
        "The tasks related to processing the Temporary Airspace Structure within the "
        "Regulator should undergo routine review and be re-prioritised as necessary to "
        "guarantee that safety-critical tasks are prioritised above all others.",
        {"Regulator"},
    ),
    req(
        "UCA(Ph1)-20.7.1", 1,
        "Licensed Aerodrome shall conduct automated self-checks of feedback systems at "
        "a defined periodicity.",
        {"Aerodrome"},
    ),
    req(
        "UCA(Ph1)-20.7.1", 2,
        "Ground services must use advanced real-time sensors to ensure provision of "
        "continuous feedback on landing conditions.",
        {"Aerodrome"},
    ),
    req(
        "UCA(Ph1)-20.7.1", 3,
        "Feedback to Hold outside Restricted Area (Temporary) regarding capacity status "
        "shall utilise multiple channels to ensure redundancy in communication pathways.",
        {"Aerodrome"},
    ),
    req(
        "UCA(Ph1)-20.7.1", 4,
        "Licensed Aerodrome shall utilise simulations to test the algorithm's "
        "efficiency to avoid unnecessary Holds.",
        {"Aerodrome"},
    ),
    req(
        "UCA(Ph0.1)-32.5.1", 1,
        "Feedback systems must standardise data presentation using visual indicators.",
        {"Aerodrome"},
    ),
    req(
        "UCA(Ph0.1)-32.5.1", 2,
        "Local Authority shall ensure that the proposed Number of Movements & "
        "Operational Hours are properly communicated with Temporary Aerodrome "
        "Management.",
        {"LocalAuthority"},
    ),
)


def gap(uca_text, n, rec, helicopter=False):
    return GapRecord(
        requirement_id=rq_id(uca_text, n),
        verdict=GapVerdict.GAP,
        recommendation_type=RecommendationType(rec),
        applies_to_existing_helicopter_ops=helicopter,
    )


GAPS = (
    gap("UCA(Ph0.1)-28.2.1", 2, "Procedures"),
    gap("UCA(Ph0.1)-28.2.1", 3, "Procedures"),
    gap("UCA(Ph1)-18.2.1", 1, "Procedures", helicopter=True),
    gap("UCA(Ph1)-18.2.1", 2, "Procedures", helicopter=True),
    gap("UCA(Ph1)-18.2.1", 3, "Procedures"),
    gap("UCA(Ph0.1)-50.2.1", 2, "Regulations"),
    gap("UCA(Ph0.1)-50.2.1", 3, "Procedures", helicopter=True),
    gap("UCA(Ph0.1)-50.2.1", 4, "Procedures"),
    gap("UCA(Ph1)-20.7.1", 2, "Regulations", helicopter=True),
    gap("UCA(Ph1)-20.7.1", 3, "Regulations", helicopter=True),
    gap("UCA(Ph1)-20.7.1", 4, "Procedures"),
    gap("UCA(Ph0.1)-32.5.1", 2, "Policy"),
)

# Expert-judgment sheets calibrated so exactly four UCAs land in P1/P2:
# 28.2.1 and 18.2.1 in P1, 20.7.1 and 50.2.1 in P2.
EJ_SHEETS_RAW = {
    "UCA(Ph0.1)-28.2.1": {"E1": (5, 3, 4, 2, 3), "E2": (3, 3, 4, 4, 3)},
    "UCA(Ph0.1)-24.5.1": {"E1": (2, 2, 1, 1, 2), "E2": (2, 1, 1, 2, 1)},
    "UCA(Ph1)-18.2.1": {"E1": (4, 5, 4, 3, 4), "E2": (4, 3, 4, 5, 4)},
    "UCA(Ph1)-20.7.1": {"E1": (3, 3, 2, 2, 3), "E2": (3, 2, 2, 3, 2)},
    "UCA(Ph0.1)-50.2.1": {"E1": (4, 4, 3, 4, 3), "E2": (4, 3, 3, 4, 3)},
    "UCA(Ph1)-17.1.1": {"E1": (1, 1, 1, 1, 1), "E2": (1, 1, 1, 1, 1)},
    "UCA(Ph0.1)-32.5.1": {"E1": (1, 1, 1, 1, 1), "E2": (1, 1, 1, 1, 1)},
    "UCA(Ph3)-13.2.1": {"E1": (2, 2, 1, 1, 2), "E2": (2, 1, 1, 2, 1)},
    "UCA(Ph1)-25.5.1": {"E1": (2, 2, 1, 2, 1), "E2": (1, 1, 2, 1, 2)},
    "UCA(Ph1)-15.1.1": {"E1": (2, 1, 2, 1, 2), "E2": (1, 2, 1, 2, 1)},
}

FACTOR_NAMES = (
    "operationalDisruption",
    "criticality",
    "detectability",
    "effectOnOtherStakeholders",
    "likelihoodOfOccurrence",
)


def build_model() -> Model:
    return Model(
        losses=LOSSES,
        phases=PHASES,
        components=COMPONENTS,
        control_actions=CAS,
        feedbacks=FEEDBACKS,
        ucas=UCAS,
        causal_factors=CFS,
        requirements=REQUIREMENTS,
        gap_records=GAPS,
    )


def build_sheets():
    sheets = []
    for uca_text, experts in EJ_SHEETS_RAW.items():
        for expert, values in experts.items():
            sheets.append(
                EjScoreSheet(
                    uca_id=uca(uca_text),
                    expert_id=expert,
                    factors=dict(zip(FACTOR_NAMES, values)),
                )
            )
    return sheets


def main():
    model = build_model()
    diagnostics = validate_model(model)
    for d in diagnostics:
        print(d.render())
    if diagnostics:
        raise SystemExit("fixture model must validate cleanly")

    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "evtol_ops.stpa").write_text(print_model(model), encoding="utf-8")
    (FIXTURES / "ej_sheets.csv").write_text(write_sheets_csv(build_sheets()), encoding="utf-8")
    (FIXTURES / "scoring.cfg").write_text(
        render_config(ScoringConfig(mcs=McsConfig(iterations=10000, seed=42))), encoding="utf-8"
    )
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
