#!/usr/bin/env python3
"""Record review-API payloads as fixtures for the frontend contract tests.

Drives the real FastAPI app over the shipped corpus and writes the JSON
bodies the browser client replays in its vitest suite.  Rerun after any API
change: python scripts/record_ui_fixtures.py
"""

import json
from importlib import resources
from pathlib import Path

from fastapi.testclient import TestClient

from stpa_workbench.api import create_app
from stpa_workbench.config import McsConfig, ScoringConfig
from stpa_workbench.core import EJ_FACTORS
from stpa_workbench.dsl import parse_model
from stpa_workbench.priority import read_sheets_csv

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"
UCA18 = "UCA(Ph1)-18.2.1"


def factors(*values):
    return dict(zip(EJ_FACTORS, values))


def main():
    fixtures = resources.files("stpa_workbench") / "fixtures"
    model = parse_model((fixtures / "evtol_ops.stpa").read_text(encoding="utf-8")).model
    sheets, _ = read_sheets_csv((fixtures / "ej_sheets.csv").read_text(encoding="utf-8"))
    config = ScoringConfig(mcs=McsConfig(iterations=5000, seed=42))
    app = create_app(model, config=config)
    recorded: dict[str, object] = {}

    with TestClient(app) as client:
        recorded["ucas_pending_initial"] = client.get(
            "/v1/ucas", params={"pending": "true"}
        ).json()

        response = client.post(
            f"/v1/ucas/{UCA18}/sheet",
            json={"factors": factors(3, 3, 3, 3, 7)},
            headers={"X-Expert-Id": "E1"},
        )
        assert response.status_code == 422
        recorded["validation_error"] = response.json()

        client.post(
            f"/v1/ucas/{UCA18}/sheet",
            json={"factors": factors(3, 3, 3, 3, 3)},
            headers={"X-Expert-Id": "E1"},
        )
        recorded["assessment_one_expert"] = client.get(f"/v1/ucas/{UCA18}/assessment").json()

        client.post(
            f"/v1/ucas/{UCA18}/sheet",
            json={"factors": factors(5, 1, 5, 1, 5)},
            headers={"X-Expert-Id": "E2"},
        )
        recorded["assessment_two_experts"] = client.get(f"/v1/ucas/{UCA18}/assessment").json()

        # score the full corpus so the matrix is complete
        for sheet in sheets:
            client.post(
                f"/v1/ucas/{sheet.uca_id}/sheet",
                json={"factors": {f: sheet.factors[f] for f in EJ_FACTORS}},
                headers={"X-Expert-Id": sheet.expert_id},
            )
        recorded["matrix_canonical"] = client.get(
            "/v1/matrix", headers={"X-Session-Id": "S1"}
        ).json()

        override = {"bands": {"p1": 4.6, "p2": 4.0, "p3": 3.0, "p4": 2.0}}
        recorded["override_request"] = override
        recorded["override_ack"] = client.post(
            "/v1/session/overrides", json=override, headers={"X-Session-Id": "S1"}
        ).json()
        recorded["matrix_override"] = client.get(
            "/v1/matrix", headers={"X-Session-Id": "S1"}
        ).json()
        recorded["matrix_other_session"] = client.get(
            "/v1/matrix", headers={"X-Session-Id": "S2"}
        ).json()

        client.delete("/v1/session/overrides", headers={"X-Session-Id": "S1"})
        recorded["matrix_reset"] = client.get(
            "/v1/matrix", headers={"X-Session-Id": "S1"}
        ).json()

        recorded["gaps"] = client.get("/v1/gaps").json()
        recorded["summary"] = client.get("/v1/summary").json()

    OUT.mkdir(parents=True, exist_ok=True)
    for name, payload in recorded.items():
        (OUT / f"{name}.json").write_text(
            json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8"
        )
    print(f"wrote {len(recorded)} fixtures to {OUT}")

    # sanity: the override must differ from canonical, and reset must restore it
    assert recorded["matrix_override"] != recorded["matrix_canonical"]
    assert recorded["matrix_reset"] == recorded["matrix_canonical"]
    assert recorded["matrix_other_session"] == recorded["matrix_canonical"]


if __name__ == "__main__":
    main()
