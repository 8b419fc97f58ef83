from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from stpa_workbench.config import McsConfig, ScoringConfig
from stpa_workbench.dsl import parse_model
from stpa_workbench.priority import group_sheets, read_sheets_csv

FIXTURES = Path(str(resources.files("stpa_workbench") / "fixtures"))


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return FIXTURES / "evtol_ops.stpa"


@pytest.fixture(scope="session")
def corpus_text(corpus_path) -> str:
    return corpus_path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_model(corpus_text):
    result = parse_model(corpus_text, "evtol_ops.stpa")
    assert result.ok, [d.render() for d in result.diagnostics]
    return result.model


@pytest.fixture(scope="session")
def sheets_path() -> Path:
    return FIXTURES / "ej_sheets.csv"


@pytest.fixture(scope="session")
def corpus_sheets(sheets_path):
    ej_sheets, _ = read_sheets_csv(sheets_path.read_text(encoding="utf-8"))
    return ej_sheets


@pytest.fixture(scope="session")
def sheets_by_uca(corpus_sheets):
    return group_sheets(corpus_sheets)


@pytest.fixture(scope="session")
def fast_config() -> ScoringConfig:
    # Small iteration count keeps per-test MCS cheap; determinism tests set
    # their own configs explicitly.
    return ScoringConfig(mcs=McsConfig(iterations=2000, seed=42))
