"""Workbench for STPA safety analyses of multi-stakeholder operations.

Layers: :mod:`~stpa_workbench.core` (domain model, validation, traceability),
:mod:`~stpa_workbench.dsl` (the ``.stpa`` language), :mod:`~stpa_workbench.ucas`
(guide-word generation), :mod:`~stpa_workbench.priority` (PMS/CIF/EJ scoring
with Monte Carlo aggregation), :mod:`~stpa_workbench.scenarios` (causal
factors, requirements, gaps), :mod:`~stpa_workbench.reports` (emitters) and
the :mod:`~stpa_workbench.cli` / :mod:`~stpa_workbench.api` front ends.
"""

from .core import Model, validate_model, build_traceability_graph, downstream_span
from .dsl import parse_model, print_model
from .ids import UcaId, ArtifactId, parse_uca_id, format_uca_id

__version__ = "0.1.0"

__all__ = [
    "Model",
    "validate_model",
    "build_traceability_graph",
    "downstream_span",
    "parse_model",
    "print_model",
    "UcaId",
    "ArtifactId",
    "parse_uca_id",
    "format_uca_id",
    "__version__",
]
