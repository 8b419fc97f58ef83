"""Scoring configuration: factor weights, band thresholds and MCS settings.

The on-disk format is a plain ``key = value`` text file with ``#`` comments:

    ej.weight.operationalDisruption = 0.2
    req.weight.time = 0.25
    band.p1 = 4.2
    band.p2 = 3.4
    band.p3 = 2.6
    band.p4 = 1.8
    mcs.iterations = 10000
    mcs.seed = 42
    mcs.scheme = empirical

Unset keys keep their defaults (equal weights, quintile thresholds).  The
``STPA_WORKBENCH_CONFIG`` environment variable names the default config file
for the command-line tools.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .core import EJ_FACTORS, REQ_FACTORS

CONFIG_ENV_VAR = "STPA_WORKBENCH_CONFIG"

SAMPLING_SCHEMES = ("empirical", "triangular")


@dataclass(frozen=True)
class McsConfig:
    iterations: int = 10000
    seed: int = 0
    sampling_scheme: str = "empirical"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.sampling_scheme not in SAMPLING_SCHEMES:
            raise ValueError(f"sampling scheme must be one of {SAMPLING_SCHEMES}")


@dataclass(frozen=True)
class BandThresholds:
    """Right-open band edges over the combined criticality scale [1, 5].

    A combined value C maps to P1 when C >= p1, P2 when C >= p2, and so on;
    below p4 is P5.  Boundary values round toward higher criticality.
    """

    p1: float = 4.2
    p2: float = 3.4
    p3: float = 2.6
    p4: float = 1.8

    def __post_init__(self):
        if not (self.p1 > self.p2 > self.p3 > self.p4):
            raise ValueError("band thresholds must be strictly decreasing")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)


def _equal_weights(names: tuple[str, ...]) -> dict[str, float]:
    return {name: 1.0 / len(names) for name in names}


@dataclass(frozen=True)
class ScoringConfig:
    ej_weights: dict = field(default_factory=lambda: _equal_weights(EJ_FACTORS))
    req_weights: dict = field(default_factory=lambda: _equal_weights(REQ_FACTORS))
    bands: BandThresholds = field(default_factory=BandThresholds)
    mcs: McsConfig = field(default_factory=McsConfig)

    def __post_init__(self):
        _check_weights(self.ej_weights, EJ_FACTORS, "ej")
        _check_weights(self.req_weights, REQ_FACTORS, "req")

    def with_overrides(
        self,
        ej_weights: dict | None = None,
        bands: BandThresholds | None = None,
        mcs: McsConfig | None = None,
    ) -> "ScoringConfig":
        changes = {}
        if ej_weights is not None:
            changes["ej_weights"] = ej_weights
        if bands is not None:
            changes["bands"] = bands
        if mcs is not None:
            changes["mcs"] = mcs
        return replace(self, **changes) if changes else self


def _check_weights(weights: dict, names: tuple[str, ...], prefix: str) -> None:
    missing = [n for n in names if n not in weights]
    if missing:
        raise ValueError(f"{prefix} weights missing factors: {', '.join(missing)}")
    unknown = [n for n in weights if n not in names]
    if unknown:
        raise ValueError(f"{prefix} weights name unknown factors: {', '.join(unknown)}")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{prefix} weights must sum to 1, got {total}")
    if any(w < 0 for w in weights.values()):
        raise ValueError(f"{prefix} weights must be non-negative")


class ConfigError(ValueError):
    pass


def parse_config(text: str, file: str = "<string>") -> ScoringConfig:
    """Parse the key-value format; unknown keys and bad values raise ConfigError."""
    ej_weights = _equal_weights(EJ_FACTORS)
    req_weights = _equal_weights(REQ_FACTORS)
    bands = {"p1": 4.2, "p2": 3.4, "p3": 2.6, "p4": 1.8}
    mcs = {"iterations": 10000, "seed": 0, "scheme": "empirical"}

    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{file}:{line_no}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            _apply_key(key, value, ej_weights, req_weights, bands, mcs)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{file}:{line_no}: bad value for {key}: {exc}") from exc

    try:
        return ScoringConfig(
            ej_weights=ej_weights,
            req_weights=req_weights,
            bands=BandThresholds(**bands),
            mcs=McsConfig(iterations=mcs["iterations"], seed=mcs["seed"], sampling_scheme=mcs["scheme"]),
        )
    except ValueError as exc:
        raise ConfigError(f"{file}: {exc}") from exc


def _apply_key(key: str, value: str, ej_weights, req_weights, bands, mcs) -> None:
    if key.startswith("ej.weight."):
        name = key[len("ej.weight.") :]
        if name not in EJ_FACTORS:
            raise ConfigError(f"unknown EJ factor {name!r}")
        ej_weights[name] = float(value)
    elif key.startswith("req.weight."):
        name = key[len("req.weight.") :]
        if name not in REQ_FACTORS:
            raise ConfigError(f"unknown requirement factor {name!r}")
        req_weights[name] = float(value)
    elif key.startswith("band."):
        name = key[len("band.") :]
        if name not in bands:
            raise ConfigError(f"unknown band threshold {name!r}")
        bands[name] = float(value)
    elif key == "mcs.iterations":
        mcs["iterations"] = int(value)
    elif key == "mcs.seed":
        mcs["seed"] = int(value)
    elif key == "mcs.scheme":
        if value not in SAMPLING_SCHEMES:
            raise ConfigError(f"mcs.scheme must be one of {SAMPLING_SCHEMES}, got {value!r}")
        mcs["scheme"] = value
    else:
        raise ConfigError(f"unknown config key {key!r}")


def render_config(config: ScoringConfig) -> str:
    lines = []
    for name in EJ_FACTORS:
        lines.append(f"ej.weight.{name} = {config.ej_weights[name]}")
    for name in REQ_FACTORS:
        lines.append(f"req.weight.{name} = {config.req_weights[name]}")
    for name, value in zip(("p1", "p2", "p3", "p4"), config.bands.as_tuple()):
        lines.append(f"band.{name} = {value}")
    lines.append(f"mcs.iterations = {config.mcs.iterations}")
    lines.append(f"mcs.seed = {config.mcs.seed}")
    lines.append(f"mcs.scheme = {config.mcs.sampling_scheme}")
    return "\n".join(lines) + "\n"


def load_config(path: str | None = None) -> ScoringConfig:
    """Load from ``path``, the env-var default, or built-in defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return ScoringConfig()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), file=path)
