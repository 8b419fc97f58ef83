"""Structured identifiers for unsafe control actions and derived artifacts.

An unsafe control action is identified as ``UCA(Ph<U>)-<X>.<Y>.<Z>`` where
U is the phase label suffix (digits with at most one embedded dot), X the
control-action number, Y the guide type (1..7) and Z the per-(CA, type)
sequence number.  Causal factors and requirements append ``-CF<n>`` /
``-RQ<n>`` to their parent UCA id.

Canonical renderings contain no whitespace and no dot between RQ/CF and the
number.  ``lenient=True`` additionally accepts interior spaces and dotted
suffixes ("UCA(Ph1)- 18.2.1", "...-RQ.2") as they occasionally appear in
print, normalizing them away.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

PHASE_LABEL_RE = re.compile(r"^Ph\d+(\.\d+)?$")

_UCA_RE = re.compile(
    r"^UCA\((Ph\d+(?:\.\d+)?)\)-(\d+)\.(\d+)\.(\d+)$"
)
_UCA_LENIENT_RE = re.compile(
    r"^UCA\s*\(\s*(Ph\s*\d+(?:\s*\.\s*\d+)?)\s*\)\s*-\s*(\d+)\s*\.\s*(\d+)\s*\.\s*(\d+)$"
)
_SUFFIX_RE = re.compile(r"^(CF|RQ)(\d+)$")
_SUFFIX_LENIENT_RE = re.compile(r"^(CF|RQ)\s*\.?\s*(\d+)$")


class IdError(ValueError):
    """Malformed identifier; ``field`` names the part that failed."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def is_phase_label(text: str) -> bool:
    """True when ``text`` matches the phase grammar ``Ph`` digits ('.' digits)?."""
    return bool(PHASE_LABEL_RE.match(text))


def phase_sort_key(label: str) -> tuple[int, int]:
    """Numeric ordering for phase labels: Ph0.1 < Ph0.2 < Ph1 < Ph2 < Ph10."""
    if not is_phase_label(label):
        raise IdError("phase", f"not a phase label: {label!r}")
    body = label[2:]
    if "." in body:
        major, minor = body.split(".")
        return (int(major), int(minor))
    return (int(body), -1)


@total_ordering
@dataclass(frozen=True)
class UcaId:
    """Identifier of one unsafe control action."""

    phase: str  # full phase label, e.g. "Ph0.1"
    ca_number: int
    uca_type: int  # guide type 1..7
    sequence: int

    def __post_init__(self):
        if not is_phase_label(self.phase):
            raise IdError("phase", f"not a phase label: {self.phase!r}")
        if self.ca_number < 1:
            raise IdError("caNumber", f"must be positive, got {self.ca_number}")
        if not 1 <= self.uca_type <= 7:
            raise IdError("ucaType", f"out of range 1..7, got {self.uca_type}")
        if self.sequence < 1:
            raise IdError("sequence", f"must be positive, got {self.sequence}")

    def sort_key(self) -> tuple:
        return (phase_sort_key(self.phase), self.ca_number, self.uca_type, self.sequence)

    def __lt__(self, other: "UcaId") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_uca_id(self)


def format_uca_id(uid: UcaId) -> str:
    """Canonical rendering, e.g. ``UCA(Ph0.1)-13.2.2``."""
    return f"UCA({uid.phase})-{uid.ca_number}.{uid.uca_type}.{uid.sequence}"


def parse_uca_id(text: str, lenient: bool = False) -> UcaId:
    """Parse a UCA identifier; raises :class:`IdError` naming the bad field.

    Strict mode requires the canonical space-free form.  Lenient mode also
    accepts interior whitespace.
    """
    m = _UCA_RE.match(text)
    if m is None and lenient:
        m = _UCA_LENIENT_RE.match(text.strip())
    if m is None:
        _diagnose_uca_failure(text)
        raise IdError("format", f"not a UCA id: {text!r}")
    phase = re.sub(r"\s+", "", m.group(1))
    ca_number = int(m.group(2))
    uca_type = int(m.group(3))
    sequence = int(m.group(4))
    if not 1 <= uca_type <= 7:
        raise IdError("ucaType", f"out of range 1..7, got {uca_type}")
    if ca_number < 1:
        raise IdError("caNumber", f"must be positive, got {ca_number}")
    if sequence < 1:
        raise IdError("sequence", f"must be positive, got {sequence}")
    return UcaId(phase=phase, ca_number=ca_number, uca_type=uca_type, sequence=sequence)


def _diagnose_uca_failure(text: str) -> None:
    """Raise a field-specific IdError when the general shape is close."""
    m = _UCA_LENIENT_RE.match(text.strip())
    if m is None:
        return
    # Shape matched leniently; the strict failure is whitespace, which the
    # caller reports as a format error.  Numeric range problems are caught by
    # the main path, so nothing further to refine here.
    uca_type = int(m.group(3))
    if not 1 <= uca_type <= 7:
        raise IdError("ucaType", f"out of range 1..7, got {uca_type}")


@total_ordering
@dataclass(frozen=True)
class ArtifactId:
    """Identifier of a causal factor (kind="CF") or requirement (kind="RQ")."""

    uca: UcaId
    kind: str  # "CF" | "RQ"
    number: int

    def __post_init__(self):
        if self.kind not in ("CF", "RQ"):
            raise IdError("kind", f"expected CF or RQ, got {self.kind!r}")
        if self.number < 1:
            raise IdError("number", f"must be positive, got {self.number}")

    def sort_key(self) -> tuple:
        return (self.uca.sort_key(), self.kind, self.number)

    def __lt__(self, other: "ArtifactId") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_artifact_id(self)


def format_artifact_id(aid: ArtifactId) -> str:
    """Canonical rendering, e.g. ``UCA(Ph1)-18.2.1-RQ9``."""
    return f"{format_uca_id(aid.uca)}-{aid.kind}{aid.number}"


def parse_artifact_id(text: str, kind: str | None = None, lenient: bool = False) -> ArtifactId:
    """Parse ``<ucaId>-CF<n>`` / ``<ucaId>-RQ<n>``.

    ``kind`` restricts which suffix is acceptable.  Lenient mode additionally
    accepts a dot between the suffix keyword and the number ("RQ.2").
    """
    head, sep, tail = text.rpartition("-")
    if not sep:
        raise IdError("format", f"not a CF/RQ id: {text!r}")
    m = _SUFFIX_RE.match(tail)
    if m is None and lenient:
        m = _SUFFIX_LENIENT_RE.match(tail.strip())
    if m is None:
        raise IdError("suffix", f"expected CF<n> or RQ<n> suffix, got {tail!r}")
    found_kind, number = m.group(1), int(m.group(2))
    if kind is not None and found_kind != kind:
        raise IdError("kind", f"expected {kind} id, got {found_kind}")
    if number < 1:
        raise IdError("number", f"must be positive, got {number}")
    return ArtifactId(uca=parse_uca_id(head, lenient=lenient), kind=found_kind, number=number)


def parse_any_id(text: str, lenient: bool = False) -> UcaId | ArtifactId:
    """Parse either a bare UCA id or a CF/RQ artifact id."""
    try:
        return parse_uca_id(text, lenient=lenient)
    except IdError:
        return parse_artifact_id(text, lenient=lenient)
