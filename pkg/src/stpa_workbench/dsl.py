"""Textual language for authoring STPA models and analysis artifacts.

Documents are UTF-8 ``.stpa`` files made of line-oriented keyword statements
with optional ``{}`` attribute blocks and ``#`` end-of-line comments:

    phase Ph1 "Take-Off"
    component NATS "NATS (LHR RADAR)" kind organization
    loss L1 rank 1 "Loss of life or injury to 1st, 2nd or 3rd parties"
    ca 18 "OnwardClearance" from NATS to Commander phase Ph1
    feedback "RadarReturns" from Commander to NATS phase Ph1
    uca UCA(Ph1)-18.2.1 type incorrect {
        context "there is a conflict with nearby traffic"
        losses L1, L2
        status confirmed
    }
    cf UCA(Ph1)-18.2.1-CF1 { ... }
    requirement UCA(Ph1)-18.2.1-RQ1 { ... }
    gap UCA(Ph1)-18.2.1-RQ1 { verdict gap  recommendation Procedures }
    score UCA(Ph1)-18.2.1 expert E1 { operationalDisruption 4 ... }

Parsing is total: malformed input yields a partial model plus diagnostics
with source spans, never an exception.  :func:`print_model` renders the
canonical form; parse∘print is the identity up to entity multisets.

The full statement grammar (EBNF) ships in ``docs/dsl.md``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    CausalFactor,
    Component,
    ComponentKind,
    ControlAction,
    Diagnostic,
    FeedbackSignal,
    EjScoreSheet,
    GapRecord,
    GapVerdict,
    Hazard,
    Loss,
    LossScenario,
    Model,
    Phase,
    RecommendationType,
    Requirement,
    RequirementScoreSheet,
    ScenarioType,
    Severity,
    SourceSpan,
    UcaStatus,
    UnsafeControlAction,
    EJ_FACTORS,
    REQ_FACTORS,
    validate_model,
)
from .ids import ArtifactId, IdError, UcaId, parse_artifact_id, parse_uca_id

# Re-exported: the UCA/CF/RQ identifier grammar is part of this language.
from .ids import format_artifact_id, format_uca_id  # noqa: F401

FILE_EXTENSION = ".stpa"

UCA_TYPE_KEYWORDS = {
    "notProvided": 1,
    "incorrect": 2,
    "notNeeded": 3,
    "tooEarly": 4,
    "tooLate": 5,
    "tooLong": 6,
    "tooShort": 7,
}
UCA_TYPE_BY_CODE = {code: kw for kw, code in UCA_TYPE_KEYWORDS.items()}


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

# Identifier-like tokens cover plain names, phase labels (Ph0.1) and the
# structured UCA/CF/RQ ids, which embed parentheses, dots and dashes.
_ID_TOKEN_RE = re.compile(r"UCA\([^)\s]*\)-[0-9][0-9.]*(?:-(?:CF|RQ)\.?[0-9]+)?")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_INT_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # "word" | "int" | "string" | "id" | "{" | "}" | ","
    text: str
    line: int
    column: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.column, max(len(self.text), 1))


def _lex_line(text: str, line_no: int, file: str, diagnostics: list[Diagnostic]) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch in "{},":
            tokens.append(Token(ch, ch, line_no, col))
            i += 1
            continue
        if ch == '"':
            value, consumed, ok = _lex_string(text, i)
            if not ok:
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "unterminated-string",
                        "string literal is not terminated",
                        SourceSpan(file, line_no, col, n - i),
                    )
                )
                return tokens
            tokens.append(Token("string", value, line_no, col))
            i += consumed
            continue
        m = _ID_TOKEN_RE.match(text, i)
        if m:
            tokens.append(Token("id", m.group(0), line_no, col))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            tokens.append(Token("word", m.group(0), line_no, col))
            i = m.end()
            continue
        m = _INT_RE.match(text, i)
        if m:
            tokens.append(Token("int", m.group(0), line_no, col))
            i = m.end()
            continue
        diagnostics.append(
            Diagnostic(
                Severity.ERROR,
                "unexpected-character",
                f"unexpected character {ch!r}",
                SourceSpan(file, line_no, col, 1),
            )
        )
        i += 1
    return tokens


def _lex_string(text: str, start: int) -> tuple[str, int, bool]:
    """Returns (value, chars consumed, terminated?).  ``start`` is at the quote."""
    out = []
    i = start + 1
    while i < len(text):
        ch = text[i]
        if ch == '"':
            return "".join(out), i - start + 1, True
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(nxt, nxt))
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out), len(text) - start, False


def _escape(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

@dataclass
class ParseResult:
    model: Model
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not any(d.severity is Severity.ERROR for d in self.diagnostics)


class _Cursor:
    def __init__(self, tokens: list[Token], file: str, line_no: int, line_len: int):
        self.tokens = tokens
        self.pos = 0
        self.file = file
        self.line_no = line_no
        self.line_len = line_len

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def end_span(self) -> SourceSpan:
        if self.tokens:
            last = self.tokens[-1]
            return SourceSpan(self.file, last.line, last.column + len(last.text), 1)
        return SourceSpan(self.file, self.line_no, self.line_len + 1, 1)


class _StatementError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


class _Parser:
    """Statement-at-a-time recursive parser with per-statement recovery."""

    def __init__(self, file: str):
        self.file = file
        self.diagnostics: list[Diagnostic] = []
        self.losses: list[Loss] = []
        self.phases: list[Phase] = []
        self.components: list[Component] = []
        self.hazards: list[Hazard] = []
        self.cas: list[ControlAction] = []
        self.feedbacks: list[FeedbackSignal] = []
        self.ucas: list[UnsafeControlAction] = []
        self.scenarios: list[LossScenario] = []
        self.cfs: list[CausalFactor] = []
        self.requirements: list[Requirement] = []
        self.gaps: list[GapRecord] = []
        self.ej_sheets: list[EjScoreSheet] = []
        self.req_sheets: list[RequirementScoreSheet] = []
        self.spans: dict[tuple, SourceSpan] = {}

    # -- plumbing ----------------------------------------------------------

    def _error(self, code: str, message: str, span: SourceSpan) -> _StatementError:
        return _StatementError(Diagnostic(Severity.ERROR, code, message, span))

    def _warn(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic(Severity.WARNING, code, message, span))

    def _expect(self, cursor: _Cursor, kinds: tuple[str, ...], what: str) -> Token:
        tok = cursor.next()
        if tok is None:
            raise self._error("unexpected-end", f"expected {what}", cursor.end_span())
        if tok.kind not in kinds:
            raise self._error("unexpected-token", f"expected {what}, got {tok.text!r}", tok.span(self.file))
        return tok

    def _expect_keyword(self, cursor: _Cursor, keyword: str) -> Token:
        tok = cursor.next()
        if tok is None or tok.text != keyword:
            span = tok.span(self.file) if tok else cursor.end_span()
            got = f", got {tok.text!r}" if tok else ""
            raise self._error("unexpected-token", f"expected keyword '{keyword}'{got}", span)
        return tok

    def _expect_int(self, cursor: _Cursor, what: str) -> int:
        tok = self._expect(cursor, ("int",), what)
        return int(tok.text)

    def _expect_string(self, cursor: _Cursor, what: str) -> str:
        return self._expect(cursor, ("string",), what).text

    def _expect_word(self, cursor: _Cursor, what: str) -> Token:
        return self._expect(cursor, ("word",), what)

    def _expect_done(self, cursor: _Cursor) -> None:
        tok = cursor.peek()
        if tok is not None:
            raise self._error(
                "trailing-tokens", f"unexpected trailing {tok.text!r}", tok.span(self.file)
            )

    def _word_list(self, cursor: _Cursor, what: str) -> list[Token]:
        items = [self._expect(cursor, ("word", "id"), what)]
        while cursor.peek() is not None and cursor.peek().kind == ",":
            cursor.next()
            items.append(self._expect(cursor, ("word", "id"), what))
        return items

    def _parse_uca_id_token(self, tok: Token) -> UcaId:
        try:
            uid = parse_uca_id(tok.text)
        except IdError as exc:
            try:
                uid = parse_uca_id(tok.text, lenient=True)
            except IdError:
                raise self._error("bad-uca-id", f"{tok.text!r}: {exc}", tok.span(self.file)) from exc
            self._warn("nonstandard-id", f"{tok.text!r} normalized to {uid}", tok.span(self.file))
        return uid

    def _parse_artifact_id_token(self, tok: Token, kind: str) -> ArtifactId:
        try:
            aid = parse_artifact_id(tok.text, kind=kind)
        except IdError as exc:
            try:
                aid = parse_artifact_id(tok.text, kind=kind, lenient=True)
            except IdError:
                raise self._error("bad-artifact-id", f"{tok.text!r}: {exc}", tok.span(self.file)) from exc
            self._warn("nonstandard-id", f"{tok.text!r} normalized to {aid}", tok.span(self.file))
        return aid

    # -- blocks ------------------------------------------------------------

    def _read_block(self, cursor: _Cursor, lines: _LineFeed) -> list[_Cursor]:
        """Consume a ``{ ... }`` block; returns one cursor per attribute line."""
        tok = cursor.peek()
        if tok is None or tok.kind != "{":
            return []
        cursor.next()
        trailing = cursor.peek()
        if trailing is not None:
            self.diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "trailing-tokens",
                    f"unexpected {trailing.text!r} after '{{'",
                    trailing.span(self.file),
                )
            )
        body: list[_Cursor] = []
        while True:
            line = lines.next_line(self)
            if line is None:
                self.diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "unterminated-block",
                        "block is not closed before end of file",
                        cursor.end_span(),
                    )
                )
                return body
            if not line.tokens:
                continue
            if line.tokens[0].kind == "}":
                line.next()
                try:
                    self._expect_done(line)
                except _StatementError as exc:
                    self.diagnostics.append(exc.diagnostic)
                return body
            body.append(line)

    def _block_attrs(
        self, body: list[_Cursor], allowed: dict[str, str], context: str
    ) -> dict[str, tuple[_Cursor, Token]]:
        """Index attribute lines by keyword; duplicate keys are errors."""
        attrs: dict[str, tuple[_Cursor, Token]] = {}
        for line in body:
            head = line.next()
            if head.kind != "word" or head.text not in allowed:
                self.diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "unknown-attribute",
                        f"unknown {context} attribute {head.text!r}",
                        head.span(self.file),
                    )
                )
                continue
            if head.text in attrs:
                self.diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "duplicate-attribute",
                        f"duplicate {context} attribute {head.text!r}",
                        head.span(self.file),
                    )
                )
                continue
            attrs[head.text] = (line, head)
        return attrs

    # -- statements --------------------------------------------------------

    def parse_statement(self, cursor: _Cursor, lines: _LineFeed) -> None:
        head = cursor.next()
        if head is None:
            return
        handler = {
            "phase": self._stmt_phase,
            "loss": self._stmt_loss,
            "component": self._stmt_component,
            "hazard": self._stmt_hazard,
            "ca": self._stmt_ca,
            "feedback": self._stmt_feedback,
            "uca": self._stmt_uca,
            "scenario": self._stmt_scenario,
            "cf": self._stmt_cf,
            "requirement": self._stmt_requirement,
            "gap": self._stmt_gap,
            "score": self._stmt_score,
        }.get(head.text if head.kind == "word" else "")
        if handler is None:
            self.diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "unknown-statement",
                    f"unknown statement {head.text!r}",
                    head.span(self.file),
                )
            )
            # Recovery: if the statement opened a block, skip it.
            if any(t.kind == "{" for t in cursor.tokens):
                self._read_block(_at_block(cursor), lines)
            return
        try:
            handler(head, cursor, lines)
        except _StatementError as exc:
            self.diagnostics.append(exc.diagnostic)
            if any(t.kind == "{" for t in cursor.tokens[cursor.pos :]):
                self._read_block(_at_block(cursor), lines)

    def _stmt_phase(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        ident = self._expect_word(cursor, "phase id")
        title = self._expect_string(cursor, "phase title")
        self._expect_done(cursor)
        self.phases.append(Phase(id=ident.text, title=title))
        self.spans[("phase", ident.text)] = ident.span(self.file)

    def _stmt_loss(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        ident = self._expect_word(cursor, "loss id")
        self._expect_keyword(cursor, "rank")
        rank = self._expect_int(cursor, "loss rank")
        description = self._expect_string(cursor, "loss description")
        self._expect_done(cursor)
        self.losses.append(Loss(id=ident.text, description=description, rank=rank))
        self.spans[("loss", ident.text)] = ident.span(self.file)

    def _stmt_component(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        ident = self._expect_word(cursor, "component id")
        display = self._expect_string(cursor, "component display name")
        self._expect_keyword(cursor, "kind")
        kind_tok = self._expect_word(cursor, "component kind")
        try:
            kind = ComponentKind(kind_tok.text)
        except ValueError:
            raise self._error(
                "bad-kind",
                f"kind must be organization, human or machine, got {kind_tok.text!r}",
                kind_tok.span(self.file),
            )
        inside = True
        tok = cursor.peek()
        if tok is not None and tok.kind == "word" and tok.text in ("outside", "inside"):
            cursor.next()
            inside = tok.text == "inside"
        self._expect_done(cursor)
        self.components.append(
            Component(id=ident.text, display_name=display, kind=kind, inside_boundary=inside)
        )
        self.spans[("component", ident.text)] = ident.span(self.file)

    def _stmt_hazard(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        ident = self._expect_word(cursor, "hazard id")
        description = self._expect_string(cursor, "hazard description")
        self._expect_keyword(cursor, "losses")
        loss_tokens = self._word_list(cursor, "loss id")
        self._expect_done(cursor)
        self.hazards.append(
            Hazard(
                id=ident.text,
                description=description,
                linked_losses=frozenset(t.text for t in loss_tokens),
            )
        )
        self.spans[("hazard", ident.text)] = ident.span(self.file)

    def _stmt_ca(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        number = self._expect_int(cursor, "control action number")
        label = self._expect_string(cursor, "control action label")
        self._expect_keyword(cursor, "from")
        controller = self._expect_word(cursor, "controller id")
        self._expect_keyword(cursor, "to")
        controlled = self._expect_word(cursor, "controlled process id")
        self._expect_keyword(cursor, "phase")
        phase = self._expect_word(cursor, "phase id")
        self._expect_done(cursor)
        self.cas.append(
            ControlAction(
                number=number,
                label=label,
                controller=controller.text,
                controlled_process=controlled.text,
                phase=phase.text,
            )
        )
        self.spans[("ca", phase.text, number)] = head.span(self.file)

    def _stmt_feedback(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        label = self._expect_string(cursor, "feedback label")
        self._expect_keyword(cursor, "from")
        source = self._expect_word(cursor, "source id")
        self._expect_keyword(cursor, "to")
        destination = self._expect_word(cursor, "destination id")
        self._expect_keyword(cursor, "phase")
        phase = self._expect_word(cursor, "phase id")
        self._expect_done(cursor)
        self.spans[("feedback", len(self.feedbacks))] = head.span(self.file)
        self.feedbacks.append(
            FeedbackSignal(label=label, source=source.text, destination=destination.text, phase=phase.text)
        )

    def _stmt_uca(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "UCA id")
        uid = self._parse_uca_id_token(id_tok)
        tok = cursor.peek()
        if tok is not None and tok.kind == "word" and tok.text == "type":
            cursor.next()
            type_tok = self._expect(cursor, ("word", "int"), "UCA type")
            declared = (
                UCA_TYPE_KEYWORDS.get(type_tok.text)
                if type_tok.kind == "word"
                else int(type_tok.text)
            )
            if declared is None or not 1 <= declared <= 7:
                raise self._error(
                    "bad-uca-type",
                    f"UCA type must be 1..7 or one of {'|'.join(UCA_TYPE_KEYWORDS)}, got {type_tok.text!r}",
                    type_tok.span(self.file),
                )
            if declared != uid.uca_type:
                raise self._error(
                    "uca-type-mismatch",
                    f"declared type {type_tok.text} disagrees with id field {uid.uca_type}",
                    type_tok.span(self.file),
                )
        body = self._read_block(cursor, lines)
        attrs = self._block_attrs(
            body,
            {"context": "", "losses": "", "status": "", "rationale": ""},
            "uca",
        )
        context = ""
        losses: frozenset[str] = frozenset()
        status = UcaStatus.CANDIDATE
        rationale = ""
        if "context" in attrs:
            line, _ = attrs["context"]
            context = self._expect_string(line, "context text")
            self._expect_done(line)
        if "losses" in attrs:
            line, _ = attrs["losses"]
            losses = frozenset(t.text for t in self._word_list(line, "loss id"))
            self._expect_done(line)
        if "status" in attrs:
            line, key = attrs["status"]
            status_tok = self._expect_word(line, "status")
            try:
                status = UcaStatus(status_tok.text)
            except ValueError:
                raise self._error(
                    "bad-status",
                    f"status must be candidate, confirmed or rejected, got {status_tok.text!r}",
                    status_tok.span(self.file),
                )
            self._expect_done(line)
        if "rationale" in attrs:
            line, _ = attrs["rationale"]
            rationale = self._expect_string(line, "rationale text")
            self._expect_done(line)
        self.ucas.append(
            UnsafeControlAction(
                id=uid,
                context=context,
                linked_losses=losses,
                status=status,
                rejection_rationale=rationale,
            )
        )
        self.spans[("uca", str(uid))] = id_tok.span(self.file)

    def _stmt_scenario(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "UCA id")
        uid = self._parse_uca_id_token(id_tok)
        type_tok = self._expect_word(cursor, "scenario type")
        try:
            stype = ScenarioType(type_tok.text)
        except ValueError:
            raise self._error(
                "bad-scenario-type",
                f"scenario type must be typeA or typeB, got {type_tok.text!r}",
                type_tok.span(self.file),
            )
        description = self._expect_string(cursor, "scenario description")
        self._expect_done(cursor)
        self.spans[("scenario", len(self.scenarios))] = head.span(self.file)
        self.scenarios.append(LossScenario(uca_id=uid, scenario_type=stype, description=description))

    def _stmt_cf(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "causal factor id")
        cid = self._parse_artifact_id_token(id_tok, "CF")
        body = self._read_block(cursor, lines)
        attrs = self._block_attrs(body, {"description": "", "category": "", "scenario": ""}, "cf")
        description = ""
        category = ""
        stype = ScenarioType.TYPE_A
        if "description" in attrs:
            line, _ = attrs["description"]
            description = self._expect_string(line, "description text")
            self._expect_done(line)
        if "category" in attrs:
            line, _ = attrs["category"]
            category = self._expect_word(line, "category").text
            self._expect_done(line)
        if "scenario" in attrs:
            line, _ = attrs["scenario"]
            type_tok = self._expect_word(line, "scenario type")
            try:
                stype = ScenarioType(type_tok.text)
            except ValueError:
                raise self._error(
                    "bad-scenario-type",
                    f"scenario type must be typeA or typeB, got {type_tok.text!r}",
                    type_tok.span(self.file),
                )
            self._expect_done(line)
        self.cfs.append(CausalFactor(id=cid, description=description, category=category, scenario_type=stype))
        self.spans[("cf", str(cid))] = id_tok.span(self.file)

    def _stmt_requirement(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "requirement id")
        rid = self._parse_artifact_id_token(id_tok, "RQ")
        body = self._read_block(cursor, lines)
        attrs = self._block_attrs(body, {"text": "", "addresses": "", "stakeholders": ""}, "requirement")
        text = ""
        addresses: frozenset[ArtifactId] = frozenset()
        stakeholders: frozenset[str] = frozenset()
        if "text" in attrs:
            line, _ = attrs["text"]
            text = self._expect_string(line, "requirement text")
            self._expect_done(line)
        if "addresses" in attrs:
            line, _ = attrs["addresses"]
            tokens = self._word_list(line, "causal factor id")
            self._expect_done(line)
            addresses = frozenset(self._parse_artifact_id_token(t, "CF") for t in tokens)
        if "stakeholders" in attrs:
            line, _ = attrs["stakeholders"]
            stakeholders = frozenset(t.text for t in self._word_list(line, "stakeholder id"))
            self._expect_done(line)
        self.requirements.append(
            Requirement(id=rid, text=text, addresses=addresses, stakeholders=stakeholders)
        )
        self.spans[("requirement", str(rid))] = id_tok.span(self.file)

    def _stmt_gap(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "requirement id")
        rid = self._parse_artifact_id_token(id_tok, "RQ")
        body = self._read_block(cursor, lines)
        attrs = self._block_attrs(
            body, {"verdict": "", "coveredBy": "", "recommendation": "", "helicopter": ""}, "gap"
        )
        verdict = GapVerdict.GAP
        covered_by: tuple[str, ...] = ()
        recommendation: RecommendationType | None = None
        helicopter = False
        if "verdict" in attrs:
            line, _ = attrs["verdict"]
            verdict_tok = self._expect_word(line, "verdict")
            try:
                verdict = GapVerdict(verdict_tok.text)
            except ValueError:
                raise self._error(
                    "bad-verdict",
                    f"verdict must be covered or gap, got {verdict_tok.text!r}",
                    verdict_tok.span(self.file),
                )
            self._expect_done(line)
        if "coveredBy" in attrs:
            line, _ = attrs["coveredBy"]
            citations = [self._expect_string(line, "citation")]
            while line.peek() is not None and line.peek().kind == ",":
                line.next()
                citations.append(self._expect_string(line, "citation"))
            self._expect_done(line)
            covered_by = tuple(citations)
        if "recommendation" in attrs:
            line, _ = attrs["recommendation"]
            rec_tok = self._expect_word(line, "recommendation type")
            try:
                recommendation = RecommendationType(rec_tok.text)
            except ValueError:
                raise self._error(
                    "bad-recommendation",
                    f"recommendation must be Regulations, Policy or Procedures, got {rec_tok.text!r}",
                    rec_tok.span(self.file),
                )
            self._expect_done(line)
        if "helicopter" in attrs:
            line, _ = attrs["helicopter"]
            flag_tok = self._expect_word(line, "true or false")
            if flag_tok.text not in ("true", "false"):
                raise self._error(
                    "bad-flag",
                    f"helicopter must be true or false, got {flag_tok.text!r}",
                    flag_tok.span(self.file),
                )
            helicopter = flag_tok.text == "true"
            self._expect_done(line)
        self.spans[("gap", len(self.gaps))] = id_tok.span(self.file)
        self.gaps.append(
            GapRecord(
                requirement_id=rid,
                verdict=verdict,
                covered_by=covered_by,
                recommendation_type=recommendation,
                applies_to_existing_helicopter_ops=helicopter,
            )
        )

    def _stmt_score(self, head: Token, cursor: _Cursor, lines: _LineFeed) -> None:
        id_tok = self._expect(cursor, ("id",), "UCA or requirement id")
        self._expect_keyword(cursor, "expert")
        expert = self._expect_word(cursor, "expert id")
        body = self._read_block(cursor, lines)
        is_req = "-RQ" in id_tok.text
        expected = REQ_FACTORS if is_req else EJ_FACTORS
        attrs = self._block_attrs(body, {f: "" for f in (*expected, "rationale")}, "score")
        factors: dict[str, int] = {}
        rationale = ""
        for name in expected:
            if name in attrs:
                line, _ = attrs[name]
                factors[name] = self._expect_int(line, f"{name} value")
                self._expect_done(line)
        if "rationale" in attrs:
            line, _ = attrs["rationale"]
            rationale = self._expect_string(line, "rationale text")
            self._expect_done(line)
        if is_req:
            rid = self._parse_artifact_id_token(id_tok, "RQ")
            self.spans[("req_sheet", len(self.req_sheets))] = id_tok.span(self.file)
            self.req_sheets.append(
                RequirementScoreSheet(requirement_id=rid, expert_id=expert.text, factors=factors)
            )
        else:
            uid = self._parse_uca_id_token(id_tok)
            self.spans[("ej_sheet", len(self.ej_sheets))] = id_tok.span(self.file)
            self.ej_sheets.append(
                EjScoreSheet(uca_id=uid, expert_id=expert.text, factors=factors, rationale=rationale)
            )

    def finish(self) -> ParseResult:
        model = Model(
            losses=tuple(self.losses),
            phases=tuple(self.phases),
            components=tuple(self.components),
            hazards=tuple(self.hazards),
            control_actions=tuple(self.cas),
            feedbacks=tuple(self.feedbacks),
            ucas=tuple(self.ucas),
            scenarios=tuple(self.scenarios),
            causal_factors=tuple(self.cfs),
            requirements=tuple(self.requirements),
            gap_records=tuple(self.gaps),
            ej_sheets=tuple(self.ej_sheets),
            req_sheets=tuple(self.req_sheets),
        )
        for diagnostic in validate_model(model):
            self.diagnostics.append(diagnostic.with_span(self.spans.get(diagnostic.entity)))
        return ParseResult(model=model, diagnostics=self.diagnostics)


def _at_block(cursor: _Cursor) -> _Cursor:
    """Position a cursor at its '{' token (used during error recovery)."""
    for i in range(cursor.pos, len(cursor.tokens)):
        if cursor.tokens[i].kind == "{":
            cursor.pos = i
            return cursor
    cursor.pos = len(cursor.tokens)
    return cursor


class _LineFeed:
    def __init__(self, text: str, file: str):
        self.lines = text.split("\n")
        self.file = file
        self.index = 0

    def next_line(self, parser: _Parser) -> _Cursor | None:
        if self.index >= len(self.lines):
            return None
        raw = self.lines[self.index]
        self.index += 1
        tokens = _lex_line(raw, self.index, self.file, parser.diagnostics)
        return _Cursor(tokens, self.file, self.index, len(raw))


def parse_model(text: str, file: str = "<string>") -> ParseResult:
    """Parse a document into a model plus diagnostics; never raises.

    On malformed input the model is partial (well-formed statements are
    kept) and diagnostics pinpoint every problem with a source span.
    """
    parser = _Parser(file)
    lines = _LineFeed(text, file)
    while True:
        cursor = lines.next_line(parser)
        if cursor is None:
            break
        if not cursor.tokens:
            continue
        if cursor.tokens[0].kind == "}":
            parser.diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "unmatched-brace",
                    "'}' without an open block",
                    cursor.tokens[0].span(file),
                )
            )
            continue
        parser.parse_statement(cursor, lines)
    return parser.finish()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def print_model(model: Model) -> str:
    """Render the canonical document: deterministic ordering, escaped strings.

    ``parse_model(print_model(m))`` reproduces ``m`` up to entity multisets;
    printing the same model twice is byte-identical.
    """
    out: list[str] = []

    for phase in sorted(model.phases, key=lambda p: p.id):
        out.append(f"phase {phase.id} {_escape(phase.title)}")
    if model.phases:
        out.append("")

    for loss in sorted(model.losses, key=lambda l: (l.rank, l.id)):
        out.append(f"loss {loss.id} rank {loss.rank} {_escape(loss.description)}")
    if model.losses:
        out.append("")

    for comp in sorted(model.components, key=lambda c: c.id):
        suffix = "" if comp.inside_boundary else " outside"
        out.append(f"component {comp.id} {_escape(comp.display_name)} kind {comp.kind.value}{suffix}")
    if model.components:
        out.append("")

    for hazard in sorted(model.hazards, key=lambda h: h.id):
        losses = ", ".join(sorted(hazard.linked_losses))
        out.append(f"hazard {hazard.id} {_escape(hazard.description)} losses {losses}")
    if model.hazards:
        out.append("")

    for ca in sorted(model.control_actions, key=lambda c: (c.phase, c.number)):
        out.append(
            f"ca {ca.number} {_escape(ca.label)} from {ca.controller} "
            f"to {ca.controlled_process} phase {ca.phase}"
        )
    if model.control_actions:
        out.append("")

    for fb in sorted(model.feedbacks, key=lambda f: (f.phase, f.label, f.source, f.destination)):
        out.append(f"feedback {_escape(fb.label)} from {fb.source} to {fb.destination} phase {fb.phase}")
    if model.feedbacks:
        out.append("")

    for uca in sorted(model.ucas, key=lambda u: u.id.sort_key()):
        out.append(f"uca {format_uca_id(uca.id)} type {UCA_TYPE_BY_CODE[uca.id.uca_type]} {{")
        if uca.context:
            out.append(f"    context {_escape(uca.context)}")
        if uca.linked_losses:
            out.append(f"    losses {', '.join(sorted(uca.linked_losses))}")
        out.append(f"    status {uca.status.value}")
        if uca.rejection_rationale:
            out.append(f"    rationale {_escape(uca.rejection_rationale)}")
        out.append("}")
    if model.ucas:
        out.append("")

    for sc in sorted(model.scenarios, key=lambda s: (s.uca_id.sort_key(), s.scenario_type.value, s.description)):
        out.append(f"scenario {format_uca_id(sc.uca_id)} {sc.scenario_type.value} {_escape(sc.description)}")
    if model.scenarios:
        out.append("")

    for cf in sorted(model.causal_factors, key=lambda c: c.id.sort_key()):
        out.append(f"cf {format_artifact_id(cf.id)} {{")
        out.append(f"    description {_escape(cf.description)}")
        out.append(f"    category {cf.category}")
        out.append(f"    scenario {cf.scenario_type.value}")
        out.append("}")
    if model.causal_factors:
        out.append("")

    for req in sorted(model.requirements, key=lambda r: r.id.sort_key()):
        out.append(f"requirement {format_artifact_id(req.id)} {{")
        out.append(f"    text {_escape(req.text)}")
        if req.addresses:
            addressed = ", ".join(format_artifact_id(a) for a in sorted(req.addresses))
            out.append(f"    addresses {addressed}")
        if req.stakeholders:
            out.append(f"    stakeholders {', '.join(sorted(req.stakeholders))}")
        out.append("}")
    if model.requirements:
        out.append("")

    # Stable sort keeps the supersede order of records for one requirement.
    for gap in sorted(model.gap_records, key=lambda g: g.requirement_id.sort_key()):
        out.append(f"gap {format_artifact_id(gap.requirement_id)} {{")
        out.append(f"    verdict {gap.verdict.value}")
        if gap.covered_by:
            out.append(f"    coveredBy {', '.join(_escape(c) for c in gap.covered_by)}")
        if gap.recommendation_type is not None:
            out.append(f"    recommendation {gap.recommendation_type.value}")
        if gap.applies_to_existing_helicopter_ops:
            out.append("    helicopter true")
        out.append("}")
    if model.gap_records:
        out.append("")

    for sheet in sorted(model.ej_sheets, key=lambda s: (s.uca_id.sort_key(), s.expert_id)):
        out.append(f"score {format_uca_id(sheet.uca_id)} expert {sheet.expert_id} {{")
        for name in EJ_FACTORS:
            if name in sheet.factors:
                out.append(f"    {name} {sheet.factors[name]}")
        if sheet.rationale:
            out.append(f"    rationale {_escape(sheet.rationale)}")
        out.append("}")
    if model.ej_sheets:
        out.append("")

    for sheet in sorted(model.req_sheets, key=lambda s: (s.requirement_id.sort_key(), s.expert_id)):
        out.append(f"score {format_artifact_id(sheet.requirement_id)} expert {sheet.expert_id} {{")
        for name in REQ_FACTORS:
            if name in sheet.factors:
                out.append(f"    {name} {sheet.factors[name]}")
        out.append("}")
    if model.req_sheets:
        out.append("")

    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n" if out else ""


def model_signature(model: Model) -> tuple:
    """Order-insensitive structural fingerprint used by round-trip checks."""
    return (
        tuple(sorted(model.losses, key=lambda l: (l.id, l.rank))),
        tuple(sorted(model.phases, key=lambda p: p.id)),
        tuple(sorted(model.components, key=lambda c: c.id)),
        tuple(sorted((h.id, h.description, tuple(sorted(h.linked_losses))) for h in model.hazards)),
        tuple(sorted(model.control_actions, key=lambda c: (c.phase, c.number))),
        tuple(sorted(model.feedbacks, key=lambda f: (f.phase, f.label, f.source, f.destination))),
        tuple(sorted(model.ucas, key=lambda u: u.id.sort_key())),
        tuple(sorted(model.scenarios, key=lambda s: (s.uca_id.sort_key(), s.scenario_type.value, s.description))),
        tuple(sorted(model.causal_factors, key=lambda c: c.id.sort_key())),
        tuple(
            sorted(
                (r.id, r.text, tuple(sorted(r.addresses)), tuple(sorted(r.stakeholders)))
                for r in model.requirements
            )
        ),
        tuple(sorted(model.gap_records, key=lambda g: g.requirement_id.sort_key())),
        tuple(
            sorted(
                (s.uca_id, s.expert_id, tuple(sorted(s.factors.items())), s.rationale)
                for s in model.ej_sheets
            )
        ),
        tuple(
            sorted(
                (s.requirement_id, s.expert_id, tuple(sorted(s.factors.items())))
                for s in model.req_sheets
            )
        ),
    )
