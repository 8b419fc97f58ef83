from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from stpa_workbench.core import Severity
from stpa_workbench.dsl import model_signature, parse_model, print_model


class TestParseBasics:
    def test_loss_statement(self):
        result = parse_model(
            'loss L1 rank 1 "Loss of life or injury to 1st, 2nd or 3rd parties"'
        )
        assert result.ok
        (loss,) = result.model.losses
        assert loss.id == "L1" and loss.rank == 1
        assert loss.description.startswith("Loss of life")

    def test_empty_document(self):
        result = parse_model("")
        assert result.ok and result.model == parse_model("").model
        assert result.model.losses == ()
        assert result.diagnostics == []

    def test_comments_and_blank_lines_ignored(self):
        result = parse_model("# heading\n\n   # indented comment\n")
        assert result.ok and result.diagnostics == []

    def test_unknown_phase_reference_has_span(self):
        text = (
            'component NATS "NATS" kind organization\n'
            'component Commander "Commander" kind human\n'
            "ca 18 \"clearance\" from NATS to Commander phase Ph9\n"
        )
        result = parse_model(text, file="doc.stpa")
        errors = [d for d in result.diagnostics if d.code == "unknown-phase"]
        assert errors, [d.render() for d in result.diagnostics]
        span = errors[0].span
        assert span is not None and span.file == "doc.stpa" and span.line == 3

    def test_uca_type_keyword_must_agree_with_id(self):
        text = (
            'phase Ph1 "t"\n'
            'component A "A" kind organization\ncomponent B "B" kind machine\n'
            'ca 18 "x" from A to B phase Ph1\n'
            "uca UCA(Ph1)-18.2.1 type tooLate {\n"
            '    context "c"\n'
            "    losses L1\n"
            "}\n"
        )
        result = parse_model(text)
        assert any(d.code == "uca-type-mismatch" for d in result.diagnostics)

    def test_numeric_type_accepted(self):
        text = (
            'phase Ph1 "t"\nloss L1 rank 1 "l"\n'
            'component A "A" kind organization\ncomponent B "B" kind machine\n'
            'ca 18 "x" from A to B phase Ph1\n'
            "uca UCA(Ph1)-18.2.1 type 2 {\n"
            '    context "c"\n    losses L1\n    status confirmed\n'
            "}\n"
        )
        result = parse_model(text)
        assert result.ok, [d.render() for d in result.diagnostics]

    def test_dotted_rq_suffix_normalized_with_warning(self):
        text = (
            'phase Ph2 "t"\nloss L1 rank 1 "l"\n'
            'component A "A" kind organization\ncomponent B "B" kind human\n'
            'ca 6 "hold" from A to B phase Ph2\n'
            "uca UCA(Ph2)-6.5.1 type tooLate {\n"
            '    context "c"\n    losses L1\n    status confirmed\n'
            "}\n"
            "cf UCA(Ph2)-6.5.1-CF1 {\n"
            '    description "delayed feedback"\n    category delayed-feedback\n    scenario typeA\n'
            "}\n"
            "requirement UCA(Ph2)-6.5.1-RQ.1 {\n"
            '    text "self checks"\n    addresses UCA(Ph2)-6.5.1-CF1\n    stakeholders A\n'
            "}\n"
        )
        result = parse_model(text)
        warnings = [d for d in result.diagnostics if d.code == "nonstandard-id"]
        assert warnings and all(d.severity is Severity.WARNING for d in warnings)
        (req,) = result.model.requirements
        assert str(req.id) == "UCA(Ph2)-6.5.1-RQ1"

    def test_malformed_statement_keeps_rest_of_document(self):
        text = 'loss L1 rank 1 "a"\nloss L2 rank\nloss L3 rank 2 "c"\n'
        result = parse_model(text)
        assert not result.ok
        assert {l.id for l in result.model.losses} == {"L1", "L3"}

    def test_unterminated_block_reported(self):
        text = 'phase Ph1 "t"\nuca UCA(Ph1)-1.1.1 {\n    status candidate\n'
        result = parse_model(text)
        assert any(d.code == "unterminated-block" for d in result.diagnostics)


class TestPrinter:
    def test_corpus_round_trip_structural_equality(self, corpus_model):
        printed = print_model(corpus_model)
        reparsed = parse_model(printed)
        assert reparsed.ok, [d.render() for d in reparsed.diagnostics]
        assert model_signature(reparsed.model) == model_signature(corpus_model)

    def test_corpus_file_is_canonical(self, corpus_text, corpus_model):
        # The shipped corpus is stored in canonical form, so the documented
        # grammar can be checked against it byte for byte.
        assert print_model(corpus_model) == corpus_text

    def test_single_loss_model(self):
        result = parse_model('loss L1 rank 1 "only loss"')
        assert print_model(result.model) == 'loss L1 rank 1 "only loss"\n'

    def test_phase_blocks_in_lexicographic_order(self):
        text = 'phase Ph2 "later"\nphase Ph0.1 "earlier"\n'
        model = parse_model(text).model
        printed = print_model(model)
        assert printed.index("Ph0.1") < printed.index("Ph2")
        assert print_model(parse_model(printed).model) == printed

    def test_print_is_deterministic_across_runs(self, corpus_model):
        assert print_model(corpus_model) == print_model(corpus_model)

    def test_string_escapes_round_trip(self):
        tricky = 'loss L1 rank 1 "quote \\" backslash \\\\ newline \\n tab \\t done"'
        result = parse_model(tricky)
        assert result.ok
        assert result.model.losses[0].description == 'quote " backslash \\ newline \n tab \t done'
        assert model_signature(parse_model(print_model(result.model)).model) == model_signature(
            result.model
        )


# ---------------------------------------------------------------------------
# Totality: arbitrary input never crashes the parser
# ---------------------------------------------------------------------------

@given(st.text(max_size=400))
@settings(max_examples=200)
def test_parser_is_total_on_arbitrary_text(text):
    result = parse_model(text, file="fuzz.stpa")
    for diagnostic in result.diagnostics:
        if diagnostic.span is not None:
            assert diagnostic.span.line >= 1
            assert diagnostic.span.column >= 1
            assert diagnostic.span.line <= text.count("\n") + 1


@given(
    st.text(
        alphabet=st.sampled_from(
            list("phase loss component ca uca cf requirement gap score {}\"\n 0123456789.LPh-")
        ),
        max_size=300,
    )
)
@settings(max_examples=200)
def test_parser_is_total_on_keyword_soup(text):
    parse_model(text)


# ---------------------------------------------------------------------------
# Round-trip over generated models
# ---------------------------------------------------------------------------

ident = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,6}", fullmatch=True)
short_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=30
)


@st.composite
def documents(draw):
    """Small, reference-consistent documents exercising every statement kind."""
    n_losses = draw(st.integers(1, 4))
    losses = [f"L{i}" for i in range(1, n_losses + 1)]
    phases = draw(st.lists(st.sampled_from(["Ph0.1", "Ph0.2", "Ph1", "Ph2"]), min_size=1, max_size=3, unique=True))
    components = draw(st.lists(ident, min_size=2, max_size=5, unique=True))
    kinds = ["organization", "human", "machine"]
    lines = []
    for i, label in enumerate(sorted(phases)):
        lines.append(f'phase {label} "phase {i}"')
    for i, lid in enumerate(losses):
        description = draw(short_text).replace("\\", " ").replace('"', " ")
        lines.append(f'loss {lid} rank {i + 1} "{description}"')
    for i, cid in enumerate(components):
        lines.append(f'component {cid} "{cid} unit" kind {kinds[i % 3]}')
    n_cas = draw(st.integers(0, 4))
    cas = []
    for i in range(n_cas):
        controller, process = draw(
            st.tuples(st.sampled_from(components), st.sampled_from(components)).filter(
                lambda t: t[0] != t[1]
            )
        )
        phase = draw(st.sampled_from(phases))
        if any(c[0] == phase and c[1] == i + 1 for c in cas):
            continue
        cas.append((phase, i + 1, controller, process))
        lines.append(f'ca {i + 1} "action {i}" from {controller} to {process} phase {phase}')
    for phase, number, controller, process in cas:
        if draw(st.booleans()):
            uca_type = draw(st.integers(1, 7))
            chosen = draw(st.lists(st.sampled_from(losses), min_size=1, max_size=len(losses), unique=True))
            lines.append(f"uca UCA({phase})-{number}.{uca_type}.1 type {uca_type} {{")
            lines.append('    context "generated condition"')
            lines.append(f"    losses {', '.join(sorted(chosen))}")
            lines.append("    status confirmed")
            lines.append("}")
    return "\n".join(lines) + "\n"


@given(documents())
@settings(max_examples=80)
def test_round_trip_on_generated_documents(document):
    first = parse_model(document)
    assert first.ok, [d.render() for d in first.diagnostics]
    printed = print_model(first.model)
    second = parse_model(printed)
    assert second.ok, [d.render() for d in second.diagnostics]
    assert model_signature(second.model) == model_signature(first.model)
    assert print_model(second.model) == printed
