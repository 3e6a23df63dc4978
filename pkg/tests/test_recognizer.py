import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonpipe.anonymizer import anonymize
from anonpipe.entities import EntitySpan, SpanIntegrityError
from anonpipe.recognizer import (
    GazetteerFormatError,
    RecognizerConfig,
    load_external_spans,
    load_gazetteer,
    recognize,
)

FIXTURE = json.loads((Path(__file__).parent / "data" / "pattern_fixture.json").read_text())


@pytest.fixture(scope="module")
def fixture_config() -> RecognizerConfig:
    return RecognizerConfig().with_gazetteer(FIXTURE["gazetteer"])


class TestPatternOracle:
    """Hand-enumerated matches on the 50-sentence fixture corpus."""

    @pytest.mark.parametrize(
        "case", FIXTURE["sentences"], ids=lambda c: c["text"][:40]
    )
    def test_sentence(self, case, fixture_config):
        spans = recognize(case["text"], fixture_config)
        got = [[s.entity_type, s.surface] for s in spans]
        assert got == case["expected"]

    def test_fixture_has_fifty_sentences(self):
        assert len(FIXTURE["sentences"]) == 50

    def test_empty_input(self, fixture_config):
        assert recognize("", fixture_config) == []


class TestSpanHygiene:
    def test_spans_sorted_and_disjoint_on_fixture(self, fixture_config):
        for case in FIXTURE["sentences"]:
            spans = recognize(case["text"], fixture_config)
            for a, b in zip(spans, spans[1:]):
                assert a.end <= b.start

    @settings(max_examples=60, deadline=None)
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    def test_spans_sorted_and_disjoint_on_random_text(self, text):
        spans = recognize(text)
        for a, b in zip(spans, spans[1:]):
            assert a.end <= b.start
        for s in spans:
            assert text[s.start:s.end] == s.surface

    def test_deterministic(self, fixture_config):
        text = "Apple beat Q1 2024 estimates by 5% on March 5, 2024 at 16:00 ET."
        first = recognize(text, fixture_config)
        for _ in range(3):
            assert recognize(text, fixture_config) == first

    def test_placeholders_never_matched_after_substitution(self, fixture_config):
        for case in FIXTURE["sentences"]:
            spans = recognize(case["text"], fixture_config)
            masked, _ = anonymize(case["text"], spans)
            again = recognize(masked, fixture_config)
            # nothing recognized inside a placeholder token
            import anonpipe.entities as ent
            blocks = [(m.start(), m.end()) for m in ent.PLACEHOLDER_RE.finditer(masked)]
            for s in again:
                assert not any(s.start < e and s.end > b for b, e in blocks)


class TestGazetteerLoading:
    def test_load_ok(self, tmp_path):
        path = tmp_path / "terms.tsv"
        path.write_text("ORG\tApple\nPERSON\tTim Cook\n# comment\n\nGPE\tKorea\n")
        terms = load_gazetteer(path)
        assert terms == {"ORG": ("Apple",), "PERSON": ("Tim Cook",), "GPE": ("Korea",)}

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "terms.tsv"
        path.write_text("ORG\tApple\njunk line\n")
        with pytest.raises(GazetteerFormatError, match="line 2"):
            load_gazetteer(path)

    def test_bad_type_rejected(self, tmp_path):
        path = tmp_path / "terms.tsv"
        path.write_text("MONEY\t$5\n")
        with pytest.raises(GazetteerFormatError, match="line 1"):
            load_gazetteer(path)


class TestExternalSpans:
    def test_consistent_sidecar_accepted(self):
        text = "Apple said hi"
        spans = load_external_spans(text, [EntitySpan(0, 5, "ORG", "Apple")])
        assert spans == [EntitySpan(0, 5, "ORG", "Apple")]

    def test_surface_mismatch_is_integrity_error(self):
        with pytest.raises(SpanIntegrityError, match="Aple"):
            load_external_spans("Apple said hi", [EntitySpan(0, 5, "ORG", "Aple")])

    def test_longer_span_wins_on_overlap(self):
        text = "Apple Inc said hi"
        spans = load_external_spans(text, [
            EntitySpan(0, 9, "ORG", "Apple Inc"),
            EntitySpan(4, 9, "ORG", "e Inc"),
        ])
        assert spans == [EntitySpan(0, 9, "ORG", "Apple Inc")]

    def test_out_of_range_rejected(self):
        with pytest.raises(SpanIntegrityError):
            load_external_spans("hi", [EntitySpan(0, 5, "ORG", "Apple")])

    def test_sidecar_file_path(self, tmp_path):
        from anonpipe.entities import write_sidecar

        text = "Apple said hi"
        path = tmp_path / "spans.jsonl"
        write_sidecar(path, "d1", [EntitySpan(0, 5, "ORG", "Apple")])
        spans = load_external_spans(text, path, doc_id="d1")
        assert [s.surface for s in spans] == ["Apple"]
