import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonpipe.anonymizer import (
    PercentageBasis,
    anonymize,
    apply_map,
    apply_map_with_spans,
    build_entity_map,
    entity_percentage,
    restore_text,
)
from anonpipe.entities import (
    PLACEHOLDER_RE,
    EntityCategory,
    EntityMap,
    EntitySpan,
)
from anonpipe.tokenizers import BpeVocabTokenizer, WordTokenizer

# The worked example sentence used throughout: its spans and target skeleton.
EXAMPLE_TEXT = (
    "Today, Apple is reporting revenue of $119.6 billion for the December "
    "quarter, up 2% from a year ago despite having one less week in the quarter."
)
EXAMPLE_SKELETON = (
    "DATE_1, ORG_1 is reporting revenue of MONEY_1 for DATE_2, up PERCENT_1 "
    "from DATE_3 despite having DATE_4 in DATE_5."
)


def example_spans() -> list[EntitySpan]:
    pieces = [
        ("Today", "DATE"),
        ("Apple", "ORG"),
        ("$119.6 billion", "MONEY"),
        ("the December quarter", "DATE"),
        ("2%", "PERCENT"),
        ("a year ago", "DATE"),
        ("one less week", "DATE"),
        ("the quarter", "DATE"),
    ]
    spans = []
    cursor = 0
    for surface, etype in pieces:
        start = EXAMPLE_TEXT.index(surface, cursor)
        spans.append(EntitySpan(start, start + len(surface), etype, surface))
        cursor = start + len(surface)
    return spans


class TestBuildEntityMap:
    def test_order_of_appearance(self):
        spans = [
            EntitySpan(0, 5, "ORG", "Apple"),
            EntitySpan(6, 14, "PERSON", "Tim Cook"),
            EntitySpan(16, 28, "PERSON", "Luca Maestri"),
        ]
        emap = build_entity_map(spans)
        assert emap.to_dict() == {
            "ORG_1": "Apple",
            "PERSON_1": "Tim Cook",
            "PERSON_2": "Luca Maestri",
        }

    def test_repeats_share_one_index(self):
        text = "Apple and Apple"
        spans = [EntitySpan(0, 5, "ORG", "Apple"), EntitySpan(10, 15, "ORG", "Apple")]
        emap = build_entity_map(spans)
        assert emap.to_dict() == {"ORG_1": "Apple"}
        assert apply_map(text, spans, emap) == "ORG_1 and ORG_1"

    def test_empty(self):
        assert build_entity_map([]).to_dict() == {}


class TestApplyMap:
    def test_example_sentence_full_mask(self):
        masked, emap = anonymize(EXAMPLE_TEXT, example_spans())
        assert masked == EXAMPLE_SKELETON
        assert emap.to_dict()["DATE_5"] == "the quarter"

    def test_empty_category_selection_is_identity(self):
        assert apply_map(EXAMPLE_TEXT, example_spans(), build_entity_map(example_spans()), []) == EXAMPLE_TEXT

    def test_unused_category_is_identity(self):
        spans = example_spans()
        emap = build_entity_map(spans)
        out = apply_map(EXAMPLE_TEXT, spans, emap, [EntityCategory.PLACES])
        assert out == EXAMPLE_TEXT

    def test_single_category_masks_only_that_category(self):
        spans = example_spans()
        emap = build_entity_map(spans)
        out = apply_map(EXAMPLE_TEXT, spans, emap, [EntityCategory.OBJECTS])
        assert "ORG_1" in out
        assert "$119.6 billion" in out  # NUMBERS untouched
        assert "MONEY_1" not in out

    def test_span_missing_from_map_raises(self):
        spans = example_spans()
        with pytest.raises(KeyError):
            apply_map(EXAMPLE_TEXT, spans, EntityMap())

    def test_disjoint_categories_commute(self):
        spans = example_spans()
        emap = build_entity_map(spans)
        step_a, rest_a = apply_map_with_spans(EXAMPLE_TEXT, spans, emap, [EntityCategory.NUMBERS])
        a_then_b, _ = apply_map_with_spans(step_a, rest_a, emap, [EntityCategory.OBJECTS])
        step_b, rest_b = apply_map_with_spans(EXAMPLE_TEXT, spans, emap, [EntityCategory.OBJECTS])
        b_then_a, _ = apply_map_with_spans(step_b, rest_b, emap, [EntityCategory.NUMBERS])
        union = apply_map(EXAMPLE_TEXT, spans, emap,
                          [EntityCategory.NUMBERS, EntityCategory.OBJECTS])
        assert a_then_b == b_then_a == union

    def test_non_selected_text_byte_identical(self):
        spans = example_spans()
        emap = build_entity_map(spans)
        masked = apply_map(EXAMPLE_TEXT, spans, emap)
        # strip placeholders from both; remaining characters must agree
        rest_masked = PLACEHOLDER_RE.sub("\x00", masked)
        rest_orig = EXAMPLE_TEXT
        for s in reversed(spans):
            rest_orig = rest_orig[:s.start] + "\x00" + rest_orig[s.end:]
        assert rest_masked == rest_orig


# Random-document strategy: entity-free filler with planted spans.
_FILLER = st.text(alphabet="abcdefgh .,\n", min_size=0, max_size=12)
_SURFACES = st.sampled_from(
    ["Apple", "Tim Cook", "Vortex-9", "Deep Blue", "Korea", "Q9", "zeta", "Ab Cd"]
)
_TYPES = st.sampled_from(["ORG", "PERSON", "GPE", "DATE", "MONEY", "PRODUCT", "LAW"])


@st.composite
def documents_with_spans(draw):
    # Spans are padded with spaces on both sides: token-aligned, disjoint.
    n = draw(st.integers(min_value=0, max_value=8))
    text_parts = []
    spans = []
    cursor = 0
    for _ in range(n):
        filler = draw(_FILLER) + " "
        text_parts.append(filler)
        cursor += len(filler)
        surface = draw(_SURFACES)
        etype = draw(_TYPES)
        spans.append(EntitySpan(cursor, cursor + len(surface), etype, surface))
        text_parts.append(surface + " ")
        cursor += len(surface) + 1
    text_parts.append(draw(_FILLER))
    return "".join(text_parts), spans


class TestRoundTrip:
    @settings(max_examples=150, deadline=None)
    @given(documents_with_spans())
    def test_full_mask_restores_exactly(self, doc):
        text, spans = doc
        masked, emap = anonymize(text, spans)
        assert restore_text(masked, emap) == text

    @settings(max_examples=80, deadline=None)
    @given(documents_with_spans())
    def test_indices_dense_and_increasing(self, doc):
        text, spans = doc
        masked, _ = anonymize(text, spans)
        first_seen: dict[str, list[int]] = {}
        for m in PLACEHOLDER_RE.finditer(masked):
            etype, idx = m.group(1), int(m.group(2))
            first_seen.setdefault(etype, []).append(idx)
        for etype, indices in first_seen.items():
            firsts = []
            seen = set()
            for i in indices:
                if i not in seen:
                    seen.add(i)
                    firsts.append(i)
            assert firsts == sorted(firsts)
            assert sorted(seen) == list(range(1, len(seen) + 1))


class TestEntityPercentage:
    def test_simple_share(self):
        text = "alpha beta gamma delta epsilon zeta eta theta iota kappa"
        spans = [
            EntitySpan(0, 5, "ORG", "alpha"),
            EntitySpan(6, 10, "ORG", "beta"),
        ]
        assert entity_percentage(text, spans) == pytest.approx(20.0)

    def test_no_spans_is_zero(self):
        assert entity_percentage("some plain text", []) == 0.0

    def test_hand_counted_fixture(self):
        # 16 tokens; spans cover Apple(1) + $,5,billion(3) + Q1,2024(2) + 12,%(2) = 8
        text = "Apple posted revenue of $5 billion in Q1 2024. Growth was 12%."
        spans = [
            EntitySpan(0, 5, "ORG", "Apple"),
            EntitySpan(text.index("$5 billion"), text.index("$5 billion") + 10, "MONEY", "$5 billion"),
            EntitySpan(text.index("Q1 2024"), text.index("Q1 2024") + 7, "DATE", "Q1 2024"),
            EntitySpan(text.index("12%"), text.index("12%") + 3, "PERCENT", "12%"),
        ]
        assert entity_percentage(text, spans) == pytest.approx(50.0)

    def test_anonymized_basis_counts_placeholder_tokens(self):
        masked = "ORG_1 posted revenue of MONEY_1 in DATE_1 . FORM_2 too"
        # tokens: ORG_1 posted revenue of MONEY_1 in DATE_1 . FORM_2 too = 10
        pct = entity_percentage(masked, basis=PercentageBasis.ANONYMIZED)
        assert pct == pytest.approx(40.0)

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError):
            entity_percentage("", [])
        with pytest.raises(ValueError):
            entity_percentage("   ", [])


class TestTokenizers:
    def test_word_tokenizer_offsets_reconstruct(self):
        text = "Apple, Inc. posted $5.2 billion (up 3%)!"
        tokens = WordTokenizer().tokenize(text)
        rebuilt = []
        cursor = 0
        for t in tokens:
            rebuilt.append(text[cursor:t.start])
            rebuilt.append(t.text)
            cursor = t.end
        rebuilt.append(text[cursor:])
        assert "".join(rebuilt) == text
        assert all(not re.search(r"\s", t.text) for t in tokens)

    def test_bpe_vocab_tokenizer(self, tmp_path):
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("rev\nenue\n_rev\nenue\n_was\n_st\nrong\n")
        tok = BpeVocabTokenizer(vocab)
        pieces = [t.text for t in tok.tokenize("revenue was strong")]
        assert pieces == ["rev", "enue", " was", " st", "rong"]
        assert tok.count("revenue was strong") == 5
