import json

import pytest

from anonpipe.entities import (
    CATEGORY_OF_LABEL,
    CORE_LABELS,
    PLACEHOLDER_RE,
    EntityCategory,
    EntityMap,
    EntitySpan,
    SidecarFormatError,
    SpanIntegrityError,
    TaxonomyError,
    category_of,
    normalize_surface,
    read_sidecar,
    validate_spans,
    write_sidecar,
)


class TestTaxonomy:
    def test_core_partition_sizes(self):
        sizes = {cat: 0 for cat in EntityCategory}
        for label in CORE_LABELS:
            sizes[category_of(label)] += 1
        assert sizes == {
            EntityCategory.NUMBERS: 7,
            EntityCategory.PLACES: 3,
            EntityCategory.OBJECTS: 3,
            EntityCategory.OTHERS: 5,
        }
        assert len(CORE_LABELS) == 18

    def test_known_assignments(self):
        assert category_of("MONEY") == EntityCategory.NUMBERS
        assert category_of("GPE") == EntityCategory.PLACES
        assert category_of("PERSON") == EntityCategory.OBJECTS
        assert category_of("LAW") == EntityCategory.OTHERS

    @pytest.mark.parametrize("label", ["INDUSTRY", "SECTOR", "FORM", "LINK", "SOME_NEW_TAG"])
    def test_extension_labels_bucket_as_others(self, label):
        assert category_of(label) == EntityCategory.OTHERS

    @pytest.mark.parametrize("label", ["banana", "", "Person", "ORG-1"])
    def test_unknown_labels_rejected_with_valid_list(self, label):
        with pytest.raises(TaxonomyError) as err:
            category_of(label)
        assert "DATE" in str(err.value)

    def test_total_and_pure(self):
        for label in CORE_LABELS:
            assert category_of(label) is category_of(label)
        assert set(CATEGORY_OF_LABEL.values()) == set(EntityCategory)


class TestSpans:
    def test_surface_must_match_slice(self):
        text = "Apple said hi"
        validate_spans(text, [EntitySpan(0, 5, "ORG", "Apple")])
        with pytest.raises(SpanIntegrityError, match="Aple"):
            validate_spans(text, [EntitySpan(0, 5, "ORG", "Aple")])

    def test_out_of_range_and_overlap(self):
        text = "Apple said hi"
        with pytest.raises(SpanIntegrityError):
            validate_spans(text, [EntitySpan(10, 99, "ORG", "x" * 89)])
        with pytest.raises(SpanIntegrityError):
            validate_spans(text, [
                EntitySpan(0, 5, "ORG", "Apple"),
                EntitySpan(3, 8, "ORG", "le sa"),
            ])

    def test_invalid_ranges_rejected_at_construction(self):
        with pytest.raises(ValueError):
            EntitySpan(5, 5, "ORG", "")
        with pytest.raises(ValueError):
            EntitySpan(-1, 3, "ORG", "abc")


class TestEntityMap:
    def test_order_of_appearance_indices(self):
        emap = EntityMap()
        assert emap.add("ORG", "Apple") == 1
        assert emap.add("PERSON", "Tim Cook") == 1
        assert emap.add("PERSON", "Luca Maestri") == 2
        assert emap.add("ORG", "Apple") == 1  # repeat reuses
        assert emap.placeholder_for("PERSON", "Luca Maestri") == "PERSON_2"
        assert emap.to_dict() == {
            "ORG_1": "Apple",
            "PERSON_1": "Tim Cook",
            "PERSON_2": "Luca Maestri",
        }

    def test_normalization_trims_whitespace_only(self):
        emap = EntityMap()
        emap.add("ORG", "  Apple ")
        assert emap.index_of("ORG", "Apple") == 1
        assert emap.index_of("ORG", "apple") is None  # case-sensitive
        assert normalize_surface(" Apple Inc. ") == "Apple Inc."

    def test_roundtrip_serialization(self):
        emap = EntityMap()
        for etype, surf in [("ORG", "Apple"), ("DATE", "Today"), ("DATE", "Q1")]:
            emap.add(etype, surf)
        clone = EntityMap.from_dict(emap.to_dict())
        assert clone == emap

    def test_from_dict_rejects_gaps(self):
        with pytest.raises(ValueError, match="non-dense"):
            EntityMap.from_dict({"ORG_2": "Apple"})

    def test_empty(self):
        assert len(EntityMap()) == 0
        assert EntityMap().to_dict() == {}


class TestPlaceholderPattern:
    @pytest.mark.parametrize("token", ["PERSON_1", "WORK_OF_ART_12", "FORM_2", "LINK_9"])
    def test_matches(self, token):
        assert PLACEHOLDER_RE.fullmatch(token)

    @pytest.mark.parametrize("token", ["person_1", "PERSON", "PERSON_", "_1", "PERSON 1"])
    def test_rejects(self, token):
        assert PLACEHOLDER_RE.fullmatch(token) is None


class TestSidecar:
    def test_write_read_roundtrip(self, tmp_path):
        text = "Apple said hi on Tuesday"
        spans = [EntitySpan(0, 5, "ORG", "Apple"), EntitySpan(17, 24, "DATE", "Tuesday")]
        path = tmp_path / "spans.jsonl"
        write_sidecar(path, "doc1", spans)
        loaded = read_sidecar(path)
        assert loaded == {"doc1": spans}

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"doc_id": "d", "start": 0, "end": 5, "type": "ORG", "surface": "Apple"}\nnot json\n')
        with pytest.raises(SidecarFormatError, match="line 2"):
            read_sidecar(path)

    def test_missing_field_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"doc_id": "d", "start": 0, "end": 5, "type": "ORG"}) + "\n")
        with pytest.raises(SidecarFormatError, match="line 1"):
            read_sidecar(path)
