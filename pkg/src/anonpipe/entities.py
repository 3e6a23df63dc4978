"""Entity type system, four-category taxonomy, and span/map data structures.

Offsets everywhere are Unicode scalar values (Python ``str`` indices),
start inclusive, end exclusive.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator


class EntityCategory(str, Enum):
    NUMBERS = "NUMBERS"
    PLACES = "PLACES"
    OBJECTS = "OBJECTS"
    OTHERS = "OTHERS"


# The 18 core labels and their fixed category assignment (7/3/3/5).
CATEGORY_OF_LABEL: dict[str, EntityCategory] = {
    "DATE": EntityCategory.NUMBERS,
    "CARDINAL": EntityCategory.NUMBERS,
    "MONEY": EntityCategory.NUMBERS,
    "PERCENT": EntityCategory.NUMBERS,
    "ORDINAL": EntityCategory.NUMBERS,
    "TIME": EntityCategory.NUMBERS,
    "QUANTITY": EntityCategory.NUMBERS,
    "GPE": EntityCategory.PLACES,
    "LOC": EntityCategory.PLACES,
    "FAC": EntityCategory.PLACES,
    "PERSON": EntityCategory.OBJECTS,
    "ORG": EntityCategory.OBJECTS,
    "NORP": EntityCategory.OBJECTS,
    "PRODUCT": EntityCategory.OTHERS,
    "EVENT": EntityCategory.OTHERS,
    "LAW": EntityCategory.OTHERS,
    "WORK_OF_ART": EntityCategory.OTHERS,
    "LANGUAGE": EntityCategory.OTHERS,
}

CORE_LABELS: frozenset[str] = frozenset(CATEGORY_OF_LABEL)

# Extension labels (INDUSTRY, SECTOR, FORM, LINK, ...) are produced only by
# model-driven anonymization and are open-ended: any token of this shape is
# accepted and bucketed as OTHERS.
_EXTENSION_LABEL_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")

# A placeholder token as it appears in anonymized text, e.g. PERSON_1,
# WORK_OF_ART_3, FORM_2. The label part must not itself end in _<digits>.
PLACEHOLDER_RE = re.compile(r"(?<![A-Za-z0-9_])([A-Z][A-Z0-9]*(?:_[A-Z][A-Z0-9]*)*)_([0-9]+)(?![A-Za-z0-9_])")


class TaxonomyError(ValueError):
    """Raised for labels outside the taxonomy (not core, not extension-shaped)."""


def category_of(entity_type: str) -> EntityCategory:
    """Map an entity label to its category.

    Core labels use the fixed 18-label taxonomy; any other all-caps label is
    treated as an extension label and mapped to OTHERS. Anything else is a
    configuration error.
    """
    cat = CATEGORY_OF_LABEL.get(entity_type)
    if cat is not None:
        return cat
    if _EXTENSION_LABEL_RE.match(entity_type or ""):
        return EntityCategory.OTHERS
    raise TaxonomyError(
        f"unknown entity label {entity_type!r}; expected one of "
        f"{sorted(CORE_LABELS)} or an extension label matching [A-Z][A-Z0-9_]*"
    )


ALL_CATEGORIES: frozenset[EntityCategory] = frozenset(EntityCategory)


@dataclass(frozen=True)
class EntitySpan:
    """A located, typed entity occurrence in one document."""

    start: int
    end: int
    entity_type: str
    surface: str

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span range [{self.start}, {self.end})")
        category_of(self.entity_type)  # validates the label

    @property
    def category(self) -> EntityCategory:
        return category_of(self.entity_type)


class SpanIntegrityError(ValueError):
    """A span disagrees with the document it claims to describe."""


def validate_spans(text: str, spans: Iterable[EntitySpan]) -> list[EntitySpan]:
    """Check spans against a document: in-range, surface==slice, sorted, disjoint.

    Returns the spans as a list; raises SpanIntegrityError naming the first
    offending span otherwise.
    """
    out = list(spans)
    prev_end = 0
    for span in out:
        if span.end > len(text):
            raise SpanIntegrityError(f"span {span} ends past document length {len(text)}")
        piece = text[span.start:span.end]
        if piece != span.surface:
            raise SpanIntegrityError(
                f"span {span.entity_type}[{span.start}:{span.end}] surface "
                f"{span.surface!r} does not match document slice {piece!r}"
            )
        if span.start < prev_end:
            raise SpanIntegrityError(f"span {span} overlaps or is out of order")
        prev_end = span.end
    return out


def normalize_surface(surface: str) -> str:
    """Map key normalization: exact case-sensitive text, surrounding whitespace trimmed."""
    return surface.strip()


class EntityMap:
    """Document-global, order-of-appearance mapping from surfaces to placeholders.

    Keys are (entity_type, normalized surface); indices are 1-based and dense
    per type. The placeholder string is ``<TYPE>_<index>``.
    """

    def __init__(self) -> None:
        self._index: dict[tuple[str, str], int] = {}
        self._counters: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._index

    def items(self) -> Iterator[tuple[tuple[str, str], int]]:
        return iter(self._index.items())

    def add(self, entity_type: str, surface: str) -> int:
        """Register an occurrence; returns its (new or existing) index."""
        key = (entity_type, normalize_surface(surface))
        idx = self._index.get(key)
        if idx is None:
            idx = self._counters.get(entity_type, 0) + 1
            self._counters[entity_type] = idx
            self._index[key] = idx
        return idx

    def index_of(self, entity_type: str, surface: str) -> int | None:
        return self._index.get((entity_type, normalize_surface(surface)))

    def placeholder_for(self, entity_type: str, surface: str) -> str:
        idx = self.index_of(entity_type, surface)
        if idx is None:
            raise KeyError(f"({entity_type}, {normalize_surface(surface)!r}) not in entity map")
        return f"{entity_type}_{idx}"

    def surface_of(self, placeholder: str) -> str | None:
        """Inverse lookup: the normalized surface behind a placeholder string."""
        m = PLACEHOLDER_RE.fullmatch(placeholder)
        if not m:
            return None
        etype, idx = m.group(1), int(m.group(2))
        for (t, surf), i in self._index.items():
            if t == etype and i == idx:
                return surf
        return None

    def placeholders(self) -> list[str]:
        """All placeholder strings in insertion (first appearance) order."""
        return [f"{t}_{i}" for (t, _s), i in self._index.items()]

    def to_dict(self) -> dict[str, str]:
        """Serializable view: placeholder -> normalized surface."""
        return {f"{t}_{i}": s for (t, s), i in self._index.items()}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "EntityMap":
        emap = cls()
        # Rebuild in index order per type so counters stay dense.
        entries = []
        for placeholder, surface in data.items():
            m = PLACEHOLDER_RE.fullmatch(placeholder)
            if not m:
                raise ValueError(f"malformed placeholder key {placeholder!r}")
            entries.append((m.group(1), int(m.group(2)), surface))
        entries.sort(key=lambda e: (e[0], e[1]))
        for etype, idx, surface in entries:
            got = emap.add(etype, surface)
            if got != idx:
                raise ValueError(
                    f"non-dense indices for {etype}: expected {got}, file has {idx}"
                )
        return emap

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EntityMap) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"EntityMap({self.to_dict()!r})"


# ---------------------------------------------------------------------------
# Span sidecar files: one JSON record per line, offsets in Unicode scalar
# values. Fields: doc_id, start, end, type, surface.
# ---------------------------------------------------------------------------

class SidecarFormatError(ValueError):
    pass


def write_sidecar(path: str | Path, doc_id: str, spans: Iterable[EntitySpan]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for span in spans:
            fh.write(json.dumps({
                "doc_id": doc_id,
                "start": span.start,
                "end": span.end,
                "type": span.entity_type,
                "surface": span.surface,
            }, ensure_ascii=False) + "\n")


def read_sidecar(path: str | Path) -> dict[str, list[EntitySpan]]:
    """Read a span sidecar file, grouped by doc_id (spans in file order)."""
    out: dict[str, list[EntitySpan]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                span = EntitySpan(
                    start=int(rec["start"]),
                    end=int(rec["end"]),
                    entity_type=str(rec["type"]),
                    surface=str(rec["surface"]),
                )
                doc_id = str(rec["doc_id"])
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise SidecarFormatError(f"{path}: line {lineno}: {exc}") from exc
            out.setdefault(doc_id, []).append(span)
    return out
