"""Global entity mapping, placeholder substitution, and entity statistics.

Substitution is single-pass right-to-left so earlier offsets stay valid, and
it touches only span ranges: every character outside the selected spans is
copied through unchanged. Given the map, full-category anonymization is
reversible (see restore_text).
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Sequence

from .entities import (
    ALL_CATEGORIES,
    PLACEHOLDER_RE,
    EntityCategory,
    EntityMap,
    EntitySpan,
    category_of,
    normalize_surface,
)
from .tokenizers import Tokenizer, WordTokenizer, tokens_overlapping


class PercentageBasis(str, Enum):
    RAW = "raw"
    ANONYMIZED = "anonymized"


def build_entity_map(spans: Sequence[EntitySpan]) -> EntityMap:
    """Assign placeholder indices by order of appearance.

    The first occurrence of each (type, normalized surface) gets the next
    index for that type; repeats reuse it. Spans must already be sorted and
    non-overlapping.
    """
    emap = EntityMap()
    for span in spans:
        emap.add(span.entity_type, span.surface)
    return emap


def apply_map(
    text: str,
    spans: Sequence[EntitySpan],
    emap: EntityMap,
    categories: Iterable[EntityCategory] | None = None,
) -> str:
    """Replace spans in the selected categories with their placeholders.

    ``categories=None`` selects all four. Only the whitespace-trimmed core of
    each span is replaced, so any surrounding whitespace captured by a sloppy
    span survives verbatim and restoration stays exact.
    """
    selected = ALL_CATEGORIES if categories is None else frozenset(categories)
    if not selected:
        return text

    out = text
    for span in reversed(spans):
        if category_of(span.entity_type) not in selected:
            continue
        idx = emap.index_of(span.entity_type, span.surface)
        if idx is None:
            raise KeyError(
                f"span ({span.entity_type}, {normalize_surface(span.surface)!r}) "
                "missing from entity map"
            )
        lead = len(span.surface) - len(span.surface.lstrip())
        trail = len(span.surface) - len(span.surface.rstrip())
        start = span.start + lead
        end = span.end - trail
        out = out[:start] + f"{span.entity_type}_{idx}" + out[end:]
    return out


def apply_map_with_spans(
    text: str,
    spans: Sequence[EntitySpan],
    emap: EntityMap,
    categories: Iterable[EntityCategory] | None = None,
) -> tuple[str, list[EntitySpan]]:
    """apply_map plus the surviving spans re-offset into the masked text.

    Sequential selective masking composes through this: feed the returned
    text and spans back in with another category set.
    """
    selected = ALL_CATEGORIES if categories is None else frozenset(categories)
    parts: list[str] = []
    survivors: list[EntitySpan] = []
    cursor = 0
    delta = 0
    for span in spans:
        if category_of(span.entity_type) in selected:
            idx = emap.index_of(span.entity_type, span.surface)
            if idx is None:
                raise KeyError(
                    f"span ({span.entity_type}, {normalize_surface(span.surface)!r}) "
                    "missing from entity map"
                )
            lead = len(span.surface) - len(span.surface.lstrip())
            trail = len(span.surface) - len(span.surface.rstrip())
            start, end = span.start + lead, span.end - trail
            placeholder = f"{span.entity_type}_{idx}"
            parts.append(text[cursor:start])
            parts.append(placeholder)
            cursor = end
            delta += len(placeholder) - (end - start)
        else:
            survivors.append(EntitySpan(
                span.start + delta, span.end + delta, span.entity_type, span.surface
            ))
    parts.append(text[cursor:])
    return "".join(parts), survivors


def restore_text(anonymized: str, emap: EntityMap) -> str:
    """Substitute placeholders back with their mapped surfaces.

    Placeholder tokens without a map entry are left untouched.
    """
    def _sub(m):
        surface = emap.surface_of(m.group(0))
        return m.group(0) if surface is None else surface

    return PLACEHOLDER_RE.sub(_sub, anonymized)


def anonymize(
    text: str,
    spans: Sequence[EntitySpan],
    categories: Iterable[EntityCategory] | None = None,
) -> tuple[str, EntityMap]:
    """Convenience wrapper: build the map over all spans, then apply it."""
    emap = build_entity_map(spans)
    return apply_map(text, spans, emap, categories), emap


def entity_percentage(
    text: str,
    spans: Sequence[EntitySpan] | None = None,
    basis: PercentageBasis = PercentageBasis.RAW,
    tokenizer: Tokenizer | None = None,
) -> float:
    """Share of tokens attributable to entities, in percent.

    RAW basis: tokens fully or partially covered by a span over total tokens
    of the raw text. ANONYMIZED basis: tokens overlapping placeholder
    occurrences over total tokens of the (already anonymized) text; any
    "<LABEL>_<n>" token counts, extension labels included.
    """
    tok = tokenizer or WordTokenizer()
    tokens = tok.tokenize(text)
    if not tokens:
        raise ValueError("entity percentage undefined for a token-less document")

    if basis == PercentageBasis.RAW:
        ranges = [(s.start, s.end) for s in (spans or [])]
    else:
        ranges = [(m.start(), m.end()) for m in PLACEHOLDER_RE.finditer(text)]

    covered: set[int] = set()
    for start, end in ranges:
        for t in tokens_overlapping(tokens, start, end):
            covered.add(t.start)
    return 100.0 * len(covered) / len(tokens)
