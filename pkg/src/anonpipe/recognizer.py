"""Entity span production: built-in pattern/gazetteer recognizer and external-span ingestion.

The pattern set covers the numeric entity subtypes (dates, money, percents,
ordinals, clock times, quantities with units, bare numerals); everything else
(PERSON/ORG/GPE/LOC/NORP/FAC/PRODUCT/EVENT/LAW/WORK_OF_ART/LANGUAGE) comes
from user-supplied gazetteer term lists. Spans produced by any other tagger
can be piped in through the sidecar format instead.

The pattern set is versioned (PATTERN_VERSION); it makes no equivalence claim
to any statistical tagger.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .entities import (
    PLACEHOLDER_RE,
    EntitySpan,
    SpanIntegrityError,
    category_of,
    read_sidecar,
)

PATTERN_VERSION = "1"

GAZETTEER_TYPES = frozenset({
    "PERSON", "ORG", "GPE", "LOC", "NORP", "FAC",
    "PRODUCT", "EVENT", "LAW", "WORK_OF_ART", "LANGUAGE",
})

_NUM = r"\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?"
_MONTH = (
    r"January|February|March|April|May|June|July|August|September|October|"
    r"November|December"
)
_SMALL = r"a|an|one|two|three|four|five|six|seven|eight|nine|ten"
_UNIT = (
    r"foot|feet|inch(?:es)?|meters?|metres?|miles?|kilometers?|kilometres?|km|"
    r"kg|kilograms?|grams?|tons?|tonnes?|pounds?|ounces?|liters?|litres?|"
    r"gallons?|barrels?|acres?|hectares?|square\s(?:feet|meters?|miles?)|"
    r"megawatts?|gigawatts?|kilowatts?|terabytes?|gigabytes?"
)

# One (type, compiled regex) per rule. Within a type, alternatives are listed
# longest-construct first only for readability; overlap resolution is global
# (longest match wins, ties by start then by this table's order).
_PATTERN_RULES: list[tuple[str, re.Pattern[str]]] = [
    ("MONEY", re.compile(
        rf"[$€£¥]\s?(?:{_NUM})(?:\s?(?:thousand|million|billion|trillion|[kKmMbB]|bn))?"
    )),
    ("MONEY", re.compile(
        rf"\b(?:{_NUM})(?:\s(?:thousand|million|billion|trillion))?"
        r"\s(?:dollars|cents|euros|yen|USD|EUR|GBP|JPY)\b"
    )),
    ("PERCENT", re.compile(
        rf"\b(?:{_NUM})\s?(?:%|percent\b|percentage\spoints?\b)"
    )),
    ("TIME", re.compile(
        r"\b\d{1,2}:\d{2}(?::\d{2})?"
        r"(?:\s?(?:a\.m\.|p\.m\.|am|pm|AM|PM))?"
        r"(?:\s?(?:ET|EST|EDT|CT|CST|CDT|MT|MST|MDT|PT|PST|PDT|GMT|UTC))?"
    )),
    ("TIME", re.compile(r"\b\d{1,2}\s?(?:a\.m\.|p\.m\.|am|pm|AM|PM)\b")),
    ("TIME", re.compile(
        r"\b(?:(?:this|in the)\s)?(?:morning|afternoon|evening|midnight|noon|tonight)\b",
        re.IGNORECASE,
    )),
    ("DATE", re.compile(
        rf"\b(?:Q[1-4]|[1-4]Q)(?:\s(?:of\s)?(?:19|20)\d{{2}})?\b"
    )),
    ("DATE", re.compile(
        r"\b(?:fiscal\s(?:year\s)?|FY\s?)(?:19|20)?\d{2,4}\b", re.IGNORECASE
    )),
    ("DATE", re.compile(
        rf"\b(?:the\s)?(?:{_MONTH})\squarter\b"
    )),
    ("DATE", re.compile(
        rf"\b(?:{_MONTH})(?:\s\d{{1,2}}(?:st|nd|rd|th)?)?(?:,?\s(?:19|20)\d{{2}})?\b"
    )),
    ("DATE", re.compile(
        r"\b(?:the\s)?(?:first|second|third|fourth)\s(?:quarter|half)"
        r"(?:\sof\s(?:19|20)\d{2})?\b",
        re.IGNORECASE,
    )),
    ("DATE", re.compile(
        rf"\b(?:{_SMALL}|\d+)\s(?:day|week|month|quarter|year|decade)s?\s(?:ago|earlier)\b",
        re.IGNORECASE,
    )),
    ("DATE", re.compile(
        r"\b(?:last|next|this|the\spast|the\sprior|the\scoming)\s"
        r"(?:day|week|month|quarter|year|decade)\b",
        re.IGNORECASE,
    )),
    ("DATE", re.compile(r"\bthe\s(?:week|month|quarter|year)\b", re.IGNORECASE)),
    ("DATE", re.compile(r"\b(?:today|yesterday|tomorrow)\b", re.IGNORECASE)),
    ("DATE", re.compile(r"\b(?:19|20)\d{2}\b")),
    ("QUANTITY", re.compile(rf"\b(?:{_NUM})[-\s](?:{_UNIT})\b")),
    ("ORDINAL", re.compile(r"\b\d+(?:st|nd|rd|th)\b")),
    ("ORDINAL", re.compile(
        r"\b(?:first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|"
        r"tenth|eleventh|twelfth)\b",
        re.IGNORECASE,
    )),
    ("CARDINAL", re.compile(rf"\b(?:{_NUM})\b")),
    ("CARDINAL", re.compile(
        r"\b(?:one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|"
        r"dozen|hundred|thousand|million|billion|trillion)\b",
        re.IGNORECASE,
    )),
]

PATTERN_TYPES = frozenset(t for t, _ in _PATTERN_RULES)


class GazetteerFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RecognizerConfig:
    """Recognizer settings: which pattern types run, plus gazetteer terms per type."""

    pattern_types: frozenset[str] = PATTERN_TYPES
    gazetteer: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def with_gazetteer(self, gazetteer: dict[str, Sequence[str]]) -> "RecognizerConfig":
        merged = {k: tuple(v) for k, v in self.gazetteer.items()}
        for etype, terms in gazetteer.items():
            merged[etype] = tuple(dict.fromkeys(tuple(merged.get(etype, ())) + tuple(terms)))
        return RecognizerConfig(pattern_types=self.pattern_types, gazetteer=merged)


def load_gazetteer(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Load gazetteer terms from a TSV file: one ``TYPE<TAB>term`` per line.

    Blank lines and lines starting with ``#`` are skipped. Malformed lines
    raise GazetteerFormatError with the line number.
    """
    terms: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise GazetteerFormatError(
                    f"{path}: line {lineno}: expected 'TYPE<TAB>term', got {line!r}"
                )
            etype, term = parts[0].strip(), parts[1].strip()
            if etype not in GAZETTEER_TYPES:
                raise GazetteerFormatError(
                    f"{path}: line {lineno}: type {etype!r} not one of {sorted(GAZETTEER_TYPES)}"
                )
            terms.setdefault(etype, []).append(term)
    return {k: tuple(dict.fromkeys(v)) for k, v in terms.items()}


def _gazetteer_rules(config: RecognizerConfig) -> list[tuple[str, re.Pattern[str]]]:
    rules = []
    for etype, terms in config.gazetteer.items():
        if not terms:
            continue
        category_of(etype)  # validate label
        alternation = "|".join(re.escape(t) for t in sorted(terms, key=len, reverse=True))
        rules.append((etype, re.compile(rf"(?<!\w)(?:{alternation})(?!\w)")))
    return rules


def _placeholder_blocks(text: str) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in PLACEHOLDER_RE.finditer(text)]


def _resolve_overlaps(candidates: list[tuple[int, int, str, int]]) -> list[tuple[int, int, str]]:
    """Keep the longest span; ties broken by earlier start, then rule priority."""
    ordered = sorted(candidates, key=lambda c: (-(c[1] - c[0]), c[0], c[3]))
    taken: list[tuple[int, int, str]] = []
    occupied: list[tuple[int, int]] = []
    for start, end, etype, _prio in ordered:
        if any(start < e and end > s for s, e in occupied):
            continue
        occupied.append((start, end))
        taken.append((start, end, etype))
    taken.sort(key=lambda c: c[0])
    return taken


def recognize(text: str, config: RecognizerConfig | None = None) -> list[EntitySpan]:
    """Find entity spans in a document.

    Gazetteer matches outrank pattern matches at equal length; all output
    spans are non-overlapping and sorted by start. Placeholder tokens already
    present in the text ("<TYPE>_<n>") are never matched.
    """
    if config is None:
        config = RecognizerConfig()
    if not text:
        return []

    blocks = _placeholder_blocks(text)
    candidates: list[tuple[int, int, str, int]] = []
    prio = 0
    for etype, rx in _gazetteer_rules(config):
        for m in rx.finditer(text):
            candidates.append((m.start(), m.end(), etype, prio))
        prio += 1
    for etype, rx in _PATTERN_RULES:
        if etype not in config.pattern_types:
            continue
        for m in rx.finditer(text):
            candidates.append((m.start(), m.end(), etype, prio))
        prio += 1

    if blocks:
        candidates = [
            c for c in candidates
            if not any(c[0] < be and c[1] > bs for bs, be in blocks)
        ]

    return [
        EntitySpan(start=s, end=e, entity_type=t, surface=text[s:e])
        for s, e, t in _resolve_overlaps(candidates)
    ]


def load_external_spans(
    text: str,
    spans: Iterable[EntitySpan] | str | Path,
    doc_id: str | None = None,
) -> list[EntitySpan]:
    """Validate and normalize externally produced spans for one document.

    Accepts an iterable of spans or a sidecar file path (``doc_id`` selects
    the document when reading a file). Offsets must lie inside the text and
    each surface must equal its slice; overlaps are resolved by keeping the
    longer span, ties by earlier start.
    """
    if isinstance(spans, (str, Path)):
        by_doc = read_sidecar(spans)
        if doc_id is None:
            if len(by_doc) != 1:
                raise SpanIntegrityError(
                    f"sidecar {spans} holds {len(by_doc)} documents; pass doc_id"
                )
            span_list = next(iter(by_doc.values()))
        else:
            span_list = by_doc.get(doc_id, [])
    else:
        span_list = list(spans)

    for span in span_list:
        if span.end > len(text):
            raise SpanIntegrityError(f"span {span} ends past document length {len(text)}")
        piece = text[span.start:span.end]
        if piece != span.surface:
            raise SpanIntegrityError(
                f"span {span.entity_type}[{span.start}:{span.end}] surface "
                f"{span.surface!r} does not match document slice {piece!r}"
            )

    resolved = _resolve_overlaps([(s.start, s.end, s.entity_type, i)
                                  for i, s in enumerate(span_list)])
    return [EntitySpan(start=s, end=e, entity_type=t, surface=text[s:e])
            for s, e, t in resolved]
