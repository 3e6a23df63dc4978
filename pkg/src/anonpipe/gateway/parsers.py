"""Strict parsers for the structured model outputs, plus score arithmetic.

Each prompt kind pins one output grammar. Parsers accept exactly that grammar
modulo whitespace surrounding the whole response; anything else raises
ResponseParseError (out-of-range numerics raise the OutOfRange subclass).
Nothing is ever silently coerced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .prompts import PromptKind


class ResponseParseError(ValueError):
    """Model output does not match the expected grammar."""

    def __init__(self, message: str, raw_response: str):
        super().__init__(f"{message}; raw response: {raw_response!r}")
        self.raw_response = raw_response


class OutOfRangeError(ResponseParseError):
    """Grammar matched but a numeric field violates its range."""


class OutlookCategory(str, Enum):
    INCREASE_SUBSTANTIALLY = "increase substantially"
    INCREASE = "increase"
    NO_CHANGE = "no change"
    DECREASE = "decrease"
    DECREASE_SUBSTANTIALLY = "decrease substantially"
    NO_INFORMATION = "no information"


@dataclass
class ExtractionResult:
    """Parsed fields for one completed prompt; only the kind's fields are set."""

    kind: PromptKind
    raw_response: str
    direction: int | None = None          # sentiment kinds: 0, 1, or None for NA
    magnitude: float | None = None        # sentiment kinds: [0, 1]
    uncertainty: float | None = None      # uncertainty kind: [0, 1]
    category: OutlookCategory | None = None  # investment/economy kinds
    explanation: str | None = None        # investment/economy kinds
    ticker_guess: str | None = None       # recognize kind
    year_guess: int | None = None         # recognize kind
    logprobs: object = field(default=None, repr=False)  # recorded if supplied, never used


_DECIMAL = r"\d+(?:\.\d+)?|\.\d+"

_SENTIMENT_RE = re.compile(
    rf"^\*\*Direction Estimate: (0|1|NA)\*\*,\*\*Magnitude Estimate: ({_DECIMAL})\*\*$"
)
_RECOGNIZE_RE = re.compile(
    r"^\*\*Company Estimate: ([A-Za-z][A-Za-z0-9.\-]{0,9})\*\*,\*\*Year Estimate: (\d{4})\*\*$"
)
_UNCERTAINTY_RE = re.compile(rf"^\*\*Uncertainty Score: ({_DECIMAL})\*\*$")
_OUTLOOK_RE = re.compile(r"^\*\*([^*]+?) - ([^*]+)\*\*$")
_NO_INFORMATION_RE = re.compile(r"^\*\*no information is provided\*\*$", re.IGNORECASE)

_OUTLOOK_CHOICES = {
    "increase substantially": OutlookCategory.INCREASE_SUBSTANTIALLY,
    "increase": OutlookCategory.INCREASE,
    "no change": OutlookCategory.NO_CHANGE,
    "decrease": OutlookCategory.DECREASE,
    "decrease substantially": OutlookCategory.DECREASE_SUBSTANTIALLY,
}


def _unit_interval(token: str, what: str, raw: str) -> float:
    value = float(token)
    if not 0.0 <= value <= 1.0:
        raise OutOfRangeError(f"{what} {value} outside [0, 1]", raw)
    return value


def parse_sentiment(raw: str, kind: PromptKind) -> ExtractionResult:
    m = _SENTIMENT_RE.match(raw.strip())
    if not m:
        raise ResponseParseError("expected '**Direction Estimate: D**,**Magnitude Estimate: M**'", raw)
    direction = None if m.group(1) == "NA" else int(m.group(1))
    magnitude = _unit_interval(m.group(2), "magnitude", raw)
    return ExtractionResult(kind=kind, raw_response=raw, direction=direction, magnitude=magnitude)


def parse_recognize(raw: str) -> ExtractionResult:
    m = _RECOGNIZE_RE.match(raw.strip())
    if not m:
        raise ResponseParseError("expected '**Company Estimate: TIK**,**Year Estimate: Y**'", raw)
    return ExtractionResult(
        kind=PromptKind.RECOGNIZE,
        raw_response=raw,
        ticker_guess=m.group(1),
        year_guess=int(m.group(2)),
    )


def parse_uncertainty(raw: str) -> ExtractionResult:
    m = _UNCERTAINTY_RE.match(raw.strip())
    if not m:
        raise ResponseParseError("expected '**Uncertainty Score: U**'", raw)
    return ExtractionResult(
        kind=PromptKind.UNCERTAINTY,
        raw_response=raw,
        uncertainty=_unit_interval(m.group(1), "uncertainty score", raw),
    )


def parse_outlook(raw: str, kind: PromptKind) -> ExtractionResult:
    stripped = raw.strip()
    if _NO_INFORMATION_RE.match(stripped):
        return ExtractionResult(kind=kind, raw_response=raw, category=OutlookCategory.NO_INFORMATION)
    m = _OUTLOOK_RE.match(stripped)
    if not m:
        raise ResponseParseError("expected '**choice - explanation**'", raw)
    choice = _OUTLOOK_CHOICES.get(m.group(1).strip().lower())
    if choice is None:
        raise ResponseParseError(
            f"choice {m.group(1)!r} not one of {sorted(_OUTLOOK_CHOICES)}", raw
        )
    return ExtractionResult(kind=kind, raw_response=raw, category=choice, explanation=m.group(2).strip())


def parse_response(kind: PromptKind, raw: str) -> ExtractionResult:
    if kind in (PromptKind.SENTIMENT_TRANSCRIPT, PromptKind.SENTIMENT_NEWS):
        return parse_sentiment(raw, kind)
    if kind == PromptKind.RECOGNIZE:
        return parse_recognize(raw)
    if kind == PromptKind.UNCERTAINTY:
        return parse_uncertainty(raw)
    if kind in (PromptKind.INVESTMENT, PromptKind.ECONOMY):
        return parse_outlook(raw, kind)
    if kind == PromptKind.ANONYMIZE:
        # Free text by design; the gateway post-processes it separately.
        return ExtractionResult(kind=kind, raw_response=raw)
    raise ValueError(f"no parser bound for prompt kind {kind!r}")


def sentiment_score(direction: int | None, magnitude: float | None) -> float | None:
    """Signed sentiment in [-1, 1]: (2 * direction - 1) * magnitude.

    A missing (NA) direction propagates to a missing score.
    """
    if direction is None:
        return None
    if direction not in (0, 1):
        raise ValueError(f"direction must be 0 or 1, got {direction!r}")
    if magnitude is None or not 0.0 <= magnitude <= 1.0:
        raise ValueError(f"magnitude must be in [0, 1], got {magnitude!r}")
    return (2 * direction - 1) * magnitude


DEFAULT_ORDINAL_ENCODING: dict[OutlookCategory, int] = {
    OutlookCategory.INCREASE_SUBSTANTIALLY: 2,
    OutlookCategory.INCREASE: 1,
    OutlookCategory.NO_CHANGE: 0,
    OutlookCategory.DECREASE: -1,
    OutlookCategory.DECREASE_SUBSTANTIALLY: -2,
}


def ordinal_score(
    category: OutlookCategory,
    encoding: dict[OutlookCategory, int] | None = None,
) -> int | None:
    """Symmetric integer encoding of the five-level outlook; no-information is missing."""
    if category == OutlookCategory.NO_INFORMATION:
        return None
    table = encoding or DEFAULT_ORDINAL_ENCODING
    return table[category]
