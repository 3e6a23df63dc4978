"""Prompt catalog: one versioned template text asset per prompt kind."""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from importlib import resources

TEMPLATE_VERSION = "1"


class PromptKind(str, Enum):
    ANONYMIZE = "anonymize"
    RECOGNIZE = "recognize"
    SENTIMENT_TRANSCRIPT = "sentiment_transcript"
    SENTIMENT_NEWS = "sentiment_news"
    UNCERTAINTY = "uncertainty"
    INVESTMENT = "investment"
    ECONOMY = "economy"


@lru_cache(maxsize=None)
def template_text(kind: PromptKind) -> str:
    ref = resources.files(__package__).joinpath("templates", f"{kind.value}.txt")
    return ref.read_text(encoding="utf-8")
