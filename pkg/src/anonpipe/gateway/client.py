"""Gateway tying templates, providers, parsing, and the response cache together."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Protocol, Sequence

from ..entities import PLACEHOLDER_RE
from ..tokenizers import Tokenizer, WordTokenizer
from .cache import ResponseCache
from .parsers import ExtractionResult, ResponseParseError, parse_response
from .prompts import TEMPLATE_VERSION, PromptKind, template_text

logger = logging.getLogger(__name__)


class Provider(Protocol):
    config: object

    def complete(self, kind: PromptKind, system: str, user: str) -> tuple[str, object]: ...


@dataclass
class LlmAnonymization:
    """Model-anonymized text plus the placeholder inventory recovered from it."""

    text: str
    placeholders: list[str]  # distinct placeholder strings, first-appearance order
    truncated: bool


@dataclass(frozen=True)
class IdentityTruth:
    ticker: str
    year: int


@dataclass
class RecognitionOutcome:
    firm_hit: bool
    year_hit: bool
    result: ExtractionResult | None  # None when the response failed to parse


class LLMGateway:
    """complete() resolves a prompt kind against one provider, with caching.

    A response is cached only after it parses, so the single automatic re-ask
    on a parse failure is a genuine second request. Two calls with identical
    (kind, template version, payload, provider id) never hit the network
    twice.
    """

    def __init__(
        self,
        provider: Provider,
        cache: ResponseCache | None = None,
        tokenizer: Tokenizer | None = None,
    ):
        self.provider = provider
        self.cache = cache
        self.tokenizer = tokenizer or WordTokenizer()

    def _cache_key(self, kind: PromptKind, payload: str) -> str:
        provider_id = getattr(self.provider.config, "provider_id", "unknown")
        return ResponseCache.key(kind.value, TEMPLATE_VERSION, payload, provider_id)

    def complete(self, kind: PromptKind, payload: str) -> ExtractionResult:
        key = self._cache_key(kind, payload) if self.cache is not None else None
        if key is not None:
            cached = self.cache.get(key)
            if cached is not None:
                return parse_response(kind, cached)

        template = template_text(kind)
        raw, logprobs = self.provider.complete(kind, template, payload)
        try:
            result = parse_response(kind, raw)
        except ResponseParseError:
            logger.warning("unparseable %s response, re-asking once", kind.value)
            raw, logprobs = self.provider.complete(kind, template, payload)
            result = parse_response(kind, raw)  # second failure propagates
        result.logprobs = logprobs
        if key is not None:
            self.cache.put(key, raw)
        return result

    def complete_many(self, kind: PromptKind, payloads: Sequence[str]) -> list[ExtractionResult]:
        """Issue requests concurrently (bounded in-flight); results keep input order."""
        limit = getattr(self.provider.config, "max_in_flight", 1) or 1
        if limit <= 1 or len(payloads) <= 1:
            return [self.complete(kind, p) for p in payloads]
        with ThreadPoolExecutor(max_workers=limit) as pool:
            return list(pool.map(lambda p: self.complete(kind, p), payloads))

    def llm_anonymize(self, text: str) -> LlmAnonymization:
        """Model-driven anonymization: returns output verbatim plus recovered placeholders.

        Truncation is flagged when the output token count reaches the
        provider's output cap. Zero placeholders on non-empty input is logged
        as a warning, not an error.
        """
        if not text:
            return LlmAnonymization(text="", placeholders=[], truncated=False)
        result = self.complete(PromptKind.ANONYMIZE, text)
        out = result.raw_response
        seen: dict[str, None] = {}
        for m in PLACEHOLDER_RE.finditer(out):
            seen.setdefault(m.group(0))
        placeholders = list(seen)
        if not placeholders:
            logger.warning("anonymization output contains no placeholders (input %d chars)", len(text))
        max_tokens = getattr(self.provider.config, "max_output_tokens", None)
        truncated = bool(max_tokens) and self.tokenizer.count(out) >= max_tokens
        if truncated:
            logger.warning("anonymization output hit the %s-token output cap", max_tokens)
        return LlmAnonymization(text=out, placeholders=placeholders, truncated=truncated)

    def recognize_identity(self, anonymized_text: str, truth: IdentityTruth) -> RecognitionOutcome:
        """Ask the model to identify the firm/year behind an anonymized document.

        Firm hit is case-insensitive ticker equality; year hit is exact. A
        response that fails to parse counts as a miss on both.
        """
        if not truth.ticker:
            raise ValueError("truth ticker must be non-empty")
        try:
            result = self.complete(PromptKind.RECOGNIZE, anonymized_text)
        except ResponseParseError as exc:
            logger.warning("identity response unparseable, counting as miss: %s", exc)
            return RecognitionOutcome(firm_hit=False, year_hit=False, result=None)
        firm_hit = (result.ticker_guess or "").upper() == truth.ticker.upper()
        year_hit = result.year_guess == truth.year
        return RecognitionOutcome(firm_hit=firm_hit, year_hit=year_hit, result=result)
