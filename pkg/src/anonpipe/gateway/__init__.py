from .cache import ResponseCache
from .client import IdentityTruth, LlmAnonymization, LLMGateway, RecognitionOutcome
from .parsers import (
    DEFAULT_ORDINAL_ENCODING,
    ExtractionResult,
    OutlookCategory,
    OutOfRangeError,
    ResponseParseError,
    ordinal_score,
    parse_response,
    sentiment_score,
)
from .prompts import TEMPLATE_VERSION, PromptKind, template_text
from .providers import (
    AuthError,
    HttpChatProvider,
    MockProvider,
    ProviderConfig,
    TransportError,
    payload_hash,
)

__all__ = [
    "AuthError",
    "DEFAULT_ORDINAL_ENCODING",
    "ExtractionResult",
    "HttpChatProvider",
    "IdentityTruth",
    "LLMGateway",
    "LlmAnonymization",
    "MockProvider",
    "OutOfRangeError",
    "OutlookCategory",
    "PromptKind",
    "ProviderConfig",
    "RecognitionOutcome",
    "ResponseCache",
    "ResponseParseError",
    "TEMPLATE_VERSION",
    "TransportError",
    "ordinal_score",
    "parse_response",
    "payload_hash",
    "sentiment_score",
    "template_text",
]
