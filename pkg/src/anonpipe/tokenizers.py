"""Pluggable token counting for entity-percentage statistics and length caps."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol


@dataclass(frozen=True)
class Token:
    start: int
    end: int
    text: str


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[Token]: ...

    def count(self, text: str) -> int: ...


class WordTokenizer:
    """Default splitter: maximal word (``\\w+``) or single punctuation tokens.

    Reversible in the sense that tokens plus inter-token gaps reconstruct the
    input exactly; whitespace is never part of a token.
    """

    _TOKEN_RE = re.compile(r"\w+|[^\w\s]")

    def tokenize(self, text: str) -> list[Token]:
        return [Token(m.start(), m.end(), m.group()) for m in self._TOKEN_RE.finditer(text)]

    def count(self, text: str) -> int:
        return sum(1 for _ in self._TOKEN_RE.finditer(text))


class BpeVocabTokenizer:
    """Greedy longest-prefix tokenizer over a subword vocabulary file.

    Approximates byte-pair token counts when a vocabulary is available; one
    vocabulary entry per line, a leading space encoded as an underscore
    prefix ("_rev" matches " rev"). Characters not covered by the vocabulary
    fall back to single-character tokens. This is a counting aid, not a
    faithful BPE encoder.
    """

    def __init__(self, vocab_path: str | Path):
        vocab: set[str] = set()
        max_len = 1
        with open(vocab_path, "r", encoding="utf-8") as fh:
            for raw in fh:
                piece = raw.rstrip("\n")
                if not piece:
                    continue
                if piece.startswith("_"):
                    piece = " " + piece[1:]
                vocab.add(piece)
                max_len = max(max_len, len(piece))
        self._vocab = vocab
        self._max_len = max_len

    def tokenize(self, text: str) -> list[Token]:
        tokens: list[Token] = []
        i = 0
        n = len(text)
        while i < n:
            piece = None
            for length in range(min(self._max_len, n - i), 0, -1):
                cand = text[i:i + length]
                if cand in self._vocab:
                    piece = cand
                    break
            if piece is None:
                piece = text[i]
            tokens.append(Token(i, i + len(piece), piece))
            i += len(piece)
        return tokens

    def count(self, text: str) -> int:
        return len(self.tokenize(text))


def tokens_overlapping(tokens: list[Token], start: int, end: int) -> list[Token]:
    """Tokens fully or partially covered by [start, end)."""
    return [t for t in tokens if t.start < end and t.end > start]
