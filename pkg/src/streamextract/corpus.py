"""Tokenization, corpus statistics and compound-unit normalization.

Documents arrive as raw UTF-8 strings (page text or page title). They are
tokenized into maximal same-category character runs, document frequencies
are counted over the initial corpus, and rare or structural tokens are
collapsed into a small set of compound-unit dummy symbols so that the
embedding stage learns one vector per class instead of one per rare token.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import re

VALID_FIELDS = ("text", "title")

# Alphanumeric runs stay together ("b4u" is one token); everything else
# that is not whitespace forms punctuation/symbol runs.
_TOKEN_RE = re.compile(r"[^\W_]+|(?:[^\w\s]|_)+")

_ASCII_PUNCT = frozenset(string.punctuation)


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    field: str
    raw: str

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be nonempty")
        if self.field not in VALID_FIELDS:
            raise ValueError(f"field must be one of {VALID_FIELDS}, got {self.field!r}")


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    canon: str

    @classmethod
    def from_surface(cls, surface: str) -> "Token":
        return cls(surface=surface, canon=surface.lower())


@dataclass(slots=True)
class TokenSequence:
    """Ordered tokens of one document. Positions are 1-indexed."""

    doc_id: str
    tokens: list[Token]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def unit_at(self, i: int) -> str:
        """Canonical unit at 1-indexed position i."""
        if not 1 <= i <= len(self.tokens):
            raise IndexError(f"position {i} out of range 1..{len(self.tokens)}")
        return self.tokens[i - 1].canon

    def units(self) -> list[str]:
        return [t.canon for t in self.tokens]


class UnitClass(str, Enum):
    PLAIN = "plain"
    HIGH_IDF = "high-idf-units"
    PURE_NUM = "pure-num-units"
    ALPHA_NUM = "alpha-num-units"
    PURE_PUNCT = "pure-punct-units"
    ALPHA_PUNCT = "alpha-punct-units"
    NONASCII = "nonascii-unicode-units"


# The bracket characters are non-ASCII and the tokenizer always splits
# bracket runs from letter runs, so these strings can never collide with
# a real token.
DUMMY_SYMBOLS: dict[UnitClass, str] = {
    UnitClass.HIGH_IDF: "⟦high-idf⟧",
    UnitClass.PURE_NUM: "⟦num⟧",
    UnitClass.ALPHA_NUM: "⟦alnum⟧",
    UnitClass.PURE_PUNCT: "⟦punct⟧",
    UnitClass.ALPHA_PUNCT: "⟦alpha-punct⟧",
    UnitClass.NONASCII: "⟦nonascii⟧",
}

_DUMMY_SET = frozenset(DUMMY_SYMBOLS.values())


def is_dummy_symbol(canon: str) -> bool:
    return canon in _DUMMY_SET


@dataclass
class CorpusStats:
    """Document frequencies over the initial corpus.

    Once frozen, the stats are immutable and unit classes are stable even
    as new documents stream in.
    """

    doc_count: int = 0
    doc_freq: dict[str, int] = field(default_factory=dict)
    theta: float = 0.01
    frozen: bool = False

    def add_sequence(self, seq: TokenSequence) -> None:
        if self.frozen:
            raise RuntimeError("corpus stats are frozen")
        self.doc_count += 1
        for canon in set(t.canon for t in seq.tokens):
            self.doc_freq[canon] = self.doc_freq.get(canon, 0) + 1

    def freeze(self) -> "CorpusStats":
        self.frozen = True
        return self

    def is_rare(self, canon: str) -> bool:
        """True when the unit occurs in fewer than fraction theta of documents."""
        return self.doc_freq.get(canon, 0) < self.theta * self.doc_count

    def save(self, path) -> None:
        payload = {
            "doc_count": self.doc_count,
            "theta": self.theta,
            "doc_freq": dict(sorted(self.doc_freq.items())),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, sort_keys=True)

    @classmethod
    def load(cls, path) -> "CorpusStats":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        return cls(
            doc_count=payload["doc_count"],
            doc_freq=payload["doc_freq"],
            theta=payload["theta"],
            frozen=True,
        )


def tokenize(doc: Document) -> TokenSequence:
    """Split raw text into maximal same-category runs.

    Whitespace separates tokens; within a non-whitespace run, alphanumeric
    runs and punctuation runs are split from each other, e.g.
    "City/Shreveport" -> [city, /, shreveport] while "b4u" stays whole.
    """
    tokens = [Token.from_surface(m.group(0)) for m in _TOKEN_RE.finditer(doc.raw)]
    return TokenSequence(doc_id=doc.doc_id, tokens=tokens)


def compute_corpus_stats(docs: Iterable[Document], theta: float = 0.01) -> CorpusStats:
    """Single-pass document-frequency fold over the initial corpus."""
    stats = CorpusStats(theta=theta)
    for doc in docs:
        stats.add_sequence(tokenize(doc))
    return stats


def classify_token(canon: str, stats: CorpusStats) -> UnitClass:
    """Assign a token its unique compound-unit class.

    Structural classes are checked first (they are corpus-independent),
    then the document-frequency threshold, so the partition is well
    defined for every possible token.
    """
    if not stats.frozen:
        raise RuntimeError("corpus stats must be frozen before classification")
    if not canon:
        raise ValueError("empty token")
    if canon in _DUMMY_SET:
        return UnitClass.PLAIN
    has_alpha = any(c.isalpha() for c in canon)
    has_digit = any(c.isdigit() for c in canon)
    if all(c.isdigit() for c in canon):
        return UnitClass.PURE_NUM
    if has_alpha and has_digit:
        return UnitClass.ALPHA_NUM
    if all(c in _ASCII_PUNCT for c in canon):
        return UnitClass.PURE_PUNCT
    if has_alpha and any(c in _ASCII_PUNCT for c in canon):
        return UnitClass.ALPHA_PUNCT
    if all(ord(c) > 127 for c in canon):
        return UnitClass.NONASCII
    if stats.is_rare(canon):
        return UnitClass.HIGH_IDF
    return UnitClass.PLAIN


def normalize_sequence(seq: TokenSequence, stats: CorpusStats) -> TokenSequence:
    """Replace each compound-class token with its class dummy symbol.

    Length and surfaces are preserved; plain tokens pass through, so the
    operation is idempotent.
    """
    out = []
    for tok in seq.tokens:
        cls = classify_token(tok.canon, stats)
        if cls is UnitClass.PLAIN:
            out.append(tok)
        else:
            out.append(Token(surface=tok.surface, canon=DUMMY_SYMBOLS[cls]))
    return TokenSequence(doc_id=seq.doc_id, tokens=out)


def read_documents(path) -> Iterator[Document]:
    """Read a JSON-lines corpus file, one document object per line."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                yield Document(doc_id=obj["doc_id"], field=obj["field"], raw=obj["raw"])
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: malformed document line: {e}") from e


def write_documents(path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            f.write(json.dumps(
                {"doc_id": doc.doc_id, "field": doc.field, "raw": doc.raw},
                ensure_ascii=False, sort_keys=True))
            f.write("\n")
