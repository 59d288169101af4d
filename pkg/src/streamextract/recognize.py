"""High-recall candidate recognizers: trie-backed gazetteers and token patterns.

Recognizers only propose spans that literally occur in the token list;
precision is deliberately sacrificed for recall and recovered later by
the contextual classifier.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .corpus import Document, TokenSequence, tokenize

LABELS = ("unlabeled", "correct", "incorrect")


@dataclass(frozen=True)
class RecognizerSpec:
    name: str
    attribute: str
    kind: str  # "gazetteer" | "pattern"
    source: str = ""
    expected_recall: float = 1.0  # documentation only, never enforced


@dataclass(frozen=True, slots=True)
class CandidateAnnotation:
    doc_id: str
    attribute: str
    i: int  # 1-indexed, inclusive
    j: int
    surface: str
    recognizer: str
    label: str = "unlabeled"

    def __post_init__(self):
        if not 1 <= self.i <= self.j:
            raise ValueError(f"invalid span ({self.i}, {self.j})")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")

    def span(self) -> tuple[int, int]:
        return (self.i, self.j)


class Recognizer:
    """Base interface: longest match length starting at a 0-indexed position."""

    def __init__(self, spec: RecognizerSpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def attribute(self) -> str:
        return self.spec.attribute

    def match_length(self, units: list[str], start: int) -> int:
        raise NotImplementedError


class GazetteerRecognizer(Recognizer):
    """Prefix tree over canon token sequences; case-insensitive by construction."""

    _END = ""  # terminal marker key; units are never empty strings

    def __init__(self, spec: RecognizerSpec, entries: list[list[str]]):
        super().__init__(spec)
        if not entries:
            raise ValueError("gazetteer has no entries")
        self._trie: dict = {}
        for entry in entries:
            if not entry:
                raise ValueError("empty gazetteer entry")
            node = self._trie
            for unit in entry:
                node = node.setdefault(unit, {})
            node[self._END] = True

    def match_length(self, units: list[str], start: int) -> int:
        node = self._trie
        best = 0
        for offset in range(start, len(units)):
            node = node.get(units[offset])
            if node is None:
                break
            if self._END in node:
                best = offset - start + 1
        return best


@dataclass(frozen=True)
class TokenPattern:
    name: str
    regex: str
    max_tokens: int = 1
    min_value: int | None = None
    max_value: int | None = None
    _compiled: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be at least 1")
        object.__setattr__(self, "_compiled", re.compile(self.regex))

    def matches(self, joined: str) -> bool:
        if not self._compiled.fullmatch(joined):
            return False
        if self.min_value is not None or self.max_value is not None:
            if not joined.isdigit():
                return False
            value = int(joined)
            if self.min_value is not None and value < self.min_value:
                return False
            if self.max_value is not None and value > self.max_value:
                return False
        return True


class PatternRecognizer(Recognizer):
    """Match short token spans whose concatenated canon satisfies a pattern."""

    def __init__(self, spec: RecognizerSpec, patterns: list[TokenPattern]):
        super().__init__(spec)
        if not patterns:
            raise ValueError("no patterns given")
        self.patterns = list(patterns)
        self._max_tokens = max(p.max_tokens for p in patterns)

    def match_length(self, units: list[str], start: int) -> int:
        best = 0
        limit = min(self._max_tokens, len(units) - start)
        for length in range(1, limit + 1):
            joined = "".join(units[start : start + length])
            if any(p.max_tokens >= length and p.matches(joined) for p in self.patterns):
                best = length
        return best


def build_gazetteer_recognizer(spec: RecognizerSpec, entries) -> GazetteerRecognizer:
    """Build a trie recognizer from raw entry strings (canon-folded, tokenized)."""
    tokenized = [
        tokenize(Document(doc_id="entry", field="text", raw=entry)).units()
        for entry in entries
    ]
    return GazetteerRecognizer(spec, tokenized)


def build_pattern_recognizer(spec: RecognizerSpec, patterns) -> PatternRecognizer:
    """Build a pattern recognizer from TokenPattern objects or config dicts."""
    built = [p if isinstance(p, TokenPattern) else TokenPattern(**p) for p in patterns]
    return PatternRecognizer(spec, built)


def load_gazetteer_file(path) -> list[str]:
    """Newline-delimited entries; '#' starts a comment line."""
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.append(line)
    return entries


def load_pattern_config(path) -> dict:
    """Pattern config JSON: {"attribute": ..., "patterns": [{...}, ...]}."""
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    cfg["patterns"] = [TokenPattern(**p) for p in cfg["patterns"]]
    return cfg


def recognize_spans(rec: Recognizer, t: TokenSequence) -> list[CandidateAnnotation]:
    """All leftmost-longest non-overlapping matches, in document order."""
    units = t.units()
    out = []
    pos = 0
    while pos < len(units):
        length = rec.match_length(units, pos)
        if length > 0:
            surface = " ".join(tok.surface for tok in t.tokens[pos : pos + length])
            out.append(CandidateAnnotation(
                doc_id=t.doc_id, attribute=rec.attribute,
                i=pos + 1, j=pos + length, surface=surface,
                recognizer=rec.name))
            pos += length
        else:
            pos += 1
    return out


def merge_candidates(lists: list[list[CandidateAnnotation]]) -> list[CandidateAnnotation]:
    """Union of per-recognizer candidates, de-duplicated on (doc, attribute, span).

    Adding a recognizer can only add candidates (monotonic). Overlapping
    spans from different recognizers or attributes are all kept.
    """
    seen: dict[tuple, CandidateAnnotation] = {}
    for cands in lists:
        for c in cands:
            seen.setdefault((c.doc_id, c.attribute, c.i, c.j), c)
    return sorted(seen.values(),
                  key=lambda c: (c.doc_id, c.i, c.j, c.attribute, c.recognizer))


def read_candidates(path) -> list[CandidateAnnotation]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                out.append(CandidateAnnotation(
                    doc_id=obj["doc_id"], attribute=obj["attribute"],
                    i=obj["i"], j=obj["j"], surface=obj["surface"],
                    recognizer=obj["recognizer"],
                    label=obj.get("label", "unlabeled")))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: malformed candidate line: {e}") from e
    return out


def write_candidates(path, candidates, scores=None) -> None:
    """JSON-lines candidate/label file; optional per-candidate scores."""
    with open(path, "w", encoding="utf-8") as f:
        for idx, c in enumerate(candidates):
            obj = {"doc_id": c.doc_id, "attribute": c.attribute, "i": c.i, "j": c.j,
                   "surface": c.surface, "recognizer": c.recognizer, "label": c.label}
            if scores is not None:
                obj["score"] = scores[idx]
            f.write(json.dumps(obj, ensure_ascii=False, sort_keys=True))
            f.write("\n")
