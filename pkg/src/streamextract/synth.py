"""Deterministic synthetic corpora with planted attributes and gold labels.

Each document is a run of filler tokens into which attribute occurrences
are planted: a surface from the attribute's word list wrapped either in a
positive-context or a misleading negative-context token pool. The emitted
gazetteers contain every planted surface (plus unseen distractors), so
recognizer recall on gold spans is 1.0 by construction and classifier
quality is the only variable under test. Context pools can be disjoint
(easy) or overlapping (hard) via the shared_pool knob.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Document, write_documents
from .recognize import CandidateAnnotation, write_candidates

# Each entry must tokenize to exactly one token (single same-category run).
OBFUSCATION_TOKENS = ["♥♥", "!!", "xo9", "§§", "??", "4u2", "٤٢"]


def _word(prefix: str, idx: int) -> str:
    """Letter-only word so fillers and pools stay in the plain unit class."""
    s = ""
    idx += 1
    while idx:
        idx, rem = divmod(idx - 1, 26)
        s = chr(97 + rem) + s
    return prefix + s


@dataclass
class SynthSpec:
    n_docs: int = 100
    doc_len: int = 40
    attributes: tuple[str, ...] = ("city", "name")
    surfaces_per_attr: int = 20
    multi_token_surfaces: int = 2
    distractors_per_attr: int = 30
    plain_vocab: int = 200
    rare_per_doc: int = 1
    pos_pool: int = 12
    neg_pool: int = 12
    shared_pool: int = 0  # context tokens drawn by both sides; 0 = fully separable
    plant_prob: float = 0.9
    noise_rate: float = 0.0  # stray unlabeled surface occurrences per doc
    obfuscation_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_docs < 1 or self.doc_len < 4:
            raise ValueError("need at least 1 document of at least 4 tokens")
        if not self.attributes:
            raise ValueError("at least one attribute required")
        if self.surfaces_per_attr < 1 or self.pos_pool < 1 or self.neg_pool < 1:
            raise ValueError("surface and context pools must be nonempty")
        for rate in (self.plant_prob, self.noise_rate, self.obfuscation_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("rates must be in [0, 1]")


@dataclass
class SynthCorpus:
    documents: list[Document]
    gold: list[CandidateAnnotation]
    gazetteers: dict[str, list[str]]
    token_count: int = 0

    def write(self, outdir) -> dict[str, Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = {"corpus": outdir / "corpus.jsonl", "gold": outdir / "gold.jsonl"}
        write_documents(paths["corpus"], self.documents)
        write_candidates(paths["gold"], self.gold)
        for attr, entries in self.gazetteers.items():
            p = outdir / f"gazetteer_{attr}.txt"
            p.write_text("# synthetic gazetteer\n" + "\n".join(entries) + "\n",
                         encoding="utf-8")
            paths[f"gazetteer_{attr}"] = p
        return paths


def _attribute_lexicon(spec: SynthSpec, attr_idx: int, attr: str):
    surfaces = []
    for s in range(spec.surfaces_per_attr):
        if s < spec.multi_token_surfaces:
            surfaces.append(f"{_word(attr + 'ent', 2 * s)} {_word(attr + 'ent', 2 * s + 1)}")
        else:
            surfaces.append(_word(attr + "ent", spec.multi_token_surfaces + s))
    distractors = [_word(attr + "dis", i) for i in range(spec.distractors_per_attr)]
    shared = [_word(attr + "ctx", i) for i in range(spec.shared_pool)]
    pos = [_word(attr + "pos", i) for i in range(spec.pos_pool - spec.shared_pool)] + shared
    neg = [_word(attr + "neg", i) for i in range(spec.neg_pool - spec.shared_pool)] + shared
    return surfaces, distractors, pos, neg


def generate_corpus(spec: SynthSpec) -> SynthCorpus:
    """Deterministic corpus, gold labels and gazetteers for the given spec."""
    fillers = [_word("fil", i) for i in range(spec.plain_vocab)]
    lexicons = {attr: _attribute_lexicon(spec, ai, attr)
                for ai, attr in enumerate(spec.attributes)}

    ss = np.random.SeedSequence(spec.seed)
    doc_seeds = ss.spawn(spec.n_docs)

    documents, gold = [], []
    rare_counter = 0
    token_count = 0
    for di in range(spec.n_docs):
        rng = np.random.default_rng(doc_seeds[di])
        doc_id = f"doc{di:06d}"
        base = [fillers[i] for i in rng.integers(0, len(fillers), size=spec.doc_len)]
        for _ in range(spec.rare_per_doc):
            base[int(rng.integers(0, len(base)))] = _word("rare", rare_counter)
            rare_counter += 1
        for k in range(len(base)):
            if rng.random() < spec.obfuscation_rate:
                base[k] = OBFUSCATION_TOKENS[int(rng.integers(0, len(OBFUSCATION_TOKENS)))]
        if rng.random() < spec.noise_rate:
            attr = spec.attributes[int(rng.integers(0, len(spec.attributes)))]
            stray = lexicons[attr][0][int(rng.integers(0, spec.surfaces_per_attr))]
            at = int(rng.integers(0, len(base) + 1))
            base[at:at] = stray.split()

        # One planted occurrence per attribute (at most), positive or negative.
        plants = []
        for attr in spec.attributes:
            if rng.random() >= spec.plant_prob:
                continue
            surfaces, _, pos, neg = lexicons[attr]
            positive = bool(rng.random() < 0.5)
            pool = pos if positive else neg
            surface = surfaces[int(rng.integers(0, len(surfaces)))]
            ctx = [pool[i] for i in rng.integers(0, len(pool), size=4)]
            segment = ctx[:2] + surface.split() + ctx[2:]
            plants.append((int(rng.integers(0, len(base) + 1)), attr, surface,
                           segment, positive))
        plants.sort(key=lambda p: p[0])

        tokens: list[str] = []
        cursor = 0
        for insert_at, attr, surface, segment, positive in plants:
            tokens.extend(base[cursor:insert_at])
            cursor = insert_at
            start = len(tokens) + 2 + 1  # after the two left-context tokens, 1-indexed
            tokens.extend(segment)
            n_surface = len(surface.split())
            gold.append(CandidateAnnotation(
                doc_id=doc_id, attribute=attr, i=start, j=start + n_surface - 1,
                surface=surface, recognizer=f"synth-{attr}",
                label="correct" if positive else "incorrect"))
        tokens.extend(base[cursor:])

        token_count += len(tokens)
        documents.append(Document(doc_id=doc_id, field="text", raw=" ".join(tokens)))

    gazetteers = {attr: sorted(lex[0]) + sorted(lex[1])
                  for attr, lex in lexicons.items()}
    return SynthCorpus(documents=documents, gold=gold, gazetteers=gazetteers,
                       token_count=token_count)


def generate_token_stream(target_tokens: int, vocab_size: int = 5000,
                          doc_len: int = 200, seed: int = 0) -> list[list[str]]:
    """Plain unit-string documents totalling target_tokens (exact).

    Used by the runtime benchmark, where only embedding-training speed is
    of interest and documents can bypass tokenization.
    """
    if target_tokens < 1:
        raise ValueError("target_tokens must be positive")
    vocab = [_word("tok", i) for i in range(vocab_size)]
    rng = np.random.default_rng(seed)
    docs = []
    remaining = target_tokens
    while remaining > 0:
        n = min(doc_len, remaining)
        docs.append([vocab[i] for i in rng.integers(0, vocab_size, size=n)])
        remaining -= n
    return docs
