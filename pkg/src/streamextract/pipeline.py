"""Glue between corpus, embedding and classify stages.

These helpers wire raw documents through stats -> normalization ->
embedding training, and turn candidate annotations into labeled feature
datasets, so the CLI and the evaluation harness share one code path.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .classify import LabeledDataset, featurize_annotation
from .corpus import (CorpusStats, Document, TokenSequence, compute_corpus_stats,
                     normalize_sequence, tokenize)
from .embedding import EmbeddingConfig, VectorStore, train_embeddings
from .recognize import CandidateAnnotation


def build_stats(docs: Iterable[Document], theta: float = 0.01) -> CorpusStats:
    return compute_corpus_stats(docs, theta=theta).freeze()


def build_store(docs: Iterable[Document], stats: CorpusStats,
                cfg: EmbeddingConfig, store: VectorStore | None = None,
                freeze: bool = True) -> VectorStore:
    """Train (or extend) a vector store over normalized token sequences."""
    seqs = (normalize_sequence(tokenize(d), stats) for d in docs)
    if store is None:
        store = VectorStore(cfg, stats=stats)
    store = train_embeddings(seqs, cfg, store=store)
    if freeze:
        store.freeze()
    return store


def normalized_sequences(docs: Iterable[Document],
                         stats: CorpusStats) -> dict[str, TokenSequence]:
    return {d.doc_id: normalize_sequence(tokenize(d), stats) for d in docs}


def featurize_candidates(candidates: list[CandidateAnnotation],
                         seqs: dict[str, TokenSequence], store: VectorStore,
                         u: int, v: int,
                         labeled_only: bool = False) -> LabeledDataset:
    """Feature matrix over candidates; labels map correct=1, incorrect=0.

    With labeled_only, unlabeled candidates are dropped; otherwise they
    are featurized with label 0 placeholders (prediction-time use).
    """
    kept, rows, labels = [], [], []
    for ann in candidates:
        if ann.doc_id not in seqs:
            raise KeyError(f"candidate references unknown document {ann.doc_id!r}")
        if labeled_only and ann.label == "unlabeled":
            continue
        kept.append(ann)
        rows.append(featurize_annotation(ann, seqs[ann.doc_id], store, u, v))
        labels.append(1 if ann.label == "correct" else 0)
    X = np.array(rows) if rows else np.zeros((0, store.cfg.d))
    return LabeledDataset(X=X, y=np.array(labels, dtype=int), annotations=kept)
