"""Evaluation harness: repeated random trials, drift and k sweeps, benchmarks.

Every experiment is deterministic given its base seed: trial t uses seed
base_seed + t for its split, base_seed + t + 1 for oversampling and
base_seed + t + 2 for forest training, so any row of the report can be
reproduced in isolation.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .classify import (ForestConfig, LabeledDataset, oversample_balance,
                       predict_batch, train_classifier)
from .embedding import EmbeddingConfig, train_embeddings
from .pipeline import build_stats, build_store, featurize_candidates, normalized_sequences
from .synth import generate_token_stream

CSV_COLUMNS = ["experiment", "corpus", "attribute", "k", "trial",
               "precision", "recall", "f1"]


@dataclass(frozen=True)
class TrialConfig:
    train_fraction: float = 0.3
    n_trials: int = 10
    base_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0


def compute_prf(tp: int, fp: int, fn: int) -> PRF:
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return PRF(precision=p, recall=r, f1=f1, tp=tp, fp=fp, fn=fn)


def split_dataset(ds: LabeledDataset, fraction: float,
                  seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    """Seeded uniform split: ceil(fraction*N) rows for training."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    n = len(ds)
    if n == 0:
        raise ValueError("dataset is empty")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = math.ceil(fraction * n)
    tr, te = perm[:n_train], perm[n_train:]

    def take(idx):
        anns = [ds.annotations[i] for i in idx] if ds.annotations is not None else None
        return LabeledDataset(X=ds.X[idx], y=ds.y[idx], annotations=anns)

    return take(tr), take(te)


@dataclass
class TrialsResult:
    per_trial: list[PRF] = field(default_factory=list)

    @property
    def mean_precision(self) -> float:
        return float(np.mean([t.precision for t in self.per_trial]))

    @property
    def mean_recall(self) -> float:
        return float(np.mean([t.recall for t in self.per_trial]))

    @property
    def mean_f1(self) -> float:
        return float(np.mean([t.f1 for t in self.per_trial]))


def run_trials(ds: LabeledDataset, trial_cfg: TrialConfig,
               forest_cfg: ForestConfig = ForestConfig(), k: int = 20) -> TrialsResult:
    """n independent split/oversample/train/test rounds, macro-averaged."""
    ds.require_both_classes()
    result = TrialsResult()
    for t in range(trial_cfg.n_trials):
        seed = trial_cfg.base_seed + t
        train, test = split_dataset(ds, trial_cfg.train_fraction, seed)
        train = oversample_balance(train, seed=seed + 1)
        fc = ForestConfig(n_trees=forest_cfg.n_trees, seed=seed + 2)
        model = train_classifier(train, fc, k=k)
        labels, _ = predict_batch(model, test.X)
        pred = np.array([1 if lab == "correct" else 0 for lab in labels])
        tp = int(np.sum((pred == 1) & (test.y == 1)))
        fp = int(np.sum((pred == 1) & (test.y == 0)))
        fn = int(np.sum((pred == 0) & (test.y == 1)))
        result.per_trial.append(compute_prf(tp, fp, fn))
    return result


def drift_experiment(corpora: list, candidates, theta: float,
                     ecfg: EmbeddingConfig, trial_cfg: TrialConfig,
                     forest_cfg: ForestConfig = ForestConfig(),
                     k: int = 20) -> list[dict]:
    """Re-run the trials with representations trained on each nested corpus.

    The candidate set and all seeds are held fixed; only the vector store
    (and its corpus stats) changes between rows.
    """
    rows = []
    for ci, docs in enumerate(corpora):
        stats = build_stats(docs, theta=theta)
        store = build_store(docs, stats, ecfg)
        seqs = normalized_sequences(docs, stats)
        ds = featurize_candidates(candidates, seqs, store,
                                  u=ecfg.u, v=ecfg.v, labeled_only=True)
        res = run_trials(ds, trial_cfg, forest_cfg, k=k)
        rows.append({"corpus": f"C{ci + 1}", "n_docs": len(docs),
                     "result": res, "f1": res.mean_f1})
    return rows


def k_sweep(ds: LabeledDataset, k_values: list[int], trial_cfg: TrialConfig,
            forest_cfg: ForestConfig = ForestConfig()) -> list[dict]:
    """run_trials per k with fixed seeds; output suitable for plotting."""
    rows = []
    for k in k_values:
        if k < 1:
            raise ValueError("k values must be at least 1")
        res = run_trials(ds, trial_cfg, forest_cfg, k=k)
        rows.append({"k": k, "result": res, "f1": res.mean_f1})
    return rows


def runtime_benchmark(sizes: list[int], ecfg: EmbeddingConfig,
                      seed: int = 0, vocab_size: int = 5000,
                      repeats: int = 1) -> dict:
    """Wall-clock embedding-training time per corpus size plus a linear fit.

    With repeats > 1 the minimum over repeats is reported, which damps
    scheduler noise at small corpus sizes.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    rows = []
    for size in sizes:
        docs = generate_token_stream(size, vocab_size=vocab_size, seed=seed)
        elapsed = math.inf
        for _ in range(repeats):
            start = time.perf_counter()
            train_embeddings(docs, ecfg)
            elapsed = min(elapsed, time.perf_counter() - start)
        rows.append({"tokens": size, "seconds": elapsed})
    out = {"rows": rows}
    if len(rows) >= 2:
        x = np.array([r["tokens"] for r in rows], dtype=float)
        y = np.array([r["seconds"] for r in rows], dtype=float)
        slope, intercept = np.polyfit(x, y, 1)
        pred = slope * x + intercept
        ss_res = float(np.sum((y - pred) ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        out["fit"] = {"slope": float(slope), "intercept": float(intercept),
                      "r_squared": 1.0 - ss_res / ss_tot if ss_tot else 1.0}
    return out


def write_results_csv(path, rows: list[dict]) -> None:
    """Emit experiment rows with the standard column set."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in CSV_COLUMNS})


def trials_to_rows(experiment: str, result: TrialsResult, corpus: str = "",
                   attribute: str = "", k: int | str = "") -> list[dict]:
    rows = []
    for t, prf in enumerate(result.per_trial):
        rows.append({"experiment": experiment, "corpus": corpus,
                     "attribute": attribute, "k": k, "trial": t,
                     "precision": f"{prf.precision:.6f}",
                     "recall": f"{prf.recall:.6f}", "f1": f"{prf.f1:.6f}"})
    return rows
