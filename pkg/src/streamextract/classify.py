"""Supervised contextual classification of candidate annotations.

A candidate's feature vector is the l2-normalized unweighted sum of the
representation vectors of the tokens surrounding its span. Training runs
ANOVA-F k-best feature selection followed by a small random forest
(Gini splits, bootstrap per tree), built from scratch so that models are
deterministic for a given seed and serialize exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import TokenSequence
from .embedding import VectorStore
from .recognize import CandidateAnnotation

POSITIVE, NEGATIVE = 1, 0


@dataclass
class LabeledDataset:
    """Feature matrix with binary labels (1 = correct, 0 = incorrect)."""

    X: np.ndarray  # (n, dims)
    y: np.ndarray  # (n,) int
    annotations: list[CandidateAnnotation] | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y shapes disagree")

    def __len__(self) -> int:
        return len(self.y)

    def require_both_classes(self) -> None:
        if len(np.unique(self.y)) < 2:
            raise ValueError("dataset must contain both classes")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")


def featurize_annotation(ann: CandidateAnnotation, t: TokenSequence,
                         store: VectorStore, u: int, v: int) -> np.ndarray:
    """Contextual feature vector for one candidate.

    Sums the stored representation vectors of the u tokens before the span
    and the v tokens after it (the span itself excluded, boundaries
    clamped), then l2-normalizes. Units absent from the store contribute
    zero; an all-zero sum is returned as-is.
    """
    n = len(t)
    if not (1 <= ann.i <= ann.j <= n):
        raise ValueError(f"span ({ann.i}, {ann.j}) invalid for document of length {n}")
    positions = list(range(max(ann.i - u, 1), ann.i)) + \
                list(range(ann.j + 1, min(ann.j + v, n) + 1))
    out = np.zeros(store.cfg.d)
    for pos in positions:
        unit = t.unit_at(pos)
        if unit in store:
            out += store.vector(unit)
    norm = np.linalg.norm(out)
    if norm > 0:
        out /= norm
    return out


def anova_f_scores(ds: LabeledDataset) -> np.ndarray:
    """Per-feature one-way ANOVA F statistic between the two classes.

    Zero within-class variance yields +inf when the class means differ
    and 0 for a constant feature.
    """
    ds.require_both_classes()
    X, y = ds.X, ds.y
    n = len(y)
    groups = [X[y == c] for c in (NEGATIVE, POSITIVE)]
    grand = X.mean(axis=0)
    ssb = sum(len(g) * (g.mean(axis=0) - grand) ** 2 for g in groups)
    ssw = sum(((g - g.mean(axis=0)) ** 2).sum(axis=0) for g in groups)
    msb = ssb / (2 - 1)
    msw = ssw / (n - 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = msb / msw
    f[np.isnan(f)] = 0.0  # 0/0: constant feature
    return f


def select_k_best(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ascending; ties keep the lower index."""
    if k < 1:
        raise ValueError("k must be at least 1")
    scores = np.asarray(scores)
    if k >= scores.shape[0]:
        return np.arange(scores.shape[0])
    order = np.argsort(-scores, kind="stable")  # stable: equal scores by index
    return np.sort(order[:k])


def oversample_balance(ds: LabeledDataset, seed: int) -> LabeledDataset:
    """Duplicate minority-class rows (sampled with replacement) until balanced.

    All original rows are retained; apply to the training split only.
    """
    ds.require_both_classes()
    counts = np.bincount(ds.y, minlength=2)
    minority = int(np.argmin(counts))
    deficit = int(abs(counts[1] - counts[0]))
    if deficit == 0:
        return ds
    rng = np.random.default_rng(seed)
    pool = np.flatnonzero(ds.y == minority)
    extra = rng.choice(pool, size=deficit, replace=True)
    idx = np.concatenate([np.arange(len(ds)), extra])
    anns = None
    if ds.annotations is not None:
        anns = [ds.annotations[i] for i in idx]
    return LabeledDataset(X=ds.X[idx], y=ds.y[idx], annotations=anns)


def gini_impurity(class_counts) -> float:
    """1 - sum of squared class fractions."""
    counts = np.asarray(class_counts, dtype=float)
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ValueError("counts must not all be zero")
    return float(1.0 - np.sum((counts / total) ** 2))


@dataclass
class TreeNode:
    # Internal node: feature/threshold plus children. Leaf: class counts only.
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: tuple[int, int] | None = None  # (neg, pos) at leaves

    def is_leaf(self) -> bool:
        return self.counts is not None

    def to_dict(self) -> dict:
        if self.is_leaf():
            return {"counts": list(self.counts)}
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "TreeNode":
        if "counts" in obj:
            return cls(counts=tuple(obj["counts"]))
        return cls(feature=obj["feature"], threshold=obj["threshold"],
                   left=cls.from_dict(obj["left"]), right=cls.from_dict(obj["right"]))


def best_split(X: np.ndarray, y: np.ndarray, feature_ids: np.ndarray):
    """Best Gini-gain split among the given features.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Returns (feature, threshold) or None when no split separates
    the node. Ties keep the first feature in drawn order and the lowest
    threshold, so tree construction is deterministic.
    """
    n = len(y)
    best = None
    best_cost = math.inf
    for f in feature_ids:
        vals = X[:, f]
        order = np.argsort(vals, kind="stable")
        sv, sy = vals[order], y[order]
        distinct = np.flatnonzero(sv[1:] > sv[:-1])  # split after these positions
        if distinct.size == 0:
            continue
        pos_prefix = np.cumsum(sy)
        n_left = distinct + 1
        n_right = n - n_left
        pos_left = pos_prefix[distinct]
        pos_right = pos_prefix[-1] - pos_left
        gini_left = 1.0 - (pos_left / n_left) ** 2 - (1 - pos_left / n_left) ** 2
        gini_right = 1.0 - (pos_right / n_right) ** 2 - (1 - pos_right / n_right) ** 2
        cost = (n_left * gini_left + n_right * gini_right) / n
        arg = int(np.argmin(cost))  # lowest threshold on ties
        if cost[arg] < best_cost:
            best_cost = cost[arg]
            cut = distinct[arg]
            best = (int(f), float((sv[cut] + sv[cut + 1]) / 2.0))
    return best


def _grow_tree(X: np.ndarray, y: np.ndarray, m_features: int,
               rng: np.random.Generator) -> TreeNode:
    counts = (int(np.sum(y == NEGATIVE)), int(np.sum(y == POSITIVE)))
    if len(y) < 2 or counts[0] == 0 or counts[1] == 0:
        return TreeNode(counts=counts)
    feature_ids = rng.choice(X.shape[1], size=m_features, replace=False)
    split = best_split(X, y, feature_ids)
    if split is None:
        return TreeNode(counts=counts)
    f, threshold = split
    mask = X[:, f] < threshold
    return TreeNode(feature=f, threshold=threshold,
                    left=_grow_tree(X[mask], y[mask], m_features, rng),
                    right=_grow_tree(X[~mask], y[~mask], m_features, rng))


class RandomForest:
    """Bagged CART trees with Gini splits and sqrt-feature sampling."""

    def __init__(self, trees: list[TreeNode], n_features: int):
        self.trees = trees
        self.n_features = n_features

    @classmethod
    def train(cls, X: np.ndarray, y: np.ndarray, cfg: ForestConfig) -> "RandomForest":
        n, dims = X.shape
        m_features = max(1, math.floor(math.sqrt(dims)))
        # Independent per-tree streams so parallel training would match serial.
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)
        trees = []
        for seq in seeds:
            rng = np.random.default_rng(seq)
            sample = rng.integers(0, n, size=n)
            trees.append(_grow_tree(X[sample], y[sample], m_features, rng))
        return cls(trees, dims)

    def score_one(self, x: np.ndarray) -> float:
        total = 0.0
        for tree in self.trees:
            node = tree
            while not node.is_leaf():
                node = node.left if x[node.feature] < node.threshold else node.right
            neg, pos = node.counts
            total += pos / (neg + pos)
        return total / len(self.trees)


@dataclass
class TrainedExtractor:
    """Feature-selection mask + forest for one attribute."""

    attribute: str
    selected: np.ndarray  # strictly increasing indices into the d-dim space
    forest: RandomForest
    input_dim: int
    u: int = 2
    v: int = 2
    forest_config: ForestConfig = field(default_factory=ForestConfig)

    def save(self, path) -> None:
        payload = {
            "format_version": 1,
            "attribute": self.attribute,
            "input_dim": self.input_dim,
            "selected": [int(i) for i in self.selected],
            "window": [self.u, self.v],
            "forest_config": {"n_trees": self.forest_config.n_trees,
                              "seed": self.forest_config.seed},
            "trees": [t.to_dict() for t in self.forest.trees],
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, sort_keys=True)

    @classmethod
    def load(cls, path) -> "TrainedExtractor":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        selected = np.array(payload["selected"], dtype=int)
        forest = RandomForest([TreeNode.from_dict(t) for t in payload["trees"]],
                              n_features=len(selected))
        fc = ForestConfig(**payload["forest_config"])
        return cls(attribute=payload["attribute"], selected=selected, forest=forest,
                   input_dim=payload["input_dim"], u=payload["window"][0],
                   v=payload["window"][1], forest_config=fc)


def train_classifier(ds: LabeledDataset, cfg: ForestConfig, k: int = 20,
                     attribute: str = "", u: int = 2, v: int = 2) -> TrainedExtractor:
    """ANOVA k-best selection, then forest training on the projected vectors."""
    ds.require_both_classes()
    scores = anova_f_scores(ds)
    selected = select_k_best(scores, k)
    forest = RandomForest.train(ds.X[:, selected], ds.y, cfg)
    return TrainedExtractor(attribute=attribute, selected=selected, forest=forest,
                            input_dim=ds.X.shape[1], u=u, v=v, forest_config=cfg)


def predict(model: TrainedExtractor, fv: np.ndarray) -> tuple[str, float]:
    """Classify one pre-selection feature vector; ties go to 'correct'."""
    fv = np.asarray(fv, dtype=float)
    if fv.shape != (model.input_dim,):
        raise ValueError(f"expected dimension {model.input_dim}, got {fv.shape}")
    score = model.forest.score_one(fv[model.selected])
    return ("correct" if score >= 0.5 else "incorrect", score)


def predict_batch(model: TrainedExtractor, X: np.ndarray) -> tuple[list[str], np.ndarray]:
    labels, scores = [], []
    for row in np.asarray(X, dtype=float):
        lab, sc = predict(model, row)
        labels.append(lab)
        scores.append(sc)
    return labels, np.array(scores)
