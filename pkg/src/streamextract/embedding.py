"""Incremental random-indexing word representations.

Each unit owns a fixed sparse ternary context vector, derived on demand
from a keyed hash of the unit string, and a dense representation vector
that accumulates the unweighted sum of its window neighbours' context
vectors over every occurrence. Training is a single streaming pass and
strictly additive, so document order never affects the result.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._kernels import ri_update
from .corpus import CorpusStats, TokenSequence


@dataclass(frozen=True)
class EmbeddingConfig:
    d: int = 200
    r: float = 0.01
    u: int = 2
    v: int = 2
    master_seed: int = 0

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("dimension d must be positive")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError("sparsity ratio r must be in [0, 1]")
        if self.u < 0 or self.v < 0:
            raise ValueError("window sizes must be non-negative")
        if self.nnz < 1:
            raise ValueError("floor(d*r) must be at least 1")
        if self.d - 2 * self.nnz < 0:
            raise ValueError("d must accommodate 2*floor(d*r) nonzeros")

    @property
    def nnz(self) -> int:
        return math.floor(self.d * self.r)


@dataclass(frozen=True)
class ContextVector:
    """Sparse ternary vector: nnz entries +1, nnz entries -1, rest zero."""

    d: int
    plus: tuple[int, ...]
    minus: tuple[int, ...]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.d)
        out[list(self.plus)] = 1.0
        out[list(self.minus)] = -1.0
        return out


def _context_indices(unit: str, cfg: EmbeddingConfig) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic +1/-1 index sets for a unit, keyed by the master seed."""
    key = (cfg.master_seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    digest = hashlib.blake2b(unit.encode("utf-8"), digest_size=16, key=key).digest()
    # stdlib Random seeds much faster than a numpy Generator; this runs
    # once per unique unit and dominates vocabulary setup time.
    rng = random.Random(int.from_bytes(digest, "big"))
    idx = rng.sample(range(cfg.d), 2 * cfg.nnz)
    plus = np.array(sorted(idx[: cfg.nnz]), dtype=np.int64)
    minus = np.array(sorted(idx[cfg.nnz :]), dtype=np.int64)
    return plus, minus


def context_vector(unit: str, cfg: EmbeddingConfig) -> ContextVector:
    plus, minus = _context_indices(unit, cfg)
    return ContextVector(d=cfg.d, plus=tuple(int(i) for i in plus),
                         minus=tuple(int(i) for i in minus))


def context_window(t: TokenSequence, i: int, cfg: EmbeddingConfig) -> list[str]:
    """Units around 1-indexed position i, excluding i itself.

    Returned as a list because repeated context words are summed once per
    occurrence (multiset semantics).
    """
    n = len(t)
    if not 1 <= i <= n:
        raise IndexError(f"position {i} out of range 1..{n}")
    lo = max(i - cfg.u, 1)
    hi = min(i + cfg.v, n)
    return [t.unit_at(j) for j in range(lo, hi + 1) if j != i]


class VectorStore:
    """Growable unit -> representation-vector map.

    Context vectors are never stored; they are re-derived from
    (unit, master_seed) whenever a new unit enters the vocabulary.
    """

    def __init__(self, cfg: EmbeddingConfig, stats: CorpusStats | None = None):
        if stats is not None and not stats.frozen:
            raise ValueError("corpus stats must be frozen")
        self.cfg = cfg
        self.stats = stats
        self.frozen = False
        self._index: dict[str, int] = {}
        cap = 1024
        self._matrix = np.zeros((cap, cfg.d))
        self._counts = np.zeros(cap, dtype=np.int64)
        self._plus = np.zeros((cap, cfg.nnz), dtype=np.int32)
        self._minus = np.zeros((cap, cfg.nnz), dtype=np.int32)

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, unit: str) -> bool:
        return unit in self._index

    def units(self) -> list[str]:
        return list(self._index)

    def _grow(self, need: int) -> None:
        cap = self._matrix.shape[0]
        if need <= cap:
            return
        new_cap = max(need, cap * 2)
        for name in ("_matrix", "_counts", "_plus", "_minus"):
            old = getattr(self, name)
            shape = (new_cap,) + old.shape[1:]
            new = np.zeros(shape, dtype=old.dtype)
            new[:cap] = old[:cap]
            setattr(self, name, new)

    def _id_for(self, unit: str) -> int:
        uid = self._index.get(unit)
        if uid is None:
            if self.frozen:
                raise RuntimeError("store is frozen")
            uid = len(self._index)
            self._grow(uid + 1)
            self._index[unit] = uid
            plus, minus = _context_indices(unit, self.cfg)
            self._plus[uid] = plus
            self._minus[uid] = minus
        return uid

    def update_document(self, units: Sequence[str]) -> None:
        """Fold one document's units into the store (Eq.-style additive update)."""
        if self.frozen:
            raise RuntimeError("store is frozen")
        if not units:
            return
        ids = np.fromiter((self._id_for(u) for u in units), dtype=np.int64,
                          count=len(units))
        ri_update(ids, self.cfg.u, self.cfg.v, self._plus, self._minus,
                  self._matrix, self._counts)

    def vector(self, unit: str) -> np.ndarray:
        uid = self._index[unit]
        return self._matrix[uid]

    def count(self, unit: str) -> int:
        return int(self._counts[self._index[unit]])

    def matrix(self) -> np.ndarray:
        """Representation rows in insertion order, shape (len(store), d)."""
        return self._matrix[: len(self._index)]

    def freeze(self) -> "VectorStore":
        self.frozen = True
        return self

    def save(self, path) -> None:
        cfg = self.cfg
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"d={cfg.d}\tr={cfg.r!r}\tu={cfg.u}\tv={cfg.v}\t"
                    f"master_seed={cfg.master_seed}\tunit_count={len(self)}\t"
                    f"frozen={int(self.frozen)}\n")
            for unit in sorted(self._index):
                uid = self._index[unit]
                vals = "\t".join(repr(x) for x in self._matrix[uid].tolist())
                f.write(f"{unit}\t{self._counts[uid]}\t{vals}\n")

    @classmethod
    def load(cls, path) -> "VectorStore":
        with open(path, encoding="utf-8") as f:
            header = dict(kv.split("=", 1) for kv in f.readline().rstrip("\n").split("\t"))
            cfg = EmbeddingConfig(d=int(header["d"]), r=float(header["r"]),
                                  u=int(header["u"]), v=int(header["v"]),
                                  master_seed=int(header["master_seed"]))
            store = cls(cfg)
            for line in f:
                parts = line.rstrip("\n").split("\t")
                unit, cnt = parts[0], int(parts[1])
                uid = store._id_for(unit)
                store._counts[uid] = cnt
                store._matrix[uid] = [float(x) for x in parts[2:]]
        if int(header["frozen"]):
            store.freeze()
        return store


def train_embeddings(docs: Iterable[TokenSequence | Sequence[str]],
                     cfg: EmbeddingConfig | None = None,
                     store: VectorStore | None = None) -> VectorStore:
    """Single-pass incremental training over normalized token sequences.

    Accepts TokenSequence objects or plain lists of canonical unit strings.
    Pass an existing unfrozen store to extend it with streamed documents.
    """
    if store is None:
        store = VectorStore(cfg or EmbeddingConfig())
    for doc in docs:
        units = doc.units() if isinstance(doc, TokenSequence) else list(doc)
        store.update_document(units)
    return store


def cosine_similarity(x: np.ndarray, y: np.ndarray) -> float:
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return float(np.dot(x, y) / (nx * ny))


def nearest_neighbors(store: VectorStore, unit: str, k: int) -> list[tuple[str, float]]:
    """Top-k other units by cosine similarity, ties broken lexicographically."""
    if unit not in store:
        raise KeyError(f"unknown unit {unit!r}")
    if k < 1:
        raise ValueError("k must be positive")
    query = store.vector(unit)
    scored = [(other, cosine_similarity(query, store.vector(other)))
              for other in store.units() if other != unit]
    scored.sort(key=lambda p: (-p[1], p[0]))
    return scored[:k]
