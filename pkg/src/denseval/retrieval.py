"""Exact top-k cosine-similarity search over a flat index.

The index is an immutable matrix of unit-norm rows in document-id order;
searches are exhaustive dot products with deterministic lexicographic
tie-breaking, so results are reproducible across platforms and parallel
schedules.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .embed import EmbeddingStore


class ScoredDoc(NamedTuple):
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    query_id: str
    entries: tuple[ScoredDoc, ...]

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]


@dataclass(frozen=True)
class FlatIndex:
    dim: int
    doc_ids: tuple[str, ...]
    matrix: np.ndarray  # (len(doc_ids), dim) float64, unit-norm rows

    def __len__(self) -> int:
        return len(self.doc_ids)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u . v / (|u| |v|), accumulated in float64."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def build_index(store: EmbeddingStore) -> FlatIndex:
    """Normalize store vectors once, rows ordered by sorted doc id."""
    if not store.records:
        raise ValueError("cannot build an index from an empty store")
    doc_ids = tuple(sorted(store.records))
    matrix = np.stack([store.records[d] for d in doc_ids]).astype(np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ValueError(f"zero vector in store for id {doc_ids[zero[0]]!r}")
    return FlatIndex(dim=store.dim, doc_ids=doc_ids, matrix=matrix / norms[:, None])


def search(index: FlatIndex, query: np.ndarray, k: int, query_id: str = "") -> RankedList:
    """Top-k documents by cosine similarity; ties broken by smaller doc id.

    Returns all documents when k exceeds the index size. Scores are exact
    normalized dot products in float64.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (index.dim,):
        raise ValueError(f"query has shape {q.shape}, index dim is {index.dim}")
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValueError("cannot search with a zero-norm query")
    scores = index.matrix @ (q / norm)
    # doc_ids are sorted, so a stable sort on -score breaks ties
    # lexicographically by doc id.
    order = np.argsort(-scores, kind="stable")[: min(k, len(index.doc_ids))]
    entries = tuple(
        ScoredDoc(doc_id=index.doc_ids[i], score=float(scores[i]), rank=rank)
        for rank, i in enumerate(order, start=1)
    )
    return RankedList(query_id=query_id, entries=entries)


def batch_search(
    index: FlatIndex, queries: Sequence[tuple[str, np.ndarray]], k: int
) -> list[RankedList]:
    """Elementwise equal to independent search calls, order preserved."""
    return [search(index, vec, k, query_id=query_id) for query_id, vec in queries]


def write_run(ranked_lists: Sequence[RankedList], path: str | Path, run_name: str = "denseval") -> None:
    """Write results in TREC run format, rank ascending per query."""
    with open(path, "w", encoding="utf-8") as fh:
        for ranked in ranked_lists:
            for entry in ranked.entries:
                fh.write(
                    f"{ranked.query_id} Q0 {entry.doc_id} {entry.rank} "
                    f"{entry.score:.6f} {run_name}\n"
                )
