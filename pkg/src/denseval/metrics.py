"""Ranked-retrieval metrics: hit rate, precision, recall, NDCG, MRR, AP.

Per-query functions take the ranked doc ids, that query's judgments
(doc id -> relevance grade, unjudged docs count as 0) and a cutoff k.
``evaluate_run`` applies the whole suite to a run and averages over the
evaluable queries; queries with no positive judgment are excluded from
every average and reported as a count.

Conventions: NDCG uses graded gains (2^rel - 1) with log2(i + 1)
discounts; AP binarizes relevance inside its indicator and normalizes by
min(R, k); the reciprocal rank of a query with no relevant doc in the
top k is 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .data import Judgment, qrels_by_query
from .retrieval import RankedList

DEFAULT_METRICS = ("Acc", "Prec", "Rec", "NDCG", "MRR", "MAP")

QrelsLike = Union[Mapping[str, Mapping[str, int]], Iterable[Judgment]]


@dataclass(frozen=True)
class MetricParams:
    k_list: tuple[int, ...] = (1, 10, 100)
    metrics: tuple[str, ...] = DEFAULT_METRICS

    def __post_init__(self) -> None:
        if not self.k_list:
            raise ValueError("k_list must not be empty")
        if any(k < 1 for k in self.k_list):
            raise ValueError("all cutoffs must be >= 1")
        if list(self.k_list) != sorted(set(self.k_list)):
            raise ValueError("k_list must be sorted ascending and distinct")
        unknown = [m for m in self.metrics if m not in _METRIC_FUNCS]
        if unknown:
            raise ValueError(f"unknown metrics: {unknown}")


@dataclass
class MetricReport:
    per_query: dict[str, dict[str, float]]
    averaged: dict[str, float]
    q_evaluated: int
    q_excluded: int = 0


def _num_relevant(rels: Mapping[str, int]) -> int:
    return sum(1 for rel in rels.values() if rel > 0)


def precision_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    hits = sum(1 for doc_id in ranked[:k] if rels.get(doc_id, 0) > 0)
    return hits / k


def recall_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    num_rel = _num_relevant(rels)
    if num_rel == 0:
        raise ValueError("recall undefined for a query with no relevant documents")
    hits = sum(1 for doc_id in ranked[:k] if rels.get(doc_id, 0) > 0)
    return hits / num_rel


def accuracy_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    """Hit rate: 1 if any relevant document appears in the top k."""
    return 1.0 if any(rels.get(doc_id, 0) > 0 for doc_id in ranked[:k]) else 0.0


def dcg_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    return sum(
        (2 ** rels.get(doc_id, 0) - 1) / math.log2(i + 1)
        for i, doc_id in enumerate(ranked[:k], start=1)
    )


def idcg_at_k(rels: Mapping[str, int], k: int) -> float:
    """DCG of the ideal ordering: judged docs by relevance descending,
    truncated at k."""
    ideal = sorted(rels.values(), reverse=True)
    return sum(
        (2**rel - 1) / math.log2(i + 1) for i, rel in enumerate(ideal[:k], start=1)
    )


def ndcg_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    ideal = idcg_at_k(rels, k)
    if ideal == 0.0:
        raise ValueError("NDCG undefined for a query with no relevant documents")
    return dcg_at_k(ranked, rels, k) / ideal


def reciprocal_rank_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    """1/rank of the first relevant doc within the top k, else 0."""
    for i, doc_id in enumerate(ranked[:k], start=1):
        if rels.get(doc_id, 0) > 0:
            return 1.0 / i
    return 0.0


def average_precision_at_k(ranked: Sequence[str], rels: Mapping[str, int], k: int) -> float:
    """AP@k = (1/min(R, k)) * sum over the top k of Precision@i * rel_i,
    with rel_i binarized."""
    num_rel = _num_relevant(rels)
    if num_rel == 0:
        raise ValueError("AP undefined for a query with no relevant documents")
    hits = 0
    total = 0.0
    for i, doc_id in enumerate(ranked[:k], start=1):
        if rels.get(doc_id, 0) > 0:
            hits += 1
            total += hits / i
    return total / min(num_rel, k)


_METRIC_FUNCS = {
    "Acc": accuracy_at_k,
    "Prec": precision_at_k,
    "Rec": recall_at_k,
    "NDCG": ndcg_at_k,
    "MRR": reciprocal_rank_at_k,
    "MAP": average_precision_at_k,
}


def _normalize_qrels(qrels: QrelsLike) -> Mapping[str, Mapping[str, int]]:
    if isinstance(qrels, Mapping):
        return qrels
    return qrels_by_query(qrels)


def evaluate_run(
    run: Sequence[RankedList], qrels: QrelsLike, params: MetricParams
) -> MetricReport:
    """Score every metric at every cutoff for each evaluable query.

    A query is evaluable when it has at least one positive judgment;
    the rest are excluded from the averages and counted. Averages are
    arithmetic means over the evaluated queries.
    """
    rels_by_query = _normalize_qrels(qrels)
    per_query: dict[str, dict[str, float]] = {}
    excluded = 0
    for ranked_list in run:
        if ranked_list.query_id in per_query:
            raise ValueError(f"duplicate query id in run: {ranked_list.query_id!r}")
        rels = rels_by_query.get(ranked_list.query_id, {})
        if _num_relevant(rels) == 0:
            excluded += 1
            continue
        ranked_ids = ranked_list.doc_ids()
        row: dict[str, float] = {}
        for name in params.metrics:
            func = _METRIC_FUNCS[name]
            for k in params.k_list:
                row[f"{name}@{k}"] = func(ranked_ids, rels, k)
        per_query[ranked_list.query_id] = row
    if not per_query:
        raise ValueError("no evaluable queries in run")
    keys = next(iter(per_query.values())).keys()
    averaged = {
        key: sum(row[key] for row in per_query.values()) / len(per_query) for key in keys
    }
    return MetricReport(
        per_query=per_query,
        averaged=averaged,
        q_evaluated=len(per_query),
        q_excluded=excluded,
    )


def report_to_dict(report: MetricReport, params: MetricParams) -> dict:
    return {
        "per_query": report.per_query,
        "averaged": report.averaged,
        "q_evaluated": report.q_evaluated,
        "q_excluded": report.q_excluded,
        "params": {"k_list": list(params.k_list), "metrics": list(params.metrics)},
    }


def write_metric_report(report: MetricReport, params: MetricParams, path: str | Path) -> None:
    """Metric report file: JSON at full double precision."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report, params), fh, indent=2)
        fh.write("\n")
