"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately written from the metric definitions and
first principles in plain Python (slicing, explicit loops, no numpy and
no imports from the package under test), so agreement with the library
is meaningful.
"""

from __future__ import annotations

import math


def o_flags(ranked, rels, k):
    """Binary relevance flags for the top-k ranked doc ids."""
    return [1 if rels.get(doc_id, 0) > 0 else 0 for doc_id in ranked[:k]]


def o_num_relevant(rels):
    return len([g for g in rels.values() if g > 0])


def o_precision(ranked, rels, k):
    return sum(o_flags(ranked, rels, k)) / k


def o_recall(ranked, rels, k):
    return sum(o_flags(ranked, rels, k)) / o_num_relevant(rels)


def o_hit_rate(ranked, rels, k):
    return 1.0 if sum(o_flags(ranked, rels, k)) > 0 else 0.0


def o_dcg(ranked, rels, k):
    total = 0.0
    for i, doc_id in enumerate(ranked[:k]):
        gain = 2 ** rels.get(doc_id, 0) - 1
        total += gain / math.log2(i + 2)
    return total


def o_idcg(rels, k):
    ideal = sorted(rels.values(), reverse=True)[:k]
    total = 0.0
    for i, grade in enumerate(ideal):
        total += (2**grade - 1) / math.log2(i + 2)
    return total


def o_ndcg(ranked, rels, k):
    return o_dcg(ranked, rels, k) / o_idcg(rels, k)


def o_reciprocal_rank(ranked, rels, k):
    for i, doc_id in enumerate(ranked[:k]):
        if rels.get(doc_id, 0) > 0:
            return 1.0 / (i + 1)
    return 0.0


def o_average_precision(ranked, rels, k):
    flags = o_flags(ranked, rels, k)
    total = 0.0
    for i in range(len(flags)):
        if flags[i]:
            total += sum(flags[: i + 1]) / (i + 1)
    return total / min(o_num_relevant(rels), k)


ORACLES = {
    "Acc": o_hit_rate,
    "Prec": o_precision,
    "Rec": o_recall,
    "NDCG": o_ndcg,
    "MRR": o_reciprocal_rank,
    "MAP": o_average_precision,
}


def o_evaluate_run(runs, qrels, k_list):
    """Per-query metric values plus arithmetic means, excluding queries
    with no positive judgment.

    runs: list of (query_id, ranked doc id list); qrels: query_id ->
    {doc_id: grade}.
    """
    per_query = {}
    for query_id, ranked in runs:
        rels = qrels.get(query_id, {})
        if o_num_relevant(rels) == 0:
            continue
        per_query[query_id] = {
            f"{name}@{k}": fn(ranked, rels, k)
            for name, fn in ORACLES.items()
            for k in k_list
        }
    averaged = {}
    if per_query:
        for key in next(iter(per_query.values())):
            averaged[key] = sum(row[key] for row in per_query.values()) / len(per_query)
    return per_query, averaged


def o_cosine(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return dot / (nu * nv)


def o_top_k(doc_vectors, query, k):
    """Exhaustive cosine scan; ties broken by lexicographically smaller
    doc id. doc_vectors: {doc_id: list of float}."""
    scored = [(o_cosine(vec, query), doc_id) for doc_id, vec in doc_vectors.items()]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [(doc_id, score) for score, doc_id in scored[:k]]
