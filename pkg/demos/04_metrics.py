"""The ranked-retrieval metric suite, worked by hand.

One query, six documents, graded judgments. Every metric is shown at a
few cutoffs next to the arithmetic it abbreviates.
"""

import math

from denseval.metrics import (
    MetricParams,
    accuracy_at_k,
    average_precision_at_k,
    dcg_at_k,
    evaluate_run,
    idcg_at_k,
    ndcg_at_k,
    precision_at_k,
    recall_at_k,
    reciprocal_rank_at_k,
)
from denseval.retrieval import RankedList, ScoredDoc

rels = {"a": 2, "b": 1, "c": 0, "d": 1}   # R = 3 positives, graded
ranked = ["c", "a", "x", "b", "d"]        # x was never judged -> grade 0

print(f"judgments: {rels}   (R = 3)")
print(f"ranking:   {ranked}\n")

for k in (1, 3, 5):
    print(f"k = {k}")
    print(f"  hit rate     {accuracy_at_k(ranked, rels, k):.4f}   (any positive in top k)")
    print(f"  precision    {precision_at_k(ranked, rels, k):.4f}   (positives / k)")
    print(f"  recall       {recall_at_k(ranked, rels, k):.4f}   (positives / R)")
    print(f"  recip. rank  {reciprocal_rank_at_k(ranked, rels, k):.4f}   (1/rank of first hit)")
    print(f"  AP           {average_precision_at_k(ranked, rels, k):.4f}   "
          f"(sum P@i over hits / min(R, k))")
    print(f"  NDCG         {ndcg_at_k(ranked, rels, k):.4f}   (DCG / ideal DCG)")

print("\nNDCG@3 by hand:")
print(f"  DCG@3  = (2^0-1)/log2(2) + (2^2-1)/log2(3) + (2^0-1)/log2(4)"
      f" = {dcg_at_k(ranked, rels, 3):.4f}")
print(f"  IDCG@3 = (2^2-1)/log2(2) + (2^1-1)/log2(3) + (2^1-1)/log2(4)"
      f" = {idcg_at_k(rels, 3):.4f}")
print(f"  ratio  = {dcg_at_k(ranked, rels, 3) / idcg_at_k(rels, 3):.4f}")
assert math.isclose(ndcg_at_k(ranked, rels, 3), dcg_at_k(ranked, rels, 3) / idcg_at_k(rels, 3))

# evaluate_run applies the whole suite per query and averages.
run = [
    RankedList("q1", tuple(ScoredDoc(d, 1.0 - i * 0.1, i + 1) for i, d in enumerate(ranked))),
    RankedList("q2", tuple(ScoredDoc(d, 1.0 - i * 0.1, i + 1) for i, d in enumerate(["b", "a"]))),
    RankedList("q-unjudged", (ScoredDoc("a", 1.0, 1),)),
]
qrels = {"q1": rels, "q2": {"a": 1}, "q-unjudged": {"a": 0}}
report = evaluate_run(run, qrels, MetricParams(k_list=(1, 3, 10)))
print(f"\nevaluate_run over {report.q_evaluated} evaluable queries "
      f"({report.q_excluded} excluded for lacking positives):")
for key in ("Acc@1", "Prec@1", "Rec@1", "NDCG@10", "MRR@10", "MAP@10"):
    print(f"  {key:<8} {report.averaged[key]:.4f}")
