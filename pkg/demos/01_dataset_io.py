"""Loading and validating a BEIR-format dataset.

A dataset is three files: corpus.jsonl (one JSON object per line with
_id / title / text), queries.jsonl (_id / text), and a qrels TSV with
the header `query-id  corpus-id  score`. This script writes a small
dataset by hand, loads it back, and shows what validation reports.
"""

import tempfile
from pathlib import Path

from denseval.data import (
    Document,
    Judgment,
    Query,
    load_corpus,
    load_qrels,
    load_queries,
    validate_dataset,
    write_corpus,
    write_qrels,
    write_queries,
)

workdir = Path(tempfile.mkdtemp(prefix="denseval-demo-"))
print(f"writing a toy dataset under {workdir}\n")

docs = [
    Document(id="d1", title="Skin care", text="theraderm is a skin cream"),
    Document(id="d2", title="Burgers", text="a double cheeseburger has two patties"),
    Document(id="d3", title="", text="the mcdouble is a burger with one slice of cheese"),
]
queries = [
    Query(id="q1", text="what is theraderm used for"),
    Query(id="q2", text="difference between a mcdouble and a double cheeseburger"),
]
qrels = [
    Judgment(query_id="q1", doc_id="d1", relevance=1),
    Judgment(query_id="q2", doc_id="d2", relevance=2),
    Judgment(query_id="q2", doc_id="d3", relevance=1),
]

write_corpus(docs, workdir / "corpus.jsonl")
write_queries(queries, workdir / "queries.jsonl")
write_qrels(qrels, workdir / "qrels.tsv")

# Loading preserves order and rejects duplicates / malformed lines with
# the offending line number.
corpus = load_corpus(workdir / "corpus.jsonl")
print(f"loaded {len(corpus)} documents; first: {corpus[0]}")
print(f"loaded {len(load_queries(workdir / 'queries.jsonl'))} queries")
print(f"loaded {len(load_qrels(workdir / 'qrels.tsv'))} judgments\n")

report = validate_dataset(corpus, queries, qrels)
print(f"validation: valid={report.is_valid}  "
      f"({report.num_documents} docs / {report.num_queries} queries / "
      f"{report.num_judgments} judgments)")

# Now break it: a judgment pointing at a document that does not exist,
# and a query whose only judgment has relevance 0.
broken = qrels + [
    Judgment(query_id="q1", doc_id="d999", relevance=1),
    Judgment(query_id="q3", doc_id="d1", relevance=1),
]
queries_plus = queries + [Query(id="q4", text="nothing relevant")]
broken += [Judgment(query_id="q4", doc_id="d1", relevance=0)]

report = validate_dataset(corpus, queries_plus, broken)
print(f"\nafter sabotage: valid={report.is_valid}")
for j in report.dangling_qrels:
    print(f"  dangling judgment: query={j.query_id!r} doc={j.doc_id!r}")
print(f"  queries with zero positive judgments: {report.zero_positive_queries}")
print("\nqueries without a positive judgment are excluded from metric averages.")
