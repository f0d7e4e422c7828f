"""Deterministic synthetic self-retrieval datasets.

Each query is a verbatim copy of its single relevant document, so a
clean run with any deterministic embedder ranks the right document first
with similarity 1.0. Documents draw their words from a small shared pool
(distinct multisets, heavy overlap), which makes the corpus confusable
enough that token-id noise produces measurable ranking damage.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .data import Document, Judgment, Query, write_corpus, write_qrels, write_queries
from .rng import SplitMix64, splitmix64
from .tokenizer import SPECIAL_TOKENS, Vocabulary, save_vocab


@dataclass(frozen=True)
class SynthDataset:
    corpus: list[Document]
    queries: list[Query]
    qrels: list[Judgment]
    vocab: Vocabulary


def make_self_retrieval_dataset(
    num_docs: int,
    num_queries: int,
    seed: int = 0,
    pool_size: int = 15,
    min_words: int = 3,
    max_words: int = 6,
) -> SynthDataset:
    """Build a corpus of word-multiset documents plus copy queries.

    Document texts are distinct as multisets (rejection-sampled), so
    exact self-retrieval has a unique similarity-1.0 answer. Queries are
    copies of the first ``num_queries`` documents, each judged relevant
    (grade 1) only to its source document.
    """
    if num_queries > num_docs:
        raise ValueError("cannot have more queries than documents")
    pool = [f"term{i:03d}" for i in range(pool_size)]
    stream = SplitMix64(splitmix64(seed))
    seen: set[tuple[str, ...]] = set()
    corpus: list[Document] = []
    while len(corpus) < num_docs:
        n_words = min_words + stream.next_below(max_words - min_words + 1)
        words = tuple(sorted(pool[stream.next_below(pool_size)] for _ in range(n_words)))
        if words in seen:
            continue
        seen.add(words)
        doc_id = f"d{len(corpus):05d}"
        corpus.append(Document(id=doc_id, title="", text=" ".join(words)))
    queries = [
        Query(id=f"q{i:05d}", text=corpus[i].text) for i in range(num_queries)
    ]
    qrels = [
        Judgment(query_id=q.id, doc_id=corpus[i].id, relevance=1)
        for i, q in enumerate(queries)
    ]
    vocab = Vocabulary.from_tokens(list(SPECIAL_TOKENS) + pool)
    return SynthDataset(corpus=corpus, queries=queries, qrels=qrels, vocab=vocab)


def write_dataset(dataset: SynthDataset, out_dir: str | Path) -> dict[str, Path]:
    """Write BEIR-format files plus the vocabulary; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": out_dir / "corpus.jsonl",
        "queries": out_dir / "queries.jsonl",
        "qrels": out_dir / "qrels.tsv",
        "vocab": out_dir / "vocab.txt",
    }
    write_corpus(dataset.corpus, paths["corpus"])
    write_queries(dataset.queries, paths["queries"])
    write_qrels(dataset.qrels, paths["qrels"])
    save_vocab(dataset.vocab, paths["vocab"])
    return paths
