"""Bulk corpus embedding export into DRE1 store files."""

from __future__ import annotations

import json
from pathlib import Path

from .dre1 import write_dre1
from .engine import EmbeddingEngine


def read_corpus(path: str | Path) -> list[tuple[str, str]]:
    """Minimal corpus JSONL reader: (_id, 'title text') pairs in order."""
    records: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            doc_id = obj.get("_id")
            if not isinstance(doc_id, str) or not doc_id:
                raise ValueError(f"{path}:{lineno}: missing '_id'")
            if doc_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            text = f"{obj.get('title', '')} {obj.get('text', '')}".strip()
            records.append((doc_id, text))
    return records


def export_store(
    engine: EmbeddingEngine,
    corpus_path: str | Path,
    out_path: str | Path,
    batch_size: int = 32,
) -> int:
    """Embed every corpus document and write a normalized DRE1 store.

    Returns the number of records written. Rerunning with the same
    checkpoint produces a byte-identical file.
    """
    corpus = read_corpus(corpus_path)
    records: list[tuple[str, list[float]]] = []
    for start in range(0, len(corpus), batch_size):
        chunk = corpus[start : start + batch_size]
        token_ids = engine.tokenize([text for _, text in chunk])
        vectors = engine.embed_ids(token_ids)
        records.extend((doc_id, vec) for (doc_id, _), vec in zip(chunk, vectors))
    write_dre1(out_path, dim=engine.entry.dim, normalized=True, records=records)
    return len(records)
