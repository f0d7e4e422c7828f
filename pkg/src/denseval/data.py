"""BEIR-format dataset ingestion: corpus / queries JSONL and qrels TSV.

Collections are plain lists of frozen records, order-preserving. All parse
errors name the offending line or row. Loaders are independent of each
other and the loaded collections are immutable, so they are safe to share
across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

QRELS_HEADER = "query-id\tcorpus-id\tscore"


class DatasetError(ValueError):
    """Malformed dataset file; the message carries the line/row number."""


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    text: str


@dataclass(frozen=True)
class Query:
    id: str
    text: str


@dataclass(frozen=True)
class Judgment:
    query_id: str
    doc_id: str
    relevance: int


@dataclass
class ValidationReport:
    """Consistency findings across the three collections of one dataset."""

    num_documents: int = 0
    num_queries: int = 0
    num_judgments: int = 0
    dangling_qrels: list[Judgment] = field(default_factory=list)
    duplicate_ids: list[str] = field(default_factory=list)
    zero_positive_queries: list[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.dangling_qrels and not self.duplicate_ids


def _iter_jsonl(path: str | Path):
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def load_corpus(path: str | Path) -> list[Document]:
    """Parse a corpus JSONL file (fields ``_id``, ``title``, ``text``).

    Extra fields (e.g. ``metadata``) are ignored; ``title`` may be absent
    or empty. A document must have non-blank text or a non-blank title.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        doc_id = obj.get("_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise DatasetError(f"{path}:{lineno}: missing or empty '_id'")
        if doc_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate document id '{doc_id}'")
        text = obj.get("text")
        if not isinstance(text, str):
            raise DatasetError(f"{path}:{lineno}: missing 'text' field")
        title = obj.get("title", "")
        if not isinstance(title, str):
            raise DatasetError(f"{path}:{lineno}: 'title' must be a string")
        if not text.strip() and not title.strip():
            raise DatasetError(
                f"{path}:{lineno}: document '{doc_id}' has neither text nor title"
            )
        seen.add(doc_id)
        docs.append(Document(id=doc_id, title=title, text=text))
    return docs


def load_queries(path: str | Path) -> list[Query]:
    """Parse a queries JSONL file (fields ``_id``, ``text``)."""
    queries: list[Query] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        query_id = obj.get("_id")
        if not isinstance(query_id, str) or not query_id:
            raise DatasetError(f"{path}:{lineno}: missing or empty '_id'")
        if query_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate query id '{query_id}'")
        text = obj.get("text")
        if not isinstance(text, str) or not text.strip():
            raise DatasetError(f"{path}:{lineno}: query '{query_id}' has blank text")
        seen.add(query_id)
        queries.append(Query(id=query_id, text=text))
    return queries


def load_qrels(path: str | Path) -> list[Judgment]:
    """Parse a qrels TSV with the exact header ``query-id corpus-id score``."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"file not found: {path}")
    judgments: list[Judgment] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != QRELS_HEADER:
            raise DatasetError(
                f"{path}:1: bad qrels header {header!r}, expected {QRELS_HEADER!r}"
            )
        for rowno, line in enumerate(fh, 2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DatasetError(f"{path}:{rowno}: expected 3 columns, got {len(cols)}")
            query_id, doc_id, score = cols
            try:
                relevance = int(score)
            except ValueError:
                raise DatasetError(
                    f"{path}:{rowno}: relevance score {score!r} is not an integer"
                ) from None
            if relevance < 0:
                raise DatasetError(f"{path}:{rowno}: negative relevance {relevance}")
            key = (query_id, doc_id)
            if key in seen:
                raise DatasetError(f"{path}:{rowno}: duplicate judgment {key}")
            seen.add(key)
            judgments.append(Judgment(query_id=query_id, doc_id=doc_id, relevance=relevance))
    return judgments


def qrels_by_query(judgments: Iterable[Judgment]) -> dict[str, dict[str, int]]:
    """Group judgments into query_id -> {doc_id: relevance}."""
    grouped: dict[str, dict[str, int]] = {}
    for j in judgments:
        grouped.setdefault(j.query_id, {})[j.doc_id] = j.relevance
    return grouped


def validate_dataset(
    corpus: Sequence[Document],
    queries: Sequence[Query],
    qrels: Sequence[Judgment],
) -> ValidationReport:
    """Cross-check the three collections.

    Findings are report entries, never exceptions: dangling judgments
    (unknown query or document id), duplicate ids within a collection,
    and queries whose judgments are all relevance 0.
    """
    report = ValidationReport(
        num_documents=len(corpus), num_queries=len(queries), num_judgments=len(qrels)
    )

    doc_ids: set[str] = set()
    for doc in corpus:
        if doc.id in doc_ids:
            report.duplicate_ids.append(doc.id)
        doc_ids.add(doc.id)
    query_ids: set[str] = set()
    for query in queries:
        if query.id in query_ids:
            report.duplicate_ids.append(query.id)
        query_ids.add(query.id)

    positives: dict[str, int] = {}
    for j in qrels:
        if j.query_id not in query_ids or j.doc_id not in doc_ids:
            report.dangling_qrels.append(j)
        positives.setdefault(j.query_id, 0)
        if j.relevance > 0:
            positives[j.query_id] += 1
    report.zero_positive_queries = sorted(
        qid for qid, n in positives.items() if n == 0 and qid in query_ids
    )
    return report


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps({"_id": doc.id, "title": doc.title, "text": doc.text}) + "\n")


def write_queries(queries: Iterable[Query], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for query in queries:
            fh.write(json.dumps({"_id": query.id, "text": query.text}) + "\n")


def write_qrels(judgments: Iterable[Judgment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(QRELS_HEADER + "\n")
        for j in judgments:
            fh.write(f"{j.query_id}\t{j.doc_id}\t{j.relevance}\n")
