"""End-to-end experiment orchestration.

For each configured dataset: load and validate, embed the corpus once
(or load a precomputed store), build the flat index, then evaluate the
clean queries and one perturbed condition per requested rate. Corpus
embeddings are shared across conditions; only the query side is
perturbed and re-embedded.

Everything is keyed off (config, master_seed), so rerunning a config
reproduces every number; only the timestamp in the provenance differs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import data as data_io
from .embed import (
    EmbeddingStore,
    ProviderConfig,
    ProviderError,
    ReferenceEmbedder,
    fetch_embeddings,
    read_store,
    service_model_info,
    service_tokenize,
)
from .metrics import MetricParams, MetricReport, evaluate_run
from .perturb import PerturbationParams, PerturbationRecord, perturb_query_set
from .retrieval import batch_search, build_index
from .tokenizer import TokenSequence, Vocabulary, encode, load_vocab

# Retrieval depth: deep enough for the largest cutoff and for MAP@100.
MIN_RETRIEVAL_DEPTH = 100


class ValidationFailure(ValueError):
    """Dataset failed cross-collection validation."""


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    corpus: str
    queries: str
    qrels: str
    vocab: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    provider: ProviderConfig
    k_list: tuple[int, ...] = (1, 10, 100)
    perturb_rates: tuple[float, ...] = (0.05, 0.20)
    default_rate: float = 0.10
    master_seed: int = 0
    max_len: int = 64
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if not self.datasets:
            raise ValueError("config needs at least one dataset")
        names = [ds.name for ds in self.datasets]
        if len(set(names)) != len(names):
            raise ValueError("dataset names must be unique")
        for ds in self.datasets:
            paths = [p for p in (ds.corpus, ds.queries, ds.qrels, ds.vocab) if p]
            if len(set(paths)) != len(paths):
                raise ValueError(f"dataset {ds.name!r} reuses a path for two roles")
            if self.provider.kind == "reference" and ds.vocab is None:
                raise ValueError(f"dataset {ds.name!r} needs a vocab for the reference provider")
        for rate in (*self.perturb_rates, self.default_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"perturbation rate {rate} outside [0, 1]")
        if self.max_len < 2:
            raise ValueError("max_len must be >= 2")
        MetricParams(k_list=self.k_list)  # validates cutoffs

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        datasets = tuple(
            DatasetSpec(
                name=d["name"],
                corpus=d["corpus"],
                queries=d["queries"],
                qrels=d["qrels"],
                vocab=d.get("vocab"),
            )
            for d in raw["datasets"]
        )
        provider = ProviderConfig(**raw.get("provider", {"kind": "reference", "dim": 64, "seed": 0}))
        return cls(
            datasets=datasets,
            provider=provider,
            k_list=tuple(raw.get("k_list", (1, 10, 100))),
            perturb_rates=tuple(raw.get("perturb_rates", (0.05, 0.20))),
            default_rate=raw.get("default_rate", 0.10),
            master_seed=raw.get("master_seed", 0),
            max_len=raw.get("max_len", 64),
            output_dir=raw.get("output_dir", "out"),
        )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        provider = {
            k: v
            for k, v in (
                ("kind", self.provider.kind),
                ("dim", self.provider.dim),
                ("seed", self.provider.seed),
                ("path", self.provider.path),
                ("endpoint", self.provider.endpoint),
                ("model", self.provider.model),
            )
            if v is not None
        }
        return {
            "datasets": [
                {
                    "name": ds.name,
                    "corpus": ds.corpus,
                    "queries": ds.queries,
                    "qrels": ds.qrels,
                    **({"vocab": ds.vocab} if ds.vocab else {}),
                }
                for ds in self.datasets
            ],
            "provider": provider,
            "k_list": list(self.k_list),
            "perturb_rates": list(self.perturb_rates),
            "default_rate": self.default_rate,
            "master_seed": self.master_seed,
            "max_len": self.max_len,
            "output_dir": self.output_dir,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def provider_label(self) -> str:
        if self.provider.kind == "service":
            return self.provider.model or "service"
        return self.provider.kind


@dataclass
class ExperimentResult:
    conditions: list[str]
    datasets: dict[str, dict[str, MetricReport]]
    params: MetricParams
    provider_label: str
    provenance: dict
    errors: dict[str, str] = field(default_factory=dict)


def rate_label(rate: float) -> str:
    return f"perturbed@{rate:g}"


def doc_text(doc: data_io.Document) -> str:
    return f"{doc.title} {doc.text}".strip()


class _ReferencePipeline:
    """Tokenize with the local vocabulary, embed with the hashed
    bag-of-tokens reference embedder."""

    def __init__(self, spec: DatasetSpec, provider: ProviderConfig, max_len: int) -> None:
        self.vocab: Vocabulary = load_vocab(spec.vocab)
        self.max_len = max_len
        self.embedder = ReferenceEmbedder(provider, self.vocab.size)

    @property
    def vocab_size(self) -> int:
        return self.vocab.size

    def tokenize(self, texts: Sequence[str]) -> list[TokenSequence]:
        return [encode(t, self.vocab, self.max_len) for t in texts]

    def embed(self, seqs: Sequence[TokenSequence]) -> list[np.ndarray]:
        return self.embedder.embed_batch(seqs, self.vocab.pad_id)


class _ServicePipeline:
    """Tokenize and embed via the external embedding service; the
    service owns its own tokenizer and vocabulary."""

    def __init__(self, provider: ProviderConfig) -> None:
        self.provider = provider
        info = service_model_info(provider)
        self.vocab_size = int(info["vocab_size"])

    def tokenize(self, texts: Sequence[str]) -> list[TokenSequence]:
        return service_tokenize(texts, self.provider)

    def embed(self, seqs: Sequence[TokenSequence]) -> list[np.ndarray]:
        return fetch_embeddings(seqs, self.provider)


def _store_from_vectors(ids: Sequence[str], vectors: Sequence[np.ndarray]) -> EmbeddingStore:
    store = EmbeddingStore(dim=len(vectors[0]), normalized=True)
    for rec_id, vec in zip(ids, vectors):
        store.add(rec_id, np.asarray(vec, dtype=np.float32))
    return store


def _file_store_path(provider: ProviderConfig, name: str, role: str) -> Path:
    base = Path(provider.path)
    if base.is_dir():
        return base / f"{name}.{role}.dre1"
    return base


def embed_dataset_stores(
    spec: DatasetSpec, config: ExperimentConfig
) -> tuple[EmbeddingStore, EmbeddingStore]:
    """Embed one dataset's corpus and clean queries into stores."""
    corpus = data_io.load_corpus(spec.corpus)
    queries = data_io.load_queries(spec.queries)
    pipeline = _make_pipeline(spec, config)
    doc_vecs = pipeline.embed(pipeline.tokenize([doc_text(d) for d in corpus]))
    query_vecs = pipeline.embed(pipeline.tokenize([q.text for q in queries]))
    return (
        _store_from_vectors([d.id for d in corpus], doc_vecs),
        _store_from_vectors([q.id for q in queries], query_vecs),
    )


def _make_pipeline(spec: DatasetSpec, config: ExperimentConfig):
    if config.provider.kind == "reference":
        return _ReferencePipeline(spec, config.provider, config.max_len)
    if config.provider.kind == "service":
        return _ServicePipeline(config.provider)
    raise ProviderError("file provider holds precomputed vectors and cannot embed")


def _run_dataset(
    spec: DatasetSpec, config: ExperimentConfig, rates: Sequence[float], params: MetricParams
) -> dict[str, MetricReport]:
    corpus = data_io.load_corpus(spec.corpus)
    queries = data_io.load_queries(spec.queries)
    qrels = data_io.load_qrels(spec.qrels)
    report = data_io.validate_dataset(corpus, queries, qrels)
    if not report.is_valid:
        raise ValidationFailure(
            f"dataset {spec.name!r}: {len(report.dangling_qrels)} dangling qrels, "
            f"{len(report.duplicate_ids)} duplicate ids"
        )
    depth = max(max(params.k_list), MIN_RETRIEVAL_DEPTH)
    conditions: dict[str, MetricReport] = {}

    if config.provider.kind == "file":
        if rates:
            raise ProviderError(
                "file provider cannot re-embed perturbed queries; run clean-only"
            )
        corpus_store = read_store(_file_store_path(config.provider, spec.name, "corpus"))
        query_store = read_store(_file_store_path(config.provider, spec.name, "queries"))
        index = build_index(corpus_store)
        pairs = [(q.id, query_store.records[q.id].astype(np.float64)) for q in queries]
        conditions["clean"] = evaluate_run(batch_search(index, pairs, depth), qrels, params)
        return conditions

    pipeline = _make_pipeline(spec, config)
    doc_vecs = pipeline.embed(pipeline.tokenize([doc_text(d) for d in corpus]))
    # Corpus vectors pass through the store's float32 quantization, so a
    # run from a written store matches an in-memory run bit for bit.
    corpus_store = _store_from_vectors([d.id for d in corpus], doc_vecs)
    index = build_index(corpus_store)

    query_seqs = list(zip([q.id for q in queries], pipeline.tokenize([q.text for q in queries])))
    clean_vecs = pipeline.embed([seq for _, seq in query_seqs])
    run = batch_search(index, list(zip((qid for qid, _ in query_seqs), clean_vecs)), depth)
    conditions["clean"] = evaluate_run(run, qrels, params)

    for rate in rates:
        pparams = PerturbationParams(epsilon=rate, master_seed=config.master_seed)
        records = perturb_query_set(query_seqs, pipeline.vocab_size, pparams)
        perturbed_vecs = pipeline.embed([r.after for r in records])
        run = batch_search(
            index, list(zip((r.query_id for r in records), perturbed_vecs)), depth
        )
        conditions[rate_label(rate)] = evaluate_run(run, qrels, params)
    return conditions


def perturbation_preview(
    spec: DatasetSpec, config: ExperimentConfig, rate: float, limit: int | None = None
) -> tuple[list[PerturbationRecord], Vocabulary]:
    """Tokenize and perturb a dataset's queries for a before/after display table."""
    if config.provider.kind != "reference":
        raise ProviderError("perturbation preview needs the reference provider's vocabulary")
    queries = data_io.load_queries(spec.queries)
    if limit is not None:
        queries = queries[:limit]
    pipeline = _ReferencePipeline(spec, config.provider, config.max_len)
    seqs = list(zip([q.id for q in queries], pipeline.tokenize([q.text for q in queries])))
    params = PerturbationParams(epsilon=rate, master_seed=config.master_seed)
    return perturb_query_set(seqs, pipeline.vocab_size, params), pipeline.vocab


def run_experiment(
    config: ExperimentConfig, rates: Sequence[float] | None = None
) -> ExperimentResult:
    """Run clean plus one perturbed condition per rate on every dataset.

    Provider failures abort only the affected dataset and are recorded
    in the result; validation failures abort the run.
    """
    if rates is None:
        rates = list(config.perturb_rates)
    for rate in rates:
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"perturbation rate {rate} outside [0, 1]")
    params = MetricParams(k_list=config.k_list)
    result = ExperimentResult(
        conditions=["clean"] + [rate_label(r) for r in rates],
        datasets={},
        params=params,
        provider_label=config.provider_label(),
        provenance={
            "master_seed": config.master_seed,
            "config_hash": config.config_hash(),
            "provider": config.provider_label(),
            "rates": list(rates),
            "created_at": datetime.now(timezone.utc).isoformat(),
        },
    )
    for spec in config.datasets:
        try:
            result.datasets[spec.name] = _run_dataset(spec, config, rates, params)
        except ProviderError as exc:
            result.errors[spec.name] = str(exc)
    return result


def result_to_dict(result: ExperimentResult) -> dict:
    return {
        "schema": "denseval-result/1",
        "provenance": result.provenance,
        "provider": result.provider_label,
        "conditions": result.conditions,
        "params": {"k_list": list(result.params.k_list), "metrics": list(result.params.metrics)},
        "datasets": {
            name: {
                cond: {
                    "per_query": rep.per_query,
                    "averaged": rep.averaged,
                    "q_evaluated": rep.q_evaluated,
                    "q_excluded": rep.q_excluded,
                }
                for cond, rep in conds.items()
            }
            for name, conds in result.datasets.items()
        },
        "errors": result.errors,
    }


def result_from_dict(raw: dict) -> ExperimentResult:
    if raw.get("schema") != "denseval-result/1":
        raise ValueError(f"not a denseval result file (schema {raw.get('schema')!r})")
    params = MetricParams(
        k_list=tuple(raw["params"]["k_list"]), metrics=tuple(raw["params"]["metrics"])
    )
    datasets = {
        name: {
            cond: MetricReport(
                per_query=rep["per_query"],
                averaged=rep["averaged"],
                q_evaluated=rep["q_evaluated"],
                q_excluded=rep.get("q_excluded", 0),
            )
            for cond, rep in conds.items()
        }
        for name, conds in raw["datasets"].items()
    }
    return ExperimentResult(
        conditions=list(raw["conditions"]),
        datasets=datasets,
        params=params,
        provider_label=raw["provider"],
        provenance=dict(raw["provenance"]),
        errors=dict(raw.get("errors", {})),
    )


def save_result(result: ExperimentResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result_to_dict(result), fh, indent=2)
        fh.write("\n")


def load_result(path: str | Path) -> ExperimentResult:
    with open(path, encoding="utf-8") as fh:
        return result_from_dict(json.load(fh))
