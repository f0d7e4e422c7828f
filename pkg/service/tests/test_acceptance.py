"""Acceptance suite for the embedding service.

Both criteria run over a real HTTP socket and drive the service through
the evaluation harness's own client code, so what is tested is the wire
contract, not package internals. One pass/fail line per criterion (run
with -s or -rP).
"""

from contextlib import contextmanager

import numpy as np
import pytest

from denseval.embed import ProviderConfig, fetch_embeddings, read_store, service_tokenize
from denseval.runner import DatasetSpec, ExperimentConfig, run_experiment
from denseval.synth import make_self_retrieval_dataset, write_dataset

from embedsvc.export import export_store


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


@pytest.fixture(scope="module")
def hundred_texts():
    pool = ["retrieval", "dense", "token", "noise", "query", "index", "rank", "model"]
    return [
        f"{pool[i % 8]} {pool[(i * 3 + 1) % 8]} {pool[(i * 5 + 2) % 8]} number {i}"
        for i in range(100)
    ]


class TestProtocolConformance:
    def test_tokenize_embed_round_trip_and_export(
        self, live_server, engines, hundred_texts, tmp_path
    ):
        with criterion(
            "protocol conformance (100-text tokenize+embed round trip, "
            "determinism, export readable by harness)"
        ):
            config = ProviderConfig.service(live_server, "bert")
            sequences = service_tokenize(hundred_texts, config)
            assert len(sequences) == 100
            assert all(len(seq) >= 3 for seq in sequences)

            first = fetch_embeddings(sequences, config)
            assert len(first) == 100
            dims = {len(vec) for vec in first}
            assert dims == {engines["bert"].entry.dim}
            for vec in first:
                assert abs(np.linalg.norm(vec) - 1.0) <= 1e-4

            second = fetch_embeddings(sequences, config)
            for a, b in zip(first, second):
                assert np.array_equal(a, b)  # determinism across two calls

            corpus_path = tmp_path / "corpus.jsonl"
            corpus_path.write_text(
                "".join(
                    f'{{"_id":"d{i}","title":"","text":"{text}"}}\n'
                    for i, text in enumerate(hundred_texts[:20])
                )
            )
            store_path = tmp_path / "export.dre1"
            export_store(engines["bert"], corpus_path, store_path)
            store = read_store(store_path)
            assert store.dim == engines["bert"].entry.dim
            assert len(store) == 20


class TestQualitativeReproduction:
    def test_perturbed_ndcg_strictly_below_clean(self, live_server, tmp_path):
        with criterion(
            "qualitative reproduction (real checkpoint over HTTP: "
            "NDCG@10 at eps=0.20 strictly below clean)"
        ):
            dataset = make_self_retrieval_dataset(num_docs=300, num_queries=60, seed=17)
            paths = write_dataset(dataset, tmp_path / "beir")
            config = ExperimentConfig(
                datasets=(
                    DatasetSpec(
                        name="subset",
                        corpus=str(paths["corpus"]),
                        queries=str(paths["queries"]),
                        qrels=str(paths["qrels"]),
                    ),
                ),
                provider=ProviderConfig.service(live_server, "bert"),
                master_seed=7,
                output_dir=str(tmp_path / "out"),
            )
            result = run_experiment(config, rates=[0.20])
            assert not result.errors
            conds = result.datasets["subset"]
            clean = conds["clean"].averaged["NDCG@10"]
            perturbed = conds["perturbed@0.2"].averaged["NDCG@10"]
            assert perturbed < clean  # direction only, no numeric tolerance
            assert conds["clean"].q_evaluated == 60
