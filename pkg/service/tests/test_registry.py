"""Tests for checkpoint materialization and registry loading."""

import json

import pytest

from embedsvc.registry import REGISTRY_FILE, load_registry


class TestRegistry:
    def test_five_families_registered(self, registry):
        assert sorted(e.name for e in registry) == [
            "ance", "bert", "contriever", "dpr", "simcse",
        ]

    def test_entries_document_provenance(self, registry):
        for entry in registry:
            assert "random init seed" in entry.provenance
            assert entry.name in entry.provenance

    def test_dims_and_pooling(self, registry):
        for entry in registry:
            assert entry.dim == 64
            assert entry.pooling in ("mean", "cls")
        by_name = {e.name: e for e in registry}
        assert by_name["bert"].pooling == "mean"
        assert by_name["dpr"].pooling == "cls"

    def test_checkpoints_are_standard_layout(self, registry, checkpoint_root):
        for entry in registry:
            ckpt = checkpoint_root / entry.name
            assert (ckpt / "config.json").exists()
            assert (ckpt / "tokenizer.json").exists()

    def test_registry_json_round_trip(self, checkpoint_root, registry):
        raw = json.loads((checkpoint_root / REGISTRY_FILE).read_text())
        assert len(raw) == len(registry)
        assert load_registry(checkpoint_root) == registry

    def test_missing_registry_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="embedsvc build"):
            load_registry(tmp_path)


class TestEngineBasics:
    def test_tokenize_framed_with_cls(self, engines, registry):
        engine = engines["bert"]
        cls_id = engine.tokenizer.cls_token_id
        sep_id = engine.tokenizer.sep_token_id
        ids = engine.tokenize(["what is theraderm used for"])
        assert ids[0][0] == cls_id
        assert ids[0][-1] == sep_id

    def test_deterministic_across_fresh_load(self, registry, engines):
        from embedsvc.engine import EmbeddingEngine

        entry = next(e for e in registry if e.name == "bert")
        fresh = EmbeddingEngine(entry)
        ids = engines["bert"].tokenize(["alpha beta gamma"])
        assert fresh.embed_ids(ids) == engines["bert"].embed_ids(ids)

    def test_pooling_modes_differ(self, engines):
        ids = engines["bert"].tokenize(["some shared text"])
        mean_vec = engines["bert"].embed_ids(ids)[0]
        cls_vec = engines["dpr"].embed_ids(engines["dpr"].tokenize(["some shared text"]))[0]
        assert mean_vec != cls_vec

    def test_invalid_token_id_names_location(self, engines):
        from embedsvc.engine import InvalidTokenId

        with pytest.raises(InvalidTokenId, match="sequence 1, position 2"):
            engines["bert"].embed_ids([[2, 5, 3], [2, 5, 10_000]])

    def test_empty_sequence_rejected(self, engines):
        with pytest.raises(ValueError, match="empty"):
            engines["bert"].embed_ids([[]])
