"""Model registry: which checkpoints the service wraps, and how to
materialize them.

No model hub is assumed reachable. `build_checkpoints` constructs one
real (BERT-architecture) checkpoint per supported retriever family with
deterministic, seeded random initialization and saves it to disk in
standard `save_pretrained` layout; the registry JSON records exactly
what each name points at, including that the weights are local
random-init stand-ins rather than the published pretrained ones.
Pooling follows each family's convention (CLS-vector models vs mean
pooling).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

REGISTRY_FILE = "registry.json"

# (name, init seed, pooling). Names mirror the retriever families the
# service stands in for; pooling matches each family's usual reduction.
MODEL_SPECS = (
    ("bert", 101, "mean"),
    ("dpr", 202, "cls"),
    ("contriever", 303, "mean"),
    ("simcse", 404, "cls"),
    ("ance", 505, "cls"),
)


@dataclass(frozen=True)
class ModelRegistryEntry:
    name: str
    checkpoint: str
    dim: int
    pooling: str
    vocab_size: int
    max_len: int
    provenance: str

    def public_info(self) -> dict:
        """The fields exposed on /health."""
        return {
            "name": self.name,
            "dim": self.dim,
            "vocab_size": self.vocab_size,
            "pooling": self.pooling,
        }


def _wordpiece_vocab() -> list[str]:
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    chars = "abcdefghijklmnopqrstuvwxyz0123456789"
    tokens += list(chars)
    tokens += ["##" + c for c in chars]
    tokens += list("'-.,!?")
    return tokens


def _build_tokenizer(vocab: list[str]):
    from tokenizers import Tokenizer
    from tokenizers.models import WordPiece
    from tokenizers.normalizers import BertNormalizer
    from tokenizers.pre_tokenizers import BertPreTokenizer
    from tokenizers.processors import TemplateProcessing
    from transformers import BertTokenizerFast

    backend = Tokenizer(
        WordPiece(
            vocab={t: i for i, t in enumerate(vocab)},
            unk_token="[UNK]",
            continuing_subword_prefix="##",
        )
    )
    backend.normalizer = BertNormalizer(lowercase=True)
    backend.pre_tokenizer = BertPreTokenizer()
    backend.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab.index("[CLS]")), ("[SEP]", vocab.index("[SEP]"))],
    )
    return BertTokenizerFast(
        tokenizer_object=backend,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


def build_checkpoints(
    root: str | Path,
    hidden_size: int = 64,
    num_layers: int = 2,
    num_heads: int = 2,
    max_len: int = 64,
) -> list[ModelRegistryEntry]:
    """Materialize every registry checkpoint under ``root`` and write
    the registry JSON. Idempotent: rebuilding overwrites in place with
    identical weights (initialization is seeded)."""
    import torch
    from transformers import BertConfig, BertModel
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    vocab = _wordpiece_vocab()
    entries: list[ModelRegistryEntry] = []
    for name, seed, pooling in MODEL_SPECS:
        ckpt_dir = root / name
        ckpt_dir.mkdir(exist_ok=True)
        tokenizer = _build_tokenizer(vocab)
        tokenizer.save_pretrained(ckpt_dir)
        config = BertConfig(
            vocab_size=len(vocab),
            hidden_size=hidden_size,
            num_hidden_layers=num_layers,
            num_attention_heads=num_heads,
            intermediate_size=hidden_size * 4,
            max_position_embeddings=max_len,
            pad_token_id=vocab.index("[PAD]"),
        )
        torch.manual_seed(seed)
        model = BertModel(config)
        model.eval()
        model.save_pretrained(ckpt_dir)
        entries.append(
            ModelRegistryEntry(
                name=name,
                checkpoint=str(ckpt_dir),
                dim=hidden_size,
                pooling=pooling,
                vocab_size=len(vocab),
                max_len=max_len,
                provenance=(
                    f"locally materialized BERT architecture "
                    f"({num_layers} layers, hidden {hidden_size}), random init seed {seed}; "
                    f"stand-in for the {name} retriever family, not its published weights"
                ),
            )
        )
    with open(root / REGISTRY_FILE, "w", encoding="utf-8") as fh:
        json.dump([asdict(e) for e in entries], fh, indent=2)
        fh.write("\n")
    return entries


def load_registry(root: str | Path) -> list[ModelRegistryEntry]:
    path = Path(root) / REGISTRY_FILE
    if not path.exists():
        raise FileNotFoundError(
            f"no {REGISTRY_FILE} under {root}; run `embedsvc build` first"
        )
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = [ModelRegistryEntry(**item) for item in raw]
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate model names in registry: {names}")
    return entries
