"""Inference engine: one loaded checkpoint, tokenize + embed.

Embeddings are computed in no-grad eval mode (deterministic for a fixed
checkpoint), pooled per the registry entry (masked mean or the [CLS]
position) and L2-normalized. The attention mask is derived from the ids
themselves (anything that is not [PAD] counts), so perturbed ids that
land on arbitrary vocabulary entries flow through the encoder exactly
like real tokens.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import torch

from .registry import ModelRegistryEntry


class InvalidTokenId(ValueError):
    """A token id outside the model's vocabulary; carries its location."""

    def __init__(self, sequence_index: int, position: int, token_id: int, vocab_size: int):
        self.sequence_index = sequence_index
        self.position = position
        super().__init__(
            f"token id {token_id} at sequence {sequence_index}, position {position} "
            f"is outside the vocabulary (size {vocab_size})"
        )


class EmbeddingEngine:
    def __init__(self, entry: ModelRegistryEntry) -> None:
        from transformers import AutoTokenizer, BertModel
        from transformers.utils import logging as hf_logging

        hf_logging.disable_progress_bar()
        self.entry = entry
        self.tokenizer = AutoTokenizer.from_pretrained(entry.checkpoint)
        self.model = BertModel.from_pretrained(entry.checkpoint)
        self.model.eval()
        self.pad_id = int(self.tokenizer.pad_token_id)

    def tokenize(self, texts: Sequence[str]) -> list[list[int]]:
        """The model's own tokenizer output including special tokens,
        unpadded, truncated to the model's maximum length."""
        if not texts:
            return []
        encoded = self.tokenizer(
            list(texts), truncation=True, max_length=self.entry.max_len, padding=False
        )
        return [list(ids) for ids in encoded["input_ids"]]

    def embed_ids(self, batches: Sequence[Sequence[int]]) -> list[list[float]]:
        """One normalized vector per id sequence, order preserved."""
        if not batches:
            return []
        vocab_size = self.entry.vocab_size
        for si, ids in enumerate(batches):
            if not ids:
                raise ValueError(f"sequence {si} is empty")
            for pi, token_id in enumerate(ids):
                if not 0 <= int(token_id) < vocab_size:
                    raise InvalidTokenId(si, pi, int(token_id), vocab_size)
        width = min(max(len(ids) for ids in batches), self.entry.max_len)
        input_ids = torch.full((len(batches), width), self.pad_id, dtype=torch.long)
        for row, ids in enumerate(batches):
            ids = list(ids)[:width]
            input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        attention_mask = (input_ids != self.pad_id).long()
        # An all-[PAD] sequence still needs one attended position to
        # keep the pooled vector finite.
        attention_mask[attention_mask.sum(dim=1) == 0, 0] = 1
        with torch.no_grad():
            hidden = self.model(input_ids=input_ids, attention_mask=attention_mask)
        states = hidden.last_hidden_state  # (n, width, dim)
        if self.entry.pooling == "cls":
            pooled = states[:, 0, :]
        else:
            mask = attention_mask.unsqueeze(-1).to(states.dtype)
            pooled = (states * mask).sum(dim=1) / mask.sum(dim=1)
        vectors = pooled.numpy().astype(np.float64)
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        vectors = vectors / np.maximum(norms, 1e-12)
        return [vec.tolist() for vec in vectors]
