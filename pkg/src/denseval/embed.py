"""Embedding providers and the binary embedding store.

Three providers sit behind one config type: a deterministic hashed
bag-of-tokens reference embedder (testable without any neural model), a
file provider that loads a previously written store, and an HTTP client
for an external embedding service.

Store format (little-endian, bit-exact):
  magic "DRE1" | u32 version=1 | u32 dim | u64 count | u8 normalized
  then per record: u16 id byte length | id UTF-8 bytes | dim * f32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

from .rng import GOLDEN_GAMMA, splitmix64_np
from .tokenizer import TokenSequence

STORE_MAGIC = b"DRE1"
STORE_VERSION = 1


class StoreError(ValueError):
    """Malformed or truncated embedding store file."""


class ProviderError(RuntimeError):
    """Embedding provider failure (connection, protocol, dimension)."""


@dataclass(frozen=True)
class ProviderConfig:
    """Exactly one provider kind's parameters populated."""

    kind: str
    dim: int | None = None
    seed: int | None = None
    path: str | None = None
    endpoint: str | None = None
    model: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "reference":
            ok = self.dim is not None and self.seed is not None
            ok = ok and self.path is None and self.endpoint is None and self.model is None
            if not ok or (self.dim is not None and self.dim <= 0):
                raise ValueError("reference provider needs dim > 0 and seed, nothing else")
        elif self.kind == "file":
            if self.path is None or any(
                v is not None for v in (self.dim, self.seed, self.endpoint, self.model)
            ):
                raise ValueError("file provider needs path, nothing else")
        elif self.kind == "service":
            if (
                self.endpoint is None
                or self.model is None
                or any(v is not None for v in (self.dim, self.seed, self.path))
            ):
                raise ValueError("service provider needs endpoint and model, nothing else")
        else:
            raise ValueError(f"unknown provider kind {self.kind!r}")

    @classmethod
    def reference(cls, dim: int = 64, seed: int = 0) -> "ProviderConfig":
        return cls(kind="reference", dim=dim, seed=seed)

    @classmethod
    def file(cls, path: str) -> "ProviderConfig":
        return cls(kind="file", path=path)

    @classmethod
    def service(cls, endpoint: str, model: str) -> "ProviderConfig":
        return cls(kind="service", endpoint=endpoint, model=model)


@dataclass
class EmbeddingStore:
    """Fixed-dimension vectors keyed by string id, stored as float32."""

    dim: int
    normalized: bool
    records: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ValueError("store dim must be positive")
        for rec_id, vec in self.records.items():
            self.records[rec_id] = self._check(rec_id, vec)

    def _check(self, rec_id: str, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.float32)
        if vec.shape != (self.dim,):
            raise ValueError(f"record {rec_id!r} has shape {vec.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"record {rec_id!r} has non-finite components")
        return vec

    def add(self, rec_id: str, vec: np.ndarray) -> None:
        if rec_id in self.records:
            raise ValueError(f"duplicate record id {rec_id!r}")
        self.records[rec_id] = self._check(rec_id, vec)

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.normalized == other.normalized
            and self.records.keys() == other.records.keys()
            and all(
                np.array_equal(vec, other.records[rec_id])
                for rec_id, vec in self.records.items()
            )
        )


def _row_seeds(token_ids: np.ndarray, seed: int) -> np.ndarray:
    """Stream seed per token id: splitmix64(seed XOR (id+1)*golden-gamma)."""
    mixed = (token_ids.astype(np.uint64) + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
    return splitmix64_np(np.uint64(seed) ^ mixed)


def reference_token_matrix(token_ids: Sequence[int], dim: int, seed: int) -> np.ndarray:
    """Unit-norm rows of deterministic pseudo-random token vectors.

    Row for token t is dim outputs of a splitmix64 stream seeded from
    (seed, t), each mapped to [-1, 1) with 53 random bits, then
    L2-normalized. Fully vectorized; bit-identical to the scalar path.
    """
    if dim <= 0:
        raise ValueError("dim must be positive")
    ids = np.asarray(token_ids, dtype=np.uint64)
    seeds = _row_seeds(ids, seed)
    # j-th stream output is mix(state + j*gamma); splitmix64_np adds one
    # gamma itself, so offset by j*gamma for j = 0..dim-1.
    offsets = (np.arange(dim, dtype=np.uint64) * np.uint64(GOLDEN_GAMMA))
    raw = splitmix64_np(seeds[:, None] + offsets[None, :])
    comps = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-52 - 1.0
    norms = np.sqrt((comps * comps).sum(axis=1))
    return comps / norms[:, None]


def reference_token_vector(token_id: int, dim: int, seed: int) -> np.ndarray:
    """Deterministic unit vector for one token id."""
    return reference_token_matrix([token_id], dim, seed)[0]


def embed_sequence(seq: TokenSequence, config: ProviderConfig, pad_id: int) -> np.ndarray:
    """Hashed bag-of-tokens embedding: mean token vector over non-[PAD]
    positions, L2-normalized.

    Token ids are summed in sorted order, which makes the bag-of-tokens
    permutation invariance exact rather than approximate.
    """
    if config.kind != "reference":
        raise ValueError("embed_sequence requires a reference provider config")
    ids = sorted(t for t in seq if t != pad_id)
    if not ids:
        raise ValueError("cannot embed an all-[PAD] sequence")
    vectors = reference_token_matrix(ids, config.dim, config.seed)
    mean = vectors.mean(axis=0)
    return mean / np.linalg.norm(mean)


class ReferenceEmbedder:
    """Batch reference embedding with a cached per-vocabulary token matrix."""

    def __init__(self, config: ProviderConfig, vocab_size: int) -> None:
        if config.kind != "reference":
            raise ValueError("ReferenceEmbedder requires a reference provider config")
        self.config = config
        self.vocab_size = vocab_size
        self._matrix = reference_token_matrix(range(vocab_size), config.dim, config.seed)

    def embed(self, seq: TokenSequence, pad_id: int) -> np.ndarray:
        ids = sorted(t for t in seq if t != pad_id)
        if not ids:
            raise ValueError("cannot embed an all-[PAD] sequence")
        if any(t < 0 or t >= self.vocab_size for t in ids):
            raise ValueError("token id outside vocabulary")
        mean = self._matrix[ids].mean(axis=0)
        return mean / np.linalg.norm(mean)

    def embed_batch(self, seqs: Sequence[TokenSequence], pad_id: int) -> list[np.ndarray]:
        return [self.embed(seq, pad_id) for seq in seqs]


def fetch_embeddings(
    batches: Sequence[TokenSequence],
    config: ProviderConfig,
    batch_size: int = 64,
    timeout: float = 60.0,
) -> list[np.ndarray]:
    """Fetch one vector per sequence from an embedding service.

    Requests are issued in bounded chunks and reassembled in order. An
    empty input returns immediately without touching the network.
    """
    if config.kind != "service":
        raise ValueError("fetch_embeddings requires a service provider config")
    if not batches:
        return []
    base = config.endpoint.rstrip("/")
    vectors: list[np.ndarray] = []
    dim: int | None = None
    for start in range(0, len(batches), batch_size):
        chunk = batches[start : start + batch_size]
        payload = {"model": config.model, "token_ids": [list(seq.ids) for seq in chunk]}
        try:
            resp = requests.post(f"{base}/embed", json=payload, timeout=timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"embedding service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"embedding service returned {resp.status_code}: {resp.text.strip()}"
            )
        body = resp.json()
        chunk_dim = int(body["dim"])
        if dim is None:
            dim = chunk_dim
        elif chunk_dim != dim:
            raise ProviderError(f"dimension mismatch across batch: {dim} then {chunk_dim}")
        embeddings = body["embeddings"]
        if len(embeddings) != len(chunk):
            raise ProviderError(
                f"expected {len(chunk)} embeddings, got {len(embeddings)}"
            )
        for emb in embeddings:
            vec = np.asarray(emb, dtype=np.float64)
            if vec.shape != (dim,):
                raise ProviderError(f"embedding of shape {vec.shape}, expected ({dim},)")
            vectors.append(vec)
    return vectors


def service_model_info(config: ProviderConfig, timeout: float = 10.0) -> dict:
    """Look up the configured model's registry entry via /health."""
    if config.kind != "service":
        raise ValueError("service_model_info requires a service provider config")
    base = config.endpoint.rstrip("/")
    try:
        resp = requests.get(f"{base}/health", timeout=timeout)
    except requests.RequestException as exc:
        raise ProviderError(f"embedding service unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise ProviderError(f"health check returned {resp.status_code}: {resp.text.strip()}")
    for entry in resp.json().get("models", []):
        if entry.get("name") == config.model:
            return entry
    raise ProviderError(f"model {config.model!r} not offered by service at {base}")


def service_tokenize(
    texts: Sequence[str],
    config: ProviderConfig,
    batch_size: int = 64,
    timeout: float = 60.0,
) -> list[TokenSequence]:
    """Tokenize texts with the service's own tokenizer, order preserved."""
    if config.kind != "service":
        raise ValueError("service_tokenize requires a service provider config")
    if not texts:
        return []
    base = config.endpoint.rstrip("/")
    sequences: list[TokenSequence] = []
    for start in range(0, len(texts), batch_size):
        chunk = list(texts[start : start + batch_size])
        try:
            resp = requests.post(
                f"{base}/tokenize", json={"model": config.model, "texts": chunk}, timeout=timeout
            )
        except requests.RequestException as exc:
            raise ProviderError(f"embedding service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"tokenize returned {resp.status_code}: {resp.text.strip()}"
            )
        token_ids = resp.json()["token_ids"]
        if len(token_ids) != len(chunk):
            raise ProviderError(f"expected {len(chunk)} token lists, got {len(token_ids)}")
        sequences.extend(TokenSequence(ids) for ids in token_ids)
    return sequences


def write_store(store: EmbeddingStore, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(struct.pack("<II", STORE_VERSION, store.dim))
        fh.write(struct.pack("<Q", len(store.records)))
        fh.write(struct.pack("<B", 1 if store.normalized else 0))
        for rec_id, vec in store.records.items():
            id_bytes = rec_id.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise StoreError(f"record id longer than 65535 bytes: {rec_id[:32]!r}...")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        offset = fh.tell() - len(buf)
        raise StoreError(f"truncated store file: expected {what} at byte {offset}")
    return buf


def read_store(path: str | Path) -> EmbeddingStore:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != STORE_MAGIC:
            raise StoreError(f"bad magic {magic!r}, expected {STORE_MAGIC!r}")
        version, dim = struct.unpack("<II", _read_exact(fh, 8, "header"))
        if version != STORE_VERSION:
            raise StoreError(f"unsupported store version {version}")
        (count,) = struct.unpack("<Q", _read_exact(fh, 8, "record count"))
        (norm_flag,) = struct.unpack("<B", _read_exact(fh, 1, "normalized flag"))
        records: dict[str, np.ndarray] = {}
        for _ in range(count):
            (id_len,) = struct.unpack("<H", _read_exact(fh, 2, "id length"))
            rec_id = _read_exact(fh, id_len, "record id").decode("utf-8")
            if rec_id in records:
                raise StoreError(f"duplicate record id {rec_id!r}")
            raw = _read_exact(fh, 4 * dim, f"vector for {rec_id!r}")
            records[rec_id] = np.frombuffer(raw, dtype="<f4").astype(np.float32)
        trailing = fh.read(1)
        if trailing:
            raise StoreError(f"trailing bytes after last record at byte {fh.tell() - 1}")
    return EmbeddingStore(dim=dim, normalized=bool(norm_flag), records=records)
