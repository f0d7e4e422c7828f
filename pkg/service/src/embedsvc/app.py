"""HTTP surface: /health, /tokenize, /embed.

Stateless request handling over an immutable engine map. Error policy:
unknown model or invalid token id -> 400 with a message naming the
offender, oversized batch -> 413, unknown route -> 404 (FastAPI
default).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .engine import EmbeddingEngine, InvalidTokenId
from .registry import ModelRegistryEntry, load_registry

DEFAULT_BATCH_CAP = 64


class TokenizeRequest(BaseModel):
    model: str
    texts: list[str]


class EmbedRequest(BaseModel):
    model: str
    token_ids: list[list[int]]


def create_app(
    checkpoints: str | Path | None = None,
    engines: dict[str, EmbeddingEngine] | None = None,
    batch_cap: int = DEFAULT_BATCH_CAP,
) -> FastAPI:
    """Build the app from a checkpoint directory or pre-loaded engines."""
    if engines is None:
        if checkpoints is None:
            raise ValueError("need a checkpoints directory or pre-loaded engines")
        engines = {e.name: EmbeddingEngine(e) for e in load_registry(checkpoints)}
    entries: list[ModelRegistryEntry] = [engine.entry for engine in engines.values()]

    app = FastAPI(title="embedsvc")

    def engine_for(model: str) -> EmbeddingEngine:
        engine = engines.get(model)
        if engine is None:
            raise HTTPException(
                status_code=400,
                detail=f"unknown model {model!r}; available: {sorted(engines)}",
            )
        return engine

    @app.get("/health")
    def health():
        return {"status": "ok", "models": [e.public_info() for e in entries]}

    @app.post("/tokenize")
    def tokenize(request: TokenizeRequest):
        engine = engine_for(request.model)
        if len(request.texts) > batch_cap:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.texts)} exceeds cap {batch_cap}",
            )
        return {"token_ids": engine.tokenize(request.texts)}

    @app.post("/embed")
    def embed(request: EmbedRequest):
        engine = engine_for(request.model)
        if len(request.token_ids) > batch_cap:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.token_ids)} exceeds cap {batch_cap}",
            )
        try:
            embeddings = engine.embed_ids(request.token_ids)
        except InvalidTokenId as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"dim": engine.entry.dim, "embeddings": embeddings}

    return app
