"""embedsvc: transformer-checkpoint embedding service for the denseval
harness (/health, /tokenize, /embed, DRE1 export)."""

from .app import create_app
from .engine import EmbeddingEngine, InvalidTokenId
from .export import export_store, read_corpus
from .registry import ModelRegistryEntry, build_checkpoints, load_registry

__version__ = "0.1.0"
