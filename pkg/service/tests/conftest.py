"""Shared fixtures: checkpoints built once per session, an in-process
TestClient, and a live uvicorn server for wire-level tests."""

from __future__ import annotations

import threading
import time

import pytest
from fastapi.testclient import TestClient

from embedsvc.app import create_app
from embedsvc.engine import EmbeddingEngine
from embedsvc.registry import build_checkpoints, load_registry


@pytest.fixture(scope="session")
def checkpoint_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("checkpoints")
    build_checkpoints(root)
    return root


@pytest.fixture(scope="session")
def registry(checkpoint_root):
    return load_registry(checkpoint_root)


@pytest.fixture(scope="session")
def engines(registry):
    # Two loaded models keep the suite fast; the registry itself lists five.
    wanted = {"bert", "dpr"}
    return {e.name: EmbeddingEngine(e) for e in registry if e.name in wanted}


@pytest.fixture(scope="session")
def client(engines):
    return TestClient(create_app(engines=engines, batch_cap=8))


@pytest.fixture(scope="session")
def live_server(engines):
    """A real HTTP server on an ephemeral port (the wire the harness uses)."""
    import uvicorn

    app = create_app(engines=engines, batch_cap=64)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start")
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
