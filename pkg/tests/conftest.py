"""Shared fixtures: a minimal seven-token vocabulary, a consistent toy dataset
on disk, and a stub embedding HTTP service."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from denseval.data import Document, Judgment, Query, write_corpus, write_qrels, write_queries
from denseval.tokenizer import Vocabulary, save_vocab


@pytest.fixture
def seven_token_vocab() -> Vocabulary:
    return Vocabulary.from_tokens(["[PAD]", "[UNK]", "[CLS]", "[SEP]", "hello", "wor", "##ld"])


@pytest.fixture
def word_vocab() -> Vocabulary:
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
    tokens += ["what", "is", "used", "for", "thera", "##derm", "##in", "a", "the"]
    return Vocabulary.from_tokens(tokens)


@pytest.fixture
def toy_dataset(tmp_path):
    """Three docs, two queries, consistent qrels, plus a vocab file."""
    docs = [
        Document(id="d1", title="T", text="hello world"),
        Document(id="d2", title="", text="hello hello"),
        Document(id="d3", title="World", text="world world hello"),
    ]
    queries = [Query(id="q1", text="hello world"), Query(id="q2", text="hello hello")]
    qrels = [
        Judgment(query_id="q1", doc_id="d1", relevance=1),
        Judgment(query_id="q2", doc_id="d2", relevance=2),
        Judgment(query_id="q2", doc_id="d1", relevance=0),
    ]
    vocab = Vocabulary.from_tokens(
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "hello", "wor", "##ld", "world", "t"]
    )
    paths = {
        "corpus": tmp_path / "corpus.jsonl",
        "queries": tmp_path / "queries.jsonl",
        "qrels": tmp_path / "qrels.tsv",
        "vocab": tmp_path / "vocab.txt",
    }
    write_corpus(docs, paths["corpus"])
    write_queries(queries, paths["queries"])
    write_qrels(qrels, paths["qrels"])
    save_vocab(vocab, paths["vocab"])
    return {"docs": docs, "queries": queries, "qrels": qrels, "vocab": vocab, "paths": paths}


class StubEmbedService:
    """Minimal /health, /tokenize, /embed server for client tests.

    Each sequence embeds to a constant vector derived from its ids, so
    tests can predict responses. ``dim_per_request`` lets a test force a
    dimension change between chunked requests.
    """

    def __init__(self) -> None:
        self.dim = 4
        self.dim_per_request: list[int] | None = None
        self.fail_status: int | None = None
        self.requests_seen = 0
        self.vocab_size = 1000
        self._server: ThreadingHTTPServer | None = None

    def embed_one(self, ids, dim):
        total = sum(ids) + 1.0
        return [(total + j) % 7.0 + 1.0 for j in range(dim)]

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def start(self) -> None:
        service = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, status, payload):
                body = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/health":
                    self._send(
                        200,
                        {
                            "status": "ok",
                            "models": [
                                {
                                    "name": "stub",
                                    "dim": service.dim,
                                    "vocab_size": service.vocab_size,
                                    "pooling": "mean",
                                }
                            ],
                        },
                    )
                else:
                    self._send(404, {"detail": "not found"})

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length))
                if service.fail_status is not None:
                    self._send(service.fail_status, {"detail": "stub failure"})
                    return
                if self.path == "/embed":
                    idx = service.requests_seen
                    service.requests_seen += 1
                    if service.dim_per_request is not None:
                        dim = service.dim_per_request[min(idx, len(service.dim_per_request) - 1)]
                    else:
                        dim = service.dim
                    embeddings = [service.embed_one(ids, dim) for ids in payload["token_ids"]]
                    self._send(200, {"dim": dim, "embeddings": embeddings})
                elif self.path == "/tokenize":
                    token_ids = [
                        [2] + [(hash(w) % 90) + 10 for w in text.split()] + [3]
                        for text in payload["texts"]
                    ]
                    self._send(200, {"token_ids": token_ids})
                else:
                    self._send(404, {"detail": "not found"})

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=self._server.serve_forever, daemon=True).start()

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()


@pytest.fixture
def stub_service():
    service = StubEmbedService()
    service.start()
    yield service
    service.stop()
