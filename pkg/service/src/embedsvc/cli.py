"""Service CLI: build checkpoints, serve the API, export stores."""

from __future__ import annotations

import argparse
import sys


def cmd_build(args: argparse.Namespace) -> int:
    from .registry import build_checkpoints

    entries = build_checkpoints(
        args.checkpoints,
        hidden_size=args.hidden_size,
        num_layers=args.layers,
        max_len=args.max_len,
    )
    for entry in entries:
        print(f"built {entry.name}: dim {entry.dim}, pooling {entry.pooling}, "
              f"vocab {entry.vocab_size} -> {entry.checkpoint}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .app import create_app

    app = create_app(checkpoints=args.checkpoints, batch_cap=args.batch_cap)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    from .engine import EmbeddingEngine
    from .export import export_store
    from .registry import load_registry

    entries = {e.name: e for e in load_registry(args.checkpoints)}
    if args.model not in entries:
        print(f"unknown model {args.model!r}; available: {sorted(entries)}", file=sys.stderr)
        return 2
    engine = EmbeddingEngine(entries[args.model])
    count = export_store(engine, args.corpus, args.out, batch_size=args.batch_size)
    print(f"wrote {count} vectors (dim {engine.entry.dim}) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embedsvc", description="embedding service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="materialize the registry checkpoints")
    p.add_argument("--checkpoints", required=True, help="checkpoint root directory")
    p.add_argument("--hidden-size", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--max-len", type=int, default=64)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--batch-cap", type=int, default=64)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="embed a corpus JSONL into a DRE1 store")
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
