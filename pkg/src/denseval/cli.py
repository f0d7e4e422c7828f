"""Command-line interface.

Subcommands: validate, embed-corpus, run, sweep, show-perturbation,
report. Exit codes: 0 success, 1 validation failure, 2 provider or IO
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .data import DatasetError, load_corpus, load_qrels, load_queries, validate_dataset
from .embed import ProviderConfig, ProviderError, StoreError, write_store
from .perturb import format_perturbation_table, render_perturbation_table
from .report import display_columns, emit_report, format_metric_table
from .runner import (
    ExperimentConfig,
    ValidationFailure,
    embed_dataset_stores,
    load_result,
    perturbation_preview,
    run_experiment,
)
from .tokenizer import VocabularyError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PROVIDER_IO = 2


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment config JSON")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument(
        "--perturb-rate", type=float, default=None, help="perturbation rate (default 0.1)"
    )
    parser.add_argument("--k", default=None, help="comma-separated metric cutoffs")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument(
        "--provider", choices=("reference", "file", "service"), default=None,
        help="override provider kind",
    )


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_json_file(args.config)
    updates: dict = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.k is not None:
        updates["k_list"] = tuple(int(k) for k in args.k.split(","))
    if args.out is not None:
        updates["output_dir"] = args.out
    if args.provider is not None and args.provider != config.provider.kind:
        if args.provider == "reference":
            updates["provider"] = ProviderConfig.reference()
        else:
            raise ValueError(
                f"--provider {args.provider} needs matching settings in the config file"
            )
    return dataclasses.replace(config, **updates) if updates else config


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    ok = True
    for spec in config.datasets:
        corpus = load_corpus(spec.corpus)
        queries = load_queries(spec.queries)
        qrels = load_qrels(spec.qrels)
        report = validate_dataset(corpus, queries, qrels)
        status = "OK" if report.is_valid else "INVALID"
        print(
            f"{spec.name}: {status} ({report.num_documents} docs, "
            f"{report.num_queries} queries, {report.num_judgments} judgments)"
        )
        for j in report.dangling_qrels:
            print(f"  dangling qrel: query={j.query_id} doc={j.doc_id}")
        for dup in report.duplicate_ids:
            print(f"  duplicate id: {dup}")
        for qid in report.zero_positive_queries:
            print(f"  query with no positive judgment: {qid}")
        ok = ok and report.is_valid
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_embed_corpus(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec in config.datasets:
        corpus_store, query_store = embed_dataset_stores(spec, config)
        corpus_path = out_dir / f"{spec.name}.corpus.dre1"
        query_path = out_dir / f"{spec.name}.queries.dre1"
        write_store(corpus_store, corpus_path)
        write_store(query_store, query_path)
        print(f"{spec.name}: wrote {corpus_path} ({len(corpus_store)} vectors, dim {corpus_store.dim})")
        print(f"{spec.name}: wrote {query_path} ({len(query_store)} vectors)")
    return EXIT_OK


def _run_and_report(config: ExperimentConfig, rates: list[float]) -> int:
    result = run_experiment(config, rates)
    written = emit_report(result, config.output_dir)
    for path in written:
        print(f"wrote {path}")
    columns = display_columns(result.params)
    for name, conds in result.datasets.items():
        rows = [(cond, conds[cond].averaged) for cond in result.conditions if cond in conds]
        print(f"\n{name}:")
        print(format_metric_table(rows, columns, decimals=3))
    if result.errors:
        for name, message in result.errors.items():
            print(f"error on dataset {name}: {message}", file=sys.stderr)
        return EXIT_PROVIDER_IO
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    rate = args.perturb_rate if args.perturb_rate is not None else config.default_rate
    rates = [] if config.provider.kind == "file" else [rate]
    return _run_and_report(config, rates)


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    return _run_and_report(config, list(config.perturb_rates))


def cmd_show_perturbation(args: argparse.Namespace) -> int:
    config = _load_config(args)
    rate = args.perturb_rate if args.perturb_rate is not None else config.default_rate
    spec = config.datasets[0]
    if args.dataset is not None:
        matches = [d for d in config.datasets if d.name == args.dataset]
        if not matches:
            raise ValueError(f"no dataset named {args.dataset!r} in config")
        spec = matches[0]
    records, vocab = perturbation_preview(spec, config, rate, limit=args.limit)
    print(format_perturbation_table(render_perturbation_table(records, vocab)))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    result = load_result(args.result)
    out_dir = args.out if args.out is not None else str(Path(args.result).parent)
    for path in emit_report(result, out_dir):
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="denseval",
        description="Dense-retrieval robustness benchmark: clean vs token-perturbed evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check dataset files for consistency")
    _common_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("embed-corpus", help="embed corpora and queries into store files")
    _common_flags(p)
    p.set_defaults(func=cmd_embed_corpus)

    p = sub.add_parser("run", help="clean + single-rate perturbed evaluation")
    _common_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="clean + every configured perturbation rate")
    _common_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("show-perturbation", help="print before/after de-tokenized queries")
    _common_flags(p)
    p.add_argument("--dataset", default=None, help="dataset name (default: first)")
    p.add_argument("--limit", type=int, default=10, help="number of queries to show")
    p.set_defaults(func=cmd_show_perturbation)

    p = sub.add_parser("report", help="re-emit tables from a saved result.json")
    p.add_argument("--result", required=True, help="path to result.json")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, VocabularyError, ValidationFailure) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ProviderError, StoreError, OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER_IO


if __name__ == "__main__":
    sys.exit(main())
