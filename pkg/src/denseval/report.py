"""Aggregation across datasets, performance-drop arithmetic, and report
emission (machine JSON plus aligned plain-text tables).

Table shapes mirror the usual presentation: one per-dataset table of
conditions (3 decimals), one cross-dataset average table (2 decimals),
and one drop table of clean-minus-perturbed deltas (3 decimals). JSON
keeps full double precision; rounding is display-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .metrics import MetricParams, write_metric_report
from .runner import ExperimentResult, save_result

# Column layout used by the summary tables when the configured cutoffs
# cover it; otherwise every metric@k combination is shown.
CANONICAL_COLUMNS = (("Acc", 1), ("Prec", 1), ("Rec", 1), ("NDCG", 10), ("MRR", 10), ("MAP", 100))


@dataclass
class DropTable:
    """clean_avg - perturbed_avg per (provider label, rate, metric@k)."""

    drops: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)

    def add(self, label: str, rate_label: str, drop: Mapping[str, float]) -> None:
        self.drops.setdefault(label, {})[rate_label] = dict(drop)

    def rows(self) -> list[tuple[str, dict[str, float]]]:
        return [
            (f"{label}-{rate}", metrics)
            for label, by_rate in self.drops.items()
            for rate, metrics in by_rate.items()
        ]


def aggregate_across_datasets(averages: Sequence[Mapping[str, float]]) -> dict[str, float]:
    """Unweighted arithmetic mean per metric@k across dataset averages."""
    if not averages:
        raise ValueError("nothing to aggregate")
    keys = set(averages[0])
    for avg in averages[1:]:
        if set(avg) != keys:
            raise ValueError(
                f"metric set mismatch: {sorted(keys)} vs {sorted(avg)}"
            )
    return {key: sum(avg[key] for avg in averages) / len(averages) for key in averages[0]}


def compute_drop(
    clean_avg: Mapping[str, float], perturbed_avg: Mapping[str, float]
) -> dict[str, float]:
    """Elementwise clean - perturbed; positive values mean degradation."""
    if set(clean_avg) != set(perturbed_avg):
        raise ValueError("metric set mismatch between clean and perturbed averages")
    return {key: clean_avg[key] - perturbed_avg[key] for key in clean_avg}


def display_columns(params: MetricParams) -> list[str]:
    preferred = [
        f"{metric}@{k}"
        for metric, k in CANONICAL_COLUMNS
        if metric in params.metrics and k in params.k_list
    ]
    if len(preferred) == len(CANONICAL_COLUMNS):
        return preferred
    return [f"{metric}@{k}" for metric in params.metrics for k in params.k_list]


def format_metric_table(
    rows: Sequence[tuple[str, Mapping[str, float]]],
    columns: Sequence[str],
    decimals: int,
    label_header: str = "Condition",
) -> str:
    label_width = max([len(label_header)] + [len(label) for label, _ in rows])
    widths = [max(len(col), decimals + 2) for col in columns]
    header = f"{label_header:<{label_width}}  " + "  ".join(
        f"{col:>{w}}" for col, w in zip(columns, widths)
    )
    lines = [header, "-" * len(header)]
    for label, values in rows:
        cells = "  ".join(f"{values[col]:>{w}.{decimals}f}" for col, w in zip(columns, widths))
        lines.append(f"{label:<{label_width}}  {cells}")
    return "\n".join(lines)


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_text(text: str, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def emit_report(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write per-dataset, averaged and drop tables plus full metric
    reports; returns every path written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = display_columns(result.params)
    written: list[Path] = []

    def emit(name: str, payload: dict, rows, decimals: int, title: str, header: str) -> None:
        json_path = out_dir / f"{name}.json"
        _write_json(payload, json_path)
        written.append(json_path)
        text_path = out_dir / f"{name}.txt"
        table = format_metric_table(rows, columns, decimals, label_header=header)
        _write_text(f"{title}\n\n{table}", text_path)
        written.append(text_path)

    for name, conds in result.datasets.items():
        rows = [(cond, conds[cond].averaged) for cond in result.conditions if cond in conds]
        payload = {
            "dataset": name,
            "provider": result.provider_label,
            "conditions": {cond: rep.averaged for cond, rep in conds.items()},
            "q_evaluated": {cond: rep.q_evaluated for cond, rep in conds.items()},
            "q_excluded": {cond: rep.q_excluded for cond, rep in conds.items()},
        }
        emit(
            f"{name}_results",
            payload,
            rows,
            decimals=3,
            title=f"Summary of results for dataset {name!r} ({result.provider_label})",
            header="Condition",
        )
        for cond, rep in conds.items():
            metrics_path = out_dir / f"{name}_{cond}_metrics.json"
            write_metric_report(rep, result.params, metrics_path)
            written.append(metrics_path)

    complete = [name for name in result.datasets if name not in result.errors]
    if complete:
        averaged_by_cond = {
            cond: aggregate_across_datasets(
                [result.datasets[name][cond].averaged for name in complete]
            )
            for cond in result.conditions
            if all(cond in result.datasets[name] for name in complete)
        }
        rows = [(cond, avg) for cond, avg in averaged_by_cond.items()]
        emit(
            "average_results",
            {
                "datasets": complete,
                "provider": result.provider_label,
                "conditions": averaged_by_cond,
            },
            rows,
            decimals=2,
            title=f"Average performance over {', '.join(complete)} ({result.provider_label})",
            header="Condition",
        )

        if "clean" in averaged_by_cond:
            drop_table = DropTable()
            for cond, avg in averaged_by_cond.items():
                if cond == "clean":
                    continue
                drop_table.add(
                    result.provider_label, cond, compute_drop(averaged_by_cond["clean"], avg)
                )
            if drop_table.drops:
                emit(
                    "performance_drop",
                    {"provider": result.provider_label, "drops": drop_table.drops},
                    drop_table.rows(),
                    decimals=3,
                    title=f"Average performance drop over {', '.join(complete)}",
                    header="Model",
                )

    result_path = out_dir / "result.json"
    save_result(result, result_path)
    written.append(result_path)
    return written
