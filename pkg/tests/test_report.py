"""Tests for cross-dataset aggregation, drop arithmetic and report files."""

import json

import pytest

from denseval.metrics import MetricParams, MetricReport
from denseval.report import (
    DropTable,
    aggregate_across_datasets,
    compute_drop,
    display_columns,
    emit_report,
    format_metric_table,
)
from denseval.runner import ExperimentResult, load_result


def metric_report(averaged, q=10):
    per_query = {f"q{i}": dict(averaged) for i in range(2)}
    return MetricReport(per_query=per_query, averaged=dict(averaged), q_evaluated=q)


class TestAggregate:
    def test_three_dataset_mean(self):
        # Per-dataset Acc@1 for one model across three datasets.
        values = [{"Acc@1": 0.523}, {"Acc@1": 0.952}, {"Acc@1": 0.821}]
        result = aggregate_across_datasets(values)
        assert result["Acc@1"] == pytest.approx(0.765, abs=5e-4)
        assert round(result["Acc@1"], 2) == 0.77

    def test_ndcg_mean(self):
        values = [{"NDCG@10": 0.493}, {"NDCG@10": 0.964}, {"NDCG@10": 0.756}]
        result = aggregate_across_datasets(values)
        assert result["NDCG@10"] == pytest.approx(0.7377, abs=5e-4)
        assert round(result["NDCG@10"], 2) == 0.74

    def test_single_dataset_identity(self):
        avg = {"Acc@1": 0.5, "MAP@100": 0.25}
        assert aggregate_across_datasets([avg]) == avg

    def test_metric_set_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            aggregate_across_datasets([{"Acc@1": 0.5}, {"Prec@1": 0.5}])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate_across_datasets([])


class TestComputeDrop:
    def test_five_percent_drop(self):
        clean = aggregate_across_datasets(
            [{"Acc@1": 0.523}, {"Acc@1": 0.952}, {"Acc@1": 0.821}]
        )
        perturbed = aggregate_across_datasets(
            [{"Acc@1": 0.50}, {"Acc@1": 0.93}, {"Acc@1": 0.78}]
        )
        drop = compute_drop(clean, perturbed)
        assert drop["Acc@1"] == pytest.approx(0.0287, abs=5e-4)
        assert round(drop["Acc@1"], 3) == 0.029

    def test_twenty_percent_drop(self):
        clean = aggregate_across_datasets(
            [{"Acc@1": 0.142}, {"Acc@1": 0.769}, {"Acc@1": 0.636}]
        )
        perturbed = aggregate_across_datasets(
            [{"Acc@1": 0.088}, {"Acc@1": 0.436}, {"Acc@1": 0.333}]
        )
        assert compute_drop(clean, perturbed)["Acc@1"] == pytest.approx(0.230, abs=5e-4)

    def test_identical_inputs_zero_drop(self):
        avg = {"Acc@1": 0.7, "NDCG@10": 0.6}
        assert compute_drop(avg, dict(avg)) == {"Acc@1": 0.0, "NDCG@10": 0.0}

    def test_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            compute_drop({"Acc@1": 0.5}, {"Prec@1": 0.4})

    def test_drop_is_exact_before_rounding(self):
        drop = compute_drop({"Acc@1": 0.7653}, {"Acc@1": 0.7367})
        assert drop["Acc@1"] == 0.7653 - 0.7367


class TestDropTable:
    def test_rows_are_label_rate_pairs(self):
        table = DropTable()
        table.add("modelA", "perturbed@0.05", {"Acc@1": 0.03})
        table.add("modelA", "perturbed@0.2", {"Acc@1": 0.17})
        labels = [label for label, _ in table.rows()]
        assert labels == ["modelA-perturbed@0.05", "modelA-perturbed@0.2"]


class TestDisplayColumns:
    def test_paper_order_when_available(self):
        params = MetricParams(k_list=(1, 10, 100))
        assert display_columns(params) == [
            "Acc@1", "Prec@1", "Rec@1", "NDCG@10", "MRR@10", "MAP@100",
        ]

    def test_fallback_to_all_combinations(self):
        params = MetricParams(k_list=(5,))
        cols = display_columns(params)
        assert "Acc@5" in cols and "MAP@5" in cols
        assert len(cols) == 6

    def test_table_rounding(self):
        rows = [("clean", {"Acc@1": 0.765333}), ("pert", {"Acc@1": 0.736666})]
        text = format_metric_table(rows, ["Acc@1"], decimals=2)
        assert "0.77" in text and "0.74" in text
        text3 = format_metric_table(rows, ["Acc@1"], decimals=3)
        assert "0.765" in text3 and "0.737" in text3


def make_result(num_datasets=3):
    averaged = {
        "Acc@1": 0.9, "Prec@1": 0.9, "Rec@1": 0.8,
        "NDCG@10": 0.95, "MRR@10": 0.92, "MAP@100": 0.88,
    }
    perturbed = {key: value - 0.1 for key, value in averaged.items()}
    perturbed2 = {key: value - 0.3 for key, value in averaged.items()}
    datasets = {}
    for i in range(num_datasets):
        datasets[f"ds{i}"] = {
            "clean": metric_report(averaged),
            "perturbed@0.05": metric_report(perturbed),
            "perturbed@0.2": metric_report(perturbed2),
        }
    return ExperimentResult(
        conditions=["clean", "perturbed@0.05", "perturbed@0.2"],
        datasets=datasets,
        params=MetricParams(),
        provider_label="reference",
        provenance={"master_seed": 0, "config_hash": "x", "created_at": "t"},
    )


class TestEmitReport:
    def test_file_enumeration(self, tmp_path):
        result = make_result(num_datasets=3)
        written = emit_report(result, tmp_path)
        names = {p.name for p in written}
        for i in range(3):
            assert f"ds{i}_results.json" in names
            assert f"ds{i}_results.txt" in names
        assert "average_results.json" in names
        assert "average_results.txt" in names
        assert "performance_drop.json" in names
        assert "performance_drop.txt" in names
        assert "result.json" in names

    def test_header_order_is_canonical(self, tmp_path):
        result = make_result(1)
        emit_report(result, tmp_path)
        header = (tmp_path / "ds0_results.txt").read_text().splitlines()[2]
        positions = [header.index(c) for c in ("Acc@1", "Prec@1", "Rec@1", "NDCG@10", "MRR@10", "MAP@100")]
        assert positions == sorted(positions)

    def test_json_full_precision_round_trip(self, tmp_path):
        result = make_result(1)
        value = 0.123456789012345678
        result.datasets["ds0"]["clean"].averaged["Acc@1"] = value
        emit_report(result, tmp_path)
        payload = json.loads((tmp_path / "ds0_results.json").read_text())
        assert payload["conditions"]["clean"]["Acc@1"] == value

    def test_drop_values_are_clean_minus_perturbed(self, tmp_path):
        result = make_result(2)
        emit_report(result, tmp_path)
        payload = json.loads((tmp_path / "performance_drop.json").read_text())
        drops = payload["drops"]["reference"]["perturbed@0.05"]
        assert drops["Acc@1"] == pytest.approx(0.1)

    def test_result_json_reloadable(self, tmp_path):
        result = make_result(2)
        emit_report(result, tmp_path)
        loaded = load_result(tmp_path / "result.json")
        assert loaded.conditions == result.conditions
        assert loaded.datasets.keys() == result.datasets.keys()
        assert (
            loaded.datasets["ds0"]["clean"].averaged
            == result.datasets["ds0"]["clean"].averaged
        )

    def test_full_metric_reports_written(self, tmp_path):
        result = make_result(1)
        emit_report(result, tmp_path)
        payload = json.loads((tmp_path / "ds0_clean_metrics.json").read_text())
        assert set(payload) >= {"per_query", "averaged", "q_evaluated", "params"}
