"""The whole pipeline: clean vs perturbed retrieval and the drop table.

Builds a synthetic self-retrieval dataset (each query is a copy of its
one relevant document, documents share a small word pool), runs a clean
pass plus a perturbation-rate sweep, and prints the emitted tables.
Clean retrieval is perfect by construction; the sweep shows how fast it
degrades as token noise grows.

The same experiment is available from the shell:

    denseval sweep --config config.json
"""

import json
import tempfile
from pathlib import Path

from denseval.embed import ProviderConfig
from denseval.report import emit_report
from denseval.runner import DatasetSpec, ExperimentConfig, run_experiment
from denseval.synth import make_self_retrieval_dataset, write_dataset

workdir = Path(tempfile.mkdtemp(prefix="denseval-demo-"))
dataset = make_self_retrieval_dataset(num_docs=800, num_queries=150, seed=21)
paths = write_dataset(dataset, workdir / "data")
print(f"dataset: {len(dataset.corpus)} docs, {len(dataset.queries)} copy-queries "
      f"over a {dataset.vocab.size - 4}-word pool\n")

config = ExperimentConfig(
    datasets=(
        DatasetSpec(
            name="selfret",
            corpus=str(paths["corpus"]),
            queries=str(paths["queries"]),
            qrels=str(paths["qrels"]),
            vocab=str(paths["vocab"]),
        ),
    ),
    provider=ProviderConfig.reference(dim=64, seed=0),
    perturb_rates=(0.05, 0.10, 0.20),
    master_seed=2024,
    max_len=12,
    output_dir=str(workdir / "out"),
)

result = run_experiment(config)  # clean + every configured rate
emit_report(result, config.output_dir)

print((Path(config.output_dir) / "selfret_results.txt").read_text())
print((Path(config.output_dir) / "performance_drop.txt").read_text())

drops = json.loads((Path(config.output_dir) / "performance_drop.json").read_text())
ndcg_drops = {
    rate: values["NDCG@10"] for rate, values in drops["drops"]["reference"].items()
}
print("NDCG@10 drop grows with the perturbation rate:")
for rate, value in ndcg_drops.items():
    print(f"  {rate:<16} {value:+.4f}")

print("\nevery number above is reproducible from (config, master_seed);")
print(f"full-precision JSON and per-query reports live in {config.output_dir}")
