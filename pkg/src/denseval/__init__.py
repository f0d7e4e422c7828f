"""denseval: dense-retrieval robustness benchmarking.

Tokenize queries, inject probabilistic token-id noise, embed, retrieve
by exact cosine similarity, score with standard IR metrics, and report
clean-vs-perturbed performance drops.
"""

from .data import (
    DatasetError,
    Document,
    Judgment,
    Query,
    ValidationReport,
    load_corpus,
    load_qrels,
    load_queries,
    qrels_by_query,
    validate_dataset,
)
from .embed import (
    EmbeddingStore,
    ProviderConfig,
    ProviderError,
    StoreError,
    embed_sequence,
    fetch_embeddings,
    read_store,
    reference_token_vector,
    write_store,
)
from .metrics import MetricParams, MetricReport, evaluate_run
from .perturb import (
    PerturbationParams,
    PerturbationRecord,
    expected_change_rate,
    perturb_query_set,
    perturb_sequence,
    render_perturbation_table,
)
from .report import DropTable, aggregate_across_datasets, compute_drop, emit_report
from .retrieval import (
    FlatIndex,
    RankedList,
    batch_search,
    build_index,
    cosine_similarity,
    search,
    write_run,
)
from .runner import (
    DatasetSpec,
    ExperimentConfig,
    ExperimentResult,
    ValidationFailure,
    run_experiment,
)
from .tokenizer import TokenSequence, Vocabulary, decode, encode, load_vocab

__version__ = "0.1.0"
