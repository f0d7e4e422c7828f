"""Probabilistic additive noise on token ids.

For each token position, with probability epsilon, add a uniform integer
d in {0..9} to the token id (mod vocabulary size). A d of 0 is a legal
no-op draw, so the expected fraction of ids that actually change is
0.9 * epsilon.

Streams are seeded per query from (master_seed XOR fnv1a64(query_id)),
so results are independent of query order and safe to parallelize.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Sequence

from .rng import SplitMix64, fnv1a64, splitmix64
from .tokenizer import TokenSequence, Vocabulary, decode

NOISE_BOUND = 10  # d is drawn uniformly from {0, ..., NOISE_BOUND - 1}


@dataclass(frozen=True)
class PerturbationParams:
    epsilon: float
    master_seed: int = 0
    include_special: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class PerturbationRecord:
    query_id: str
    positions_changed: tuple[int, ...]
    before: TokenSequence
    after: TokenSequence


def perturb_sequence(
    seq: TokenSequence,
    vocab_size: int,
    params: PerturbationParams,
    stream: SplitMix64,
    special_ids: AbstractSet[int] = frozenset(),
) -> TokenSequence:
    """Apply the noise pass to one sequence, consuming draws from ``stream``.

    Positions are visited in order; each eligible position consumes one
    uniform draw, plus one integer draw when it falls below epsilon. When
    ``include_special`` is false, positions currently holding a special
    id are skipped entirely and consume no draws.
    """
    if vocab_size <= 0:
        raise ValueError("vocab_size must be positive")
    out = []
    for token_id in seq:
        if not params.include_special and token_id in special_ids:
            out.append(token_id)
            continue
        if stream.next_unit() < params.epsilon:
            d = stream.next_below(NOISE_BOUND)
            out.append((token_id + d) % vocab_size)
        else:
            out.append(token_id)
    return TokenSequence(out)


def query_stream(query_id: str, master_seed: int) -> SplitMix64:
    """Per-query stream: seeded as splitmix64(master_seed XOR fingerprint)."""
    return SplitMix64(splitmix64(master_seed ^ fnv1a64(query_id.encode("utf-8"))))


def perturb_query_set(
    queries: Sequence[tuple[str, TokenSequence]],
    vocab_size: int,
    params: PerturbationParams,
    special_ids: AbstractSet[int] = frozenset(),
) -> list[PerturbationRecord]:
    """Perturb each (query_id, sequence) pair under its own seeded stream.

    Because streams depend only on (master_seed, query_id), reordering
    the input permutes the records but never changes any individual
    query's output.
    """
    records = []
    for query_id, seq in queries:
        stream = query_stream(query_id, params.master_seed)
        after = perturb_sequence(seq, vocab_size, params, stream, special_ids)
        changed = tuple(
            i for i, (a, b) in enumerate(zip(seq.ids, after.ids)) if a != b
        )
        records.append(
            PerturbationRecord(
                query_id=query_id, positions_changed=changed, before=seq, after=after
            )
        )
    return records


def expected_change_rate(epsilon: float) -> float:
    """Expected fraction of positions whose id actually changes.

    One draw in NOISE_BOUND picks d = 0 and leaves the id alone, hence
    the 9/10 factor.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return epsilon * (NOISE_BOUND - 1) / NOISE_BOUND


def render_perturbation_table(
    records: Sequence[PerturbationRecord], vocab: Vocabulary
) -> list[tuple[str, str]]:
    """De-tokenize each record into a (before-text, after-text) row."""
    return [(decode(r.before, vocab), decode(r.after, vocab)) for r in records]


def format_perturbation_table(rows: Sequence[tuple[str, str]]) -> str:
    """Two-column plain-text table: 'Previous Input' / 'After Perturbation'."""
    headers = ("Previous Input", "After Perturbation")
    left = max([len(headers[0])] + [len(before) for before, _ in rows])
    lines = [f"{headers[0]:<{left}} | {headers[1]}"]
    lines.append("-" * left + "-+-" + "-" * len(headers[1]))
    for before, after in rows:
        lines.append(f"{before:<{left}} | {after}")
    return "\n".join(lines)
