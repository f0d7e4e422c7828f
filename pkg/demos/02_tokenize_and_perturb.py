"""Subword tokenization and token-id noise.

Encoding frames text as [CLS] ... [SEP] with [PAD] fill; the noise pass
then walks the token ids and, with probability epsilon per position,
adds a random integer d in {0..9} (mod vocabulary size). De-tokenizing
the result shows the characteristic mid-word corruption.
"""

from denseval.perturb import (
    PerturbationParams,
    expected_change_rate,
    format_perturbation_table,
    perturb_query_set,
    render_perturbation_table,
)
from denseval.tokenizer import Vocabulary, decode, encode

tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
tokens += ["what", "is", "used", "for", "a", "and", "the", "between", "difference"]
tokens += ["thera", "##derm", "mc", "##double", "double", "cheese", "##burger", "skin", "cream"]
vocab = Vocabulary.from_tokens(tokens)
print(f"vocabulary of {vocab.size} tokens; [CLS]={vocab.cls_id} [SEP]={vocab.sep_id}\n")

text = "what is theraderm used for"
seq = encode(text, vocab, max_len=12)
print(f"encode({text!r}) -> {list(seq)}")
print(f"decode -> {decode(seq, vocab)!r}\n")

# Greedy longest-match-first segmentation: 'theraderm' is covered by
# 'thera' + '##derm'; a word with no cover becomes [UNK].
print(f"encode('xyzzy') -> {list(encode('xyzzy', vocab, 6))}  (word collapses to [UNK])\n")

queries = [
    ("q1", encode("what is theraderm used for", vocab, 12)),
    ("q2", encode("difference between a mcdouble and a double cheeseburger", vocab, 16)),
]

# Per-query streams are seeded from (master_seed, query_id), so the same
# configuration always reproduces the same corruption.
params = PerturbationParams(epsilon=0.10, master_seed=11)
records = perturb_query_set(queries, vocab.size, params)
print("epsilon = 0.10 (the default rate):")
print(format_perturbation_table(render_perturbation_table(records, vocab)))

changed = sum(len(r.positions_changed) for r in records)
total = sum(len(r.before) for r in records)
print(f"\npositions changed: {changed}/{total}")
print(f"expected change rate at eps=0.10: {expected_change_rate(0.10):.3f}")
print("(d=0 is a legal no-op draw, hence 9/10 of epsilon)\n")

params = PerturbationParams(epsilon=0.5, master_seed=11)
records = perturb_query_set(queries, vocab.size, params)
print("epsilon = 0.5 for contrast (note specials themselves can be hit):")
print(format_perturbation_table(render_perturbation_table(records, vocab)))
