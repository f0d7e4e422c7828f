"""Vocabulary-driven subword tokenizer.

Greedy longest-match-first segmentation with ``##`` continuation pieces,
lowercasing and ASCII punctuation splitting, framed as
``[CLS] tokens [SEP]`` and right-padded with ``[PAD]``. Decoding fuses
``##`` pieces back onto the previous token and renders special tokens
literally, so corrupted sequences stay visualizable.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
SPECIAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN, SEP_TOKEN)

# A single word may segment into at most this many subword pieces before
# it collapses to [UNK].
MAX_SUBWORDS_PER_WORD = 100

_PUNCT = frozenset(string.punctuation)


class VocabularyError(ValueError):
    """Malformed vocabulary file."""


@dataclass(frozen=True)
class TokenSequence:
    """Ordered token ids.

    Sequences produced by :func:`encode` are well-framed (leading [CLS],
    exactly one [SEP], only [PAD] after it); sequences that went through
    perturbation may violate any of that, so the container itself does
    not enforce framing.
    """

    ids: tuple[int, ...]

    def __init__(self, ids: Iterable[int]) -> None:
        object.__setattr__(self, "ids", tuple(int(i) for i in ids))

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


@dataclass(frozen=True)
class Vocabulary:
    token_to_id: dict[str, int]
    id_to_token: tuple[str, ...]
    cls_id: int
    sep_id: int
    pad_id: int
    unk_id: int

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset((self.cls_id, self.sep_id, self.pad_id, self.unk_id))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Vocabulary":
        token_to_id: dict[str, int] = {}
        for i, token in enumerate(tokens):
            if not token:
                raise VocabularyError(f"empty token at id {i}")
            if token in token_to_id:
                raise VocabularyError(f"duplicate token {token!r} at id {i}")
            token_to_id[token] = i
        for special in SPECIAL_TOKENS:
            if special not in token_to_id:
                raise VocabularyError(f"missing special token {special}")
        return cls(
            token_to_id=token_to_id,
            id_to_token=tuple(tokens),
            cls_id=token_to_id[CLS_TOKEN],
            sep_id=token_to_id[SEP_TOKEN],
            pad_id=token_to_id[PAD_TOKEN],
            unk_id=token_to_id[UNK_TOKEN],
        )


def load_vocab(path: str | Path) -> Vocabulary:
    """Read a vocabulary file: one token per line, id = 0-based line index."""
    path = Path(path)
    if not path.exists():
        raise VocabularyError(f"file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        tokens = [line.rstrip("\r\n") for line in fh]
    return Vocabulary.from_tokens(tokens)


def save_vocab(vocab: Vocabulary, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in vocab.id_to_token:
            fh.write(token + "\n")


def _basic_tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace; ASCII punctuation becomes its
    own single-character word."""
    words: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if ch.isspace():
            if current:
                words.append("".join(current))
                current = []
        elif ch in _PUNCT:
            if current:
                words.append("".join(current))
                current = []
            words.append(ch)
        else:
            current.append(ch)
    if current:
        words.append("".join(current))
    return words


def _wordpiece(word: str, vocab: Vocabulary) -> list[int]:
    """Greedy longest-match-first segmentation of one word.

    Continuation pieces carry the ``##`` prefix. If no cover exists (or
    the piece count exceeds MAX_SUBWORDS_PER_WORD) the whole word maps
    to [UNK].
    """
    pieces: list[int] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = "##" + candidate
            token_id = vocab.token_to_id.get(candidate)
            if token_id is not None:
                match = token_id
                break
            end -= 1
        if match is None or len(pieces) >= MAX_SUBWORDS_PER_WORD:
            return [vocab.unk_id]
        pieces.append(match)
        start = end
    return pieces


def encode(text: str, vocab: Vocabulary, max_len: int) -> TokenSequence:
    """Encode text as ``[CLS] subwords [SEP]`` padded/truncated to max_len.

    Truncation keeps [CLS] and forces a trailing [SEP] so the output
    always satisfies the frame invariants.
    """
    if max_len < 2:
        raise ValueError(f"max_len must be >= 2, got {max_len}")
    ids: list[int] = [vocab.cls_id]
    for word in _basic_tokenize(text):
        ids.extend(_wordpiece(word, vocab))
    if len(ids) > max_len - 1:
        ids = ids[: max_len - 1]
    ids.append(vocab.sep_id)
    ids.extend([vocab.pad_id] * (max_len - len(ids)))
    return TokenSequence(ids)


def decode(seq: TokenSequence, vocab: Vocabulary) -> str:
    """Render ids as text, fusing ``##`` pieces onto the previous token.

    Special tokens render literally, so a perturbed sequence shows its
    corruption (vanished [CLS], mid-word substitutions) verbatim.
    """
    tokens = []
    for token_id in seq:
        if token_id < 0 or token_id >= vocab.size:
            raise ValueError(f"token id {token_id} outside vocabulary of size {vocab.size}")
        tokens.append(vocab.id_to_token[token_id])
    return " ".join(tokens).replace(" ##", "")


def frame_violations(seq: TokenSequence, vocab: Vocabulary) -> list[str]:
    """Describe how a sequence breaks the [CLS] ... [SEP] [PAD]* frame."""
    problems: list[str] = []
    if len(seq) < 2:
        problems.append("sequence shorter than 2")
        return problems
    if seq.ids[0] != vocab.cls_id:
        problems.append("does not start with [CLS]")
    sep_positions = [i for i, t in enumerate(seq.ids) if t == vocab.sep_id]
    if len(sep_positions) != 1:
        problems.append(f"expected exactly one [SEP], found {len(sep_positions)}")
    else:
        tail = seq.ids[sep_positions[0] + 1 :]
        if any(t != vocab.pad_id for t in tail):
            problems.append("non-[PAD] token after [SEP]")
    if any(t < 0 or t >= vocab.size for t in seq.ids):
        problems.append("token id outside vocabulary")
    return problems
