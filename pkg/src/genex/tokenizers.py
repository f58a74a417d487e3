"""Token granularity adapters between sentence words and backend tokens.

The default granularity is whole words.  A vocabulary-driven subword
tokenizer is also provided so the decoder's trie constraint can be
exercised at the granularity where cross-candidate recombination (gluing
sub-tokens of different labels into a fake label) becomes possible.
"""

from __future__ import annotations

import os
from typing import Iterable, Protocol, Sequence, Union

from .errors import TokenizationError

WORD_MARKER = "▁"  # marks the first sub-token of each word


class Tokenizer(Protocol):
    def encode_words(self, words: Sequence[str]) -> tuple[str, ...]:
        """Map a word sequence to the token sequence the backend scores."""
        ...

    def decode_tokens(self, tokens: Sequence[str]) -> tuple[str, ...]:
        """Invert ``encode_words``; round-trips every encodable word sequence."""
        ...


class WordTokenizer:
    """Identity granularity: one word, one token."""

    def encode_words(self, words: Sequence[str]) -> tuple[str, ...]:
        return tuple(words)

    def decode_tokens(self, tokens: Sequence[str]) -> tuple[str, ...]:
        return tuple(tokens)


class SubwordTokenizer:
    """Greedy longest-match segmentation against a fixed sub-token vocabulary.

    The first sub-token of each word carries ``word_marker`` as a prefix,
    which keeps decoding unambiguous.  With ``word_marker=""`` the raw
    sub-tokens are emitted; decoding then concatenates everything into a
    single word, so only single-word sequences round-trip.
    """

    def __init__(self, vocabulary: Iterable[str], word_marker: str = WORD_MARKER):
        self.vocabulary = frozenset(vocabulary)
        if not self.vocabulary:
            raise TokenizationError("subword vocabulary is empty")
        if any(not piece for piece in self.vocabulary):
            raise TokenizationError("subword vocabulary contains an empty piece")
        self.word_marker = word_marker
        self._max_piece = max(len(piece) for piece in self.vocabulary)

    def _segment(self, word: str) -> list[str]:
        pieces = []
        pos = 0
        while pos < len(word):
            for width in range(min(self._max_piece, len(word) - pos), 0, -1):
                piece = word[pos : pos + width]
                if piece in self.vocabulary:
                    pieces.append(piece)
                    pos += width
                    break
            else:
                raise TokenizationError(
                    f"cannot segment {word!r}: no vocabulary piece matches at offset {pos}"
                )
        return pieces

    def encode_words(self, words: Sequence[str]) -> tuple[str, ...]:
        out: list[str] = []
        for word in words:
            pieces = self._segment(word)
            pieces[0] = self.word_marker + pieces[0]
            out.extend(pieces)
        return tuple(out)

    def decode_tokens(self, tokens: Sequence[str]) -> tuple[str, ...]:
        if not self.word_marker:
            return ("".join(tokens),) if tokens else ()
        words: list[str] = []
        for token in tokens:
            if token.startswith(self.word_marker):
                words.append(token[len(self.word_marker) :])
            else:
                if not words:
                    raise TokenizationError(f"continuation token {token!r} starts the sequence")
                words[-1] += token
        return tuple(words)


def load_vocabulary(source: Union[str, os.PathLike, bytes]) -> frozenset[str]:
    """Read a sub-token vocabulary: one piece per line, '#' comments allowed."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    pieces = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            pieces.add(line)
    return frozenset(pieces)
