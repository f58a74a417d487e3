"""Prefix trie over candidate token sequences.

The trie answers one question for the decoder: given the tokens emitted
so far inside the current item, which tokens may come next, and may the
item stop here?  Because the answer is computed on the tree rather than
on the flat candidate set, recombinations of sub-tokens from different
candidates are impossible by construction.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import TrieError
from .paren import CLOSE, OPEN


class AllowedNext(NamedTuple):
    tokens: frozenset[str]
    may_terminate: bool


_NO_CONTINUATION = AllowedNext(frozenset(), False)


class _Node:
    __slots__ = ("children", "terminal")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.terminal = False


class TokenTrie:
    """Immutable-after-build prefix tree over token sequences."""

    def __init__(self, candidates: Iterable[Sequence[str]] = ()):
        self._root = _Node()
        self._size = 0
        self._max_len = 0
        for candidate in candidates:
            self._insert(candidate)

    def _insert(self, candidate: Sequence[str]) -> None:
        tokens = tuple(candidate)
        if not tokens:
            raise TrieError("candidate sequences must be non-empty")
        for token in tokens:
            if OPEN in token or CLOSE in token:
                raise TrieError(f"candidate token may not contain parentheses: {token!r}")
        node = self._root
        for token in tokens:
            node = node.children.setdefault(token, _Node())
        if not node.terminal:
            node.terminal = True
            self._size += 1
            self._max_len = max(self._max_len, len(tokens))

    def _walk(self, prefix: Sequence[str]) -> _Node | None:
        node = self._root
        for token in prefix:
            node = node.children.get(token)
            if node is None:
                return None
        return node

    def allowed_next(self, prefix: Sequence[str]) -> AllowedNext:
        """Tokens that extend ``prefix`` toward a candidate, and whether
        ``prefix`` is itself a complete candidate.  An absent prefix yields
        no continuations."""
        node = self._walk(prefix)
        if node is None:
            return _NO_CONTINUATION
        return AllowedNext(frozenset(node.children), node.terminal)

    def contains(self, sequence: Sequence[str]) -> bool:
        node = self._walk(sequence)
        return node is not None and node.terminal

    def __contains__(self, sequence: Sequence[str]) -> bool:
        return self.contains(sequence)

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    @property
    def max_candidate_len(self) -> int:
        return self._max_len

    def candidates(self) -> Iterator[tuple[str, ...]]:
        """Yield every inserted candidate in depth-first token order."""
        stack: list[tuple[tuple[str, ...], _Node]] = [((), self._root)]
        while stack:
            prefix, node = stack.pop()
            if node.terminal:
                yield prefix
            for token in sorted(node.children, reverse=True):
                stack.append((prefix + (token,), node.children[token]))


def build_trie(candidates: Iterable[Sequence[str]]) -> TokenTrie:
    return TokenTrie(candidates)


def span_candidates(tokens: Sequence[str], max_len: int) -> set[tuple[str, ...]]:
    """All distinct contiguous token subsequences of length 1..max_len."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    out: set[tuple[str, ...]] = set()
    n = len(tokens)
    for start in range(n):
        stop = min(n, start + max_len)
        for end in range(start + 1, stop + 1):
            out.add(tuple(tokens[start:end]))
    return out
