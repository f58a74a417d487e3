"""Grammar- and trie-constrained decoding over a pluggable scoring backend.

The grammar is enforced by a three-depth counter machine over the
structural tokens ``(`` and ``)``: depth 0 is before/after the value,
depth 1 is between items, depth 2 is inside an item.  Content tokens are
only legal at depth 2 and only along paths of the candidate trie, so
every finished decode parses and every item is a known candidate, no
matter what the backend scores.

A backend never vetoes: it ranks exactly the legal set it is offered.
Ties break toward the lowest token in a fixed total order
(``(`` < ``)`` < content tokens lexicographically), which makes every
decode reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .backends import ScoreQuery, ScoringBackend
from .errors import (
    DecodeDeadEndError,
    IllegalDecodeTokenError,
    MaxStepsExceededError,
    ScoreLengthMismatchError,
)
from .paren import CLOSE, OPEN, ParenList, parse
from .trie import TokenTrie

DEFAULT_MAX_ITEMS = 8


def token_order_key(token: str) -> tuple:
    """Total order used for deterministic tie-breaking and query layout."""
    if token == OPEN:
        return (0,)
    if token == CLOSE:
        return (1,)
    return (2, token)


@dataclass(frozen=True)
class DecodeState:
    """Position in the output grammar, derived purely from emitted tokens."""

    depth: int = 0
    completed: tuple[tuple[str, ...], ...] = ()
    current: tuple[str, ...] = ()
    closed_empty: bool = False
    finished: bool = False


@dataclass(frozen=True)
class DecodeOutput:
    items: ParenList
    emitted: tuple[str, ...]
    score: float


@dataclass
class _Hypothesis:
    state: DecodeState
    emitted: tuple[str, ...]
    score: float
    order: int  # creation counter; emission order for tie-breaking
    steps: list[float] = field(default_factory=list)


class ConstrainedDecoder:
    """Bundles a candidate trie with the structural-grammar configuration.

    ``allow_empty`` controls whether the empty value ``(())`` is reachable;
    ``max_items`` forces the outer close once that many items are complete,
    which (together with finite trie depth) guarantees termination.
    """

    def __init__(
        self,
        trie: TokenTrie,
        *,
        allow_empty: bool = True,
        max_items: int = DEFAULT_MAX_ITEMS,
        max_steps: int | None = None,
    ):
        if max_items < 1:
            raise ValueError("max_items must be >= 1")
        if not trie and not allow_empty:
            raise DecodeDeadEndError("empty trie with the empty output disallowed")
        self.trie = trie
        self.allow_empty = allow_empty
        self.max_items = max_items
        if max_steps is None:
            # worst case: outer open/close plus per item its parens and tokens
            max_steps = 2 + max_items * (max(trie.max_candidate_len, 1) + 2)
        self.max_steps = max_steps

    def legal_tokens(self, state: DecodeState) -> frozenset[str]:
        if state.finished:
            return frozenset()
        if state.depth == 0:
            return frozenset((OPEN,))
        if state.depth == 1:
            if state.closed_empty:
                return frozenset((CLOSE,))
            legal = set()
            if len(state.completed) < self.max_items:
                legal.add(OPEN)
            if state.completed:
                legal.add(CLOSE)
            return frozenset(legal)
        allowed = self.trie.allowed_next(state.current)
        legal = set(allowed.tokens)
        if state.current:
            if allowed.may_terminate:
                legal.add(CLOSE)
        elif self.allow_empty and not state.completed:
            legal.add(CLOSE)
        return frozenset(legal)

    def ordered_legal_tokens(self, state: DecodeState) -> tuple[str, ...]:
        return tuple(sorted(self.legal_tokens(state), key=token_order_key))

    def step(self, state: DecodeState, token: str) -> DecodeState:
        """Advance the state machine by one legal token."""
        if token not in self.legal_tokens(state):
            raise IllegalDecodeTokenError(
                f"token {token!r} is not legal at depth {state.depth}"
            )
        if token == OPEN:
            return DecodeState(state.depth + 1, state.completed, (), False, False)
        if token == CLOSE:
            if state.depth == 2:
                if state.current:
                    return DecodeState(1, state.completed + (state.current,), (), False, False)
                return DecodeState(1, state.completed, (), True, False)
            return DecodeState(0, state.completed, (), state.closed_empty, True)
        return DecodeState(2, state.completed, state.current + (token,), False, False)

    def _finish(self, hyp: _Hypothesis) -> DecodeOutput:
        return DecodeOutput(ParenList(hyp.state.completed), hyp.emitted, hyp.score)

    def decode_greedy(self, backend: ScoringBackend, prompt: Sequence[str]) -> DecodeOutput:
        prompt = tuple(prompt)
        state = DecodeState()
        emitted: list[str] = []
        total = 0.0
        for _ in range(self.max_steps):
            if state.finished:
                break
            allowed = self.ordered_legal_tokens(state)
            if not allowed:
                raise DecodeDeadEndError(f"no legal token at depth {state.depth}")
            scores = _checked_scores(backend, ScoreQuery(prompt, tuple(emitted), allowed))
            best = max(range(len(allowed)), key=lambda i: (scores[i], -i))
            total += scores[best]
            emitted.append(allowed[best])
            state = self.step(state, allowed[best])
        if not state.finished:
            raise MaxStepsExceededError(f"decode exceeded {self.max_steps} steps")
        return DecodeOutput(ParenList(state.completed), tuple(emitted), total)

    def decode_beam(
        self,
        backend: ScoringBackend,
        prompt: Sequence[str],
        beam_size: int,
    ) -> list[DecodeOutput]:
        """Beam search over the same constrained space.

        Completed hypotheses compete for beam slots against open ones, so
        ``beam_size=1`` reproduces the greedy trajectory exactly.  With a
        beam at least as wide as the number of reachable complete outputs
        nothing is ever pruned and the result is the full enumeration,
        ranked by total score (ties by completion order).
        """
        if beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        prompt = tuple(prompt)
        counter = 0
        active = [_Hypothesis(DecodeState(), (), 0.0, counter)]
        completed: list[_Hypothesis] = []
        for _ in range(self.max_steps):
            if not active:
                break
            expansions: list[_Hypothesis] = []
            for hyp in active:
                allowed = self.ordered_legal_tokens(hyp.state)
                if not allowed:
                    raise DecodeDeadEndError(f"no legal token at depth {hyp.state.depth}")
                scores = _checked_scores(backend, ScoreQuery(prompt, hyp.emitted, allowed))
                for token, token_score in zip(allowed, scores):
                    counter += 1
                    expansions.append(
                        _Hypothesis(
                            self.step(hyp.state, token),
                            hyp.emitted + (token,),
                            hyp.score + token_score,
                            counter,
                        )
                    )
            expansions.sort(key=lambda h: (-h.score, h.order))
            survivors = expansions[:beam_size]
            active = []
            for hyp in survivors:
                if hyp.state.finished:
                    completed.append(hyp)
                else:
                    active.append(hyp)
        completed.sort(key=lambda h: (-h.score, h.order))
        return [self._finish(hyp) for hyp in completed[:beam_size]]


def _checked_scores(backend: ScoringBackend, query: ScoreQuery) -> list[float]:
    scores = backend.score(query)
    if len(scores) != len(query.allowed):
        raise ScoreLengthMismatchError(
            f"backend returned {len(scores)} scores for {len(query.allowed)} tokens"
        )
    return scores


def decode_greedy(
    backend: ScoringBackend,
    prompt: Sequence[str],
    trie: TokenTrie,
    *,
    allow_empty: bool = True,
    max_items: int = DEFAULT_MAX_ITEMS,
    max_steps: int | None = None,
) -> DecodeOutput:
    decoder = ConstrainedDecoder(
        trie, allow_empty=allow_empty, max_items=max_items, max_steps=max_steps
    )
    return decoder.decode_greedy(backend, prompt)


def decode_beam(
    backend: ScoringBackend,
    prompt: Sequence[str],
    trie: TokenTrie,
    beam_size: int,
    *,
    allow_empty: bool = True,
    max_items: int = DEFAULT_MAX_ITEMS,
    max_steps: int | None = None,
) -> list[DecodeOutput]:
    decoder = ConstrainedDecoder(
        trie, allow_empty=allow_empty, max_items=max_items, max_steps=max_steps
    )
    return decoder.decode_beam(backend, prompt, beam_size)


def render(emitted: Sequence[str]) -> str:
    """Space-join an emitted token stream; the result is parseable."""
    return " ".join(emitted)


def check_output(output: DecodeOutput, trie: TokenTrie) -> None:
    """Assert the closure contract: output parses and items are trie members."""
    reparsed = parse(render(output.emitted))
    if reparsed != output.items:
        raise AssertionError("emitted stream does not parse back to the item list")
    for item in output.items:
        if not trie.contains(item):
            raise AssertionError(f"item {item!r} is not a trie candidate")
