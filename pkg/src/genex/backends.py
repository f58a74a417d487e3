"""Token-scoring backends for the constrained decoder.

A backend answers one question: given a prompt, the tokens emitted so
far, and the legal next tokens, how good is each legal token?  Scores
are raw preferences (higher is better); they are never normalised and
never filtered, because legality is the decoder's job.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .errors import BackendError
from .paren import CLOSE, OPEN


@dataclass(frozen=True)
class ScoreQuery:
    """One scoring request: score each token in ``allowed`` in order."""

    prompt: tuple[str, ...]
    emitted: tuple[str, ...]
    allowed: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "prompt", tuple(self.prompt))
        object.__setattr__(self, "emitted", tuple(self.emitted))
        object.__setattr__(self, "allowed", tuple(self.allowed))
        if not self.allowed:
            raise ValueError("a score query must offer at least one token")


class ScoringBackend(ABC):
    """Scores candidate next tokens; stateless across queries.

    ``deterministic`` declares that equal queries always get equal
    scores.  ``concurrent_query_safe`` declares that ``score`` may be
    called from several threads at once.
    """

    deterministic: bool = True
    concurrent_query_safe: bool = True

    @abstractmethod
    def score(self, query: ScoreQuery) -> list[float]:
        """Return one score per token of ``query.allowed``, same order."""


class UniformBackend(ScoringBackend):
    """Scores every token 0.0, so decoding follows the tie-break order."""

    def score(self, query: ScoreQuery) -> list[float]:
        return [0.0] * len(query.allowed)


class FuzzBackend(ScoringBackend):
    """Deterministic pseudo-random scores for adversarial decoder testing.

    Each query seeds a fresh PRNG from the backend seed and the full
    query content, so scores are reproducible, order-independent across
    queries, and thread-safe without shared state.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def score(self, query: ScoreQuery) -> list[float]:
        key = (self.seed, query.prompt, query.emitted, query.allowed)
        rng = random.Random(repr(key))
        return [rng.random() for _ in query.allowed]


def gold_emission_stream(items: tuple[tuple[str, ...], ...]) -> tuple[str, ...]:
    """Token stream a decoder must emit to produce exactly ``items``."""
    if not items:
        return (OPEN, OPEN, CLOSE, CLOSE)
    stream: list[str] = [OPEN]
    for item in items:
        stream.append(OPEN)
        stream.extend(item)
        stream.append(CLOSE)
    stream.append(CLOSE)
    return tuple(stream)


class GoldTargetBackend(ScoringBackend):
    """Oracle for a single known target: the gold continuation scores 1.0.

    Off the gold path (which greedy decoding never reaches, but beam
    search does) every score is non-positive, with closing least bad.
    That keeps the gold path the unique maximum of the summed score, so
    beam search of any width still ranks it first; stray hypotheses earn
    nothing and finish as fast as the grammar lets them.
    """

    def __init__(self, items):
        items = getattr(items, "items", items)
        self.stream = gold_emission_stream(tuple(tuple(item) for item in items))

    def score(self, query: ScoreQuery) -> list[float]:
        n = len(query.emitted)
        on_path = self.stream[:n] == query.emitted and n < len(self.stream)
        if on_path:
            target = self.stream[n]
            return [1.0 if token == target else 0.0 for token in query.allowed]
        return [0.0 if token == CLOSE else -1.0 for token in query.allowed]


def oracle_from_gold(target) -> GoldTargetBackend:
    """Oracle for one target: an item list or anything with ``.items``."""
    return GoldTargetBackend(target)


def fuzz_backend(seed: int) -> FuzzBackend:
    return FuzzBackend(seed)


class GoldCorpusBackend(ScoringBackend):
    """Oracle over a whole annotated corpus.

    Recovers the stage from the prompt shape (segments between separator
    tokens: sentence only, type + sentence, or type + role + sentence),
    looks the sentence up by its exact token sequence, and scores toward
    the gold answer for that stage.  Prompts about types or roles with no
    gold mentions steer to the empty output.
    """

    def __init__(self, sentences, schema, tokenizer=None, sep=None):
        from .prompts import SeparatorToken
        from .tokenizers import WordTokenizer

        self.schema = schema
        self.tokenizer = tokenizer if tokenizer is not None else WordTokenizer()
        self.sep = sep if sep is not None else SeparatorToken()
        self._by_tokens: dict[tuple[str, ...], object] = {}
        for annotated in sentences:
            key = tuple(annotated.sentence.tokens)
            # first occurrence wins, matching corpus-order lookups elsewhere
            self._by_tokens.setdefault(key, annotated)

    def _split(self, prompt: tuple[str, ...]) -> list[tuple[str, ...]]:
        segments: list[tuple[str, ...]] = []
        current: list[str] = []
        for token in prompt:
            if token == self.sep.text:
                segments.append(tuple(current))
                current = []
            else:
                current.append(token)
        segments.append(tuple(current))
        return segments

    def _lookup(self, sentence_tokens: tuple[str, ...]):
        annotated = self._by_tokens.get(sentence_tokens)
        if annotated is None:
            raise BackendError(
                f"no corpus sentence matches prompt tokens {sentence_tokens!r}"
            )
        return annotated

    def _mention_items(self, spans, sentence) -> list[tuple[str, ...]]:
        items = []
        for span in spans:
            words = list(sentence.tokens[span.start : span.end])
            items.append(tuple(self.tokenizer.encode_words(words)))
        return items

    def gold_items(self, prompt: tuple[str, ...]) -> list[tuple[str, ...]]:
        """Gold output items for a prompt, resolved against the corpus."""
        segments = self._split(tuple(prompt))
        if len(segments) == 1:
            annotated = self._lookup(segments[0])
            return [
                tuple(self.tokenizer.encode_words([et.name]))
                for et in annotated.gold_event_types()
            ]
        if len(segments) == 2:
            (type_seg, sentence_seg) = segments
            annotated = self._lookup(sentence_seg)
            type_name = _single_name(type_seg, "event type")
            for record in annotated.records:
                if record.event_type.name == type_name:
                    return self._mention_items(record.triggers, annotated.sentence)
            return []
        if len(segments) == 3:
            (type_seg, role_seg, sentence_seg) = segments
            annotated = self._lookup(sentence_seg)
            type_name = _single_name(type_seg, "event type")
            role_name = _single_name(role_seg, "role")
            for record in annotated.records:
                if record.event_type.name == type_name:
                    spans = [
                        span for (r, span) in record.arguments if r.name == role_name
                    ]
                    return self._mention_items(spans, annotated.sentence)
            return []
        raise BackendError(
            f"prompt has {len(segments)} segments; expected 1, 2, or 3"
        )

    def score(self, query: ScoreQuery) -> list[float]:
        backend = GoldTargetBackend(self.gold_items(query.prompt))
        return backend.score(query)


def _single_name(segment: tuple[str, ...], what: str) -> str:
    if len(segment) != 1:
        raise BackendError(f"expected a single-token {what}, got {segment!r}")
    return segment[0]


class PromptRoutedBackend(ScoringBackend):
    """Dispatches each query to a per-prompt backend via a resolver.

    The resolver maps a prompt (token tuple) to a ``ScoringBackend``;
    resolution failures surface as ``BackendError``.  Used to build
    corpus-wide oracles out of single-target ones.
    """

    def __init__(self, resolve):
        self._resolve = resolve

    def score(self, query: ScoreQuery) -> list[float]:
        backend = self._resolve(query.prompt)
        if backend is None:
            raise BackendError(f"no backend for prompt {query.prompt!r}")
        return backend.score(query)
