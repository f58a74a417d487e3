"""Three-stage disentangled extraction pipeline.

Event type detection runs first; for every detected type, trigger
extraction and one argument extraction per schema role then run as
mutually independent tasks.  No stage reads another stage's output
beyond the detected type list, so the task execution order never
affects the result, and overlapping mentions are extracted by each
query that wants them.

Decoded items are token sequences, not positions.  An item is mapped
back to its leftmost occurrence in the sentence; the k-th duplicate of
the same surface maps to the (k+1)-th occurrence, and duplicates beyond
the occurrence count are dropped.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .backends import ScoringBackend
from .corpus import AnnotatedSentence, EventRecord, Sentence, Span
from .decoder import DEFAULT_MAX_ITEMS, ConstrainedDecoder, DecodeOutput
from .errors import DecodeDeadEndError, GenexError, StageError
from .prompts import SeparatorToken, argument_prompt, etd_prompt, trigger_prompt
from .schema import EventSchema, EventType, RoleType
from .tokenizers import Tokenizer, WordTokenizer
from .trie import TokenTrie, build_trie, span_candidates

ETD = "ETD"
TRIGGER = "TRIGGER"
ARGUMENT = "ARGUMENT"

DEFAULT_MAX_SPAN_LEN = 8


@dataclass(frozen=True)
class PipelineConfig:
    """Stage backends plus the knobs shared by all three decoders."""

    etd_backend: ScoringBackend
    trigger_backend: ScoringBackend
    argument_backend: ScoringBackend
    sep: SeparatorToken = SeparatorToken()
    max_span_len: int = DEFAULT_MAX_SPAN_LEN
    beam_size: int = 1
    max_items: int = DEFAULT_MAX_ITEMS
    max_steps: int | None = None
    golden_types: bool = False
    tokenizer: Tokenizer = field(default_factory=WordTokenizer)

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.max_span_len < 1:
            raise ValueError("max_span_len must be >= 1")

    def backend_for(self, stage: str) -> ScoringBackend:
        return {
            ETD: self.etd_backend,
            TRIGGER: self.trigger_backend,
            ARGUMENT: self.argument_backend,
        }[stage]


@dataclass
class PipelineTrace:
    """Per-sentence decode accounting.

    ``x`` counts detected event types, ``y_per_type`` counts triggers per
    type, ``z_per_type_role`` counts arguments per (type, role), and
    ``decode_logs`` keeps the raw emitted token streams per stage.
    """

    x: int = 0
    y_per_type: dict[EventType, int] = field(default_factory=dict)
    z_per_type_role: dict[tuple[EventType, RoleType], int] = field(default_factory=dict)
    decode_logs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        z: dict[str, dict[str, int]] = {}
        for (event_type, role), count in self.z_per_type_role.items():
            z.setdefault(event_type.name, {})[role.name] = count
        return {
            "x": self.x,
            "y": {et.name: n for et, n in self.y_per_type.items()},
            "z": z,
        }


class _SerializedBackend(ScoringBackend):
    """Wraps a backend that is not concurrent-query-safe behind a lock."""

    def __init__(self, inner: ScoringBackend):
        self._inner = inner
        self._lock = threading.Lock()
        self.deterministic = inner.deterministic
        self.concurrent_query_safe = True

    def score(self, query):
        with self._lock:
            return self._inner.score(query)


def serialized_config(cfg: PipelineConfig) -> PipelineConfig:
    """Copy of ``cfg`` with every unsafe backend put behind its own lock."""

    def wrap(backend: ScoringBackend) -> ScoringBackend:
        if backend.concurrent_query_safe:
            return backend
        return _SerializedBackend(backend)

    return replace(
        cfg,
        etd_backend=wrap(cfg.etd_backend),
        trigger_backend=wrap(cfg.trigger_backend),
        argument_backend=wrap(cfg.argument_backend),
    )


def _decode(
    cfg: PipelineConfig,
    stage: str,
    prompt: tuple[str, ...],
    trie: TokenTrie,
    *,
    max_items: int | None = None,
) -> DecodeOutput:
    decoder = ConstrainedDecoder(
        trie,
        allow_empty=True,
        max_items=max_items if max_items is not None else cfg.max_items,
        max_steps=cfg.max_steps,
    )
    backend = cfg.backend_for(stage)
    if cfg.beam_size == 1:
        return decoder.decode_greedy(backend, prompt)
    outputs = decoder.decode_beam(backend, prompt, cfg.beam_size)
    if not outputs:
        raise DecodeDeadEndError("beam search finished no hypothesis")
    return outputs[0]


def type_trie(schema: EventSchema, tokenizer: Tokenizer) -> TokenTrie:
    """Trie of tokenized event-type names, for the detection decoder."""
    return build_trie(
        tuple(tokenizer.encode_words([et.name])) for et in schema.all_types()
    )


def span_trie(sentence: Sentence, cfg: PipelineConfig) -> TokenTrie:
    """Trie of every tokenized sentence span up to ``cfg.max_span_len``."""
    candidates = span_candidates(sentence.tokens, cfg.max_span_len)
    return build_trie(
        tuple(cfg.tokenizer.encode_words(list(words))) for words in sorted(candidates)
    )


def occurrences(words: Sequence[str], tokens: Sequence[str]) -> list[Span]:
    """All spans of ``tokens`` whose words equal ``words``, left to right."""
    words = tuple(words)
    width = len(words)
    found = []
    for start in range(len(tokens) - width + 1):
        if tuple(tokens[start : start + width]) == words:
            found.append(Span(start, start + width))
    return found


def map_items_to_spans(
    items: Sequence[tuple[str, ...]],
    sentence: Sentence,
    tokenizer: Tokenizer,
) -> list[Span]:
    """Resolve decoded items to sentence spans; see the module docstring."""
    next_occurrence: dict[tuple[str, ...], int] = {}
    spans = []
    for item in items:
        words = tuple(tokenizer.decode_tokens(list(item)))
        positions = occurrences(words, sentence.tokens)
        assert positions, f"decoded item {item!r} does not occur in the sentence"
        k = next_occurrence.get(words, 0)
        next_occurrence[words] = k + 1
        if k < len(positions):
            spans.append(positions[k])
    return spans


def _detect(
    sentence: Sentence,
    schema: EventSchema,
    cfg: PipelineConfig,
    trie: TokenTrie | None,
) -> tuple[list[EventType], tuple[str, ...]]:
    if trie is None:
        trie = type_trie(schema, cfg.tokenizer)
    by_item = {
        tuple(cfg.tokenizer.encode_words([et.name])): et for et in schema.all_types()
    }
    prompt = etd_prompt(sentence, cfg.sep).rendered
    output = _decode(cfg, ETD, prompt, trie, max_items=max(cfg.max_items, len(schema)))
    detected: list[EventType] = []
    for item in output.items:
        event_type = by_item[item]
        if event_type not in detected:
            detected.append(event_type)
    return detected, output.emitted


def _triggers(
    sentence: Sentence,
    event_type: EventType,
    cfg: PipelineConfig,
    trie: TokenTrie | None,
) -> tuple[list[Span], tuple[str, ...]]:
    if trie is None:
        trie = span_trie(sentence, cfg)
    prompt = trigger_prompt(event_type, sentence, cfg.sep).rendered
    output = _decode(cfg, TRIGGER, prompt, trie)
    return map_items_to_spans(output.items, sentence, cfg.tokenizer), output.emitted


def _arguments(
    sentence: Sentence,
    event_type: EventType,
    role: RoleType,
    cfg: PipelineConfig,
    trie: TokenTrie | None,
    schema: EventSchema | None,
) -> tuple[list[Span], tuple[str, ...]]:
    if trie is None:
        trie = span_trie(sentence, cfg)
    prompt = argument_prompt(event_type, role, sentence, cfg.sep, schema).rendered
    output = _decode(cfg, ARGUMENT, prompt, trie)
    return map_items_to_spans(output.items, sentence, cfg.tokenizer), output.emitted


def detect_event_types(
    sentence: Sentence,
    schema: EventSchema,
    cfg: PipelineConfig,
    trie: TokenTrie | None = None,
) -> list[EventType]:
    """Decode the sentence's event types, deduplicated in decode order."""
    detected, _ = _detect(sentence, schema, cfg, trie)
    return detected


def extract_triggers(
    sentence: Sentence,
    event_type: EventType,
    cfg: PipelineConfig,
    trie: TokenTrie | None = None,
) -> list[Span]:
    """Decode trigger mentions of ``event_type`` and map them to spans."""
    spans, _ = _triggers(sentence, event_type, cfg, trie)
    return spans


def extract_arguments(
    sentence: Sentence,
    event_type: EventType,
    role: RoleType,
    cfg: PipelineConfig,
    trie: TokenTrie | None = None,
    schema: EventSchema | None = None,
) -> list[Span]:
    """Decode ``role`` fillers of ``event_type`` and map them to spans."""
    spans, _ = _arguments(sentence, event_type, role, cfg, trie, schema)
    return spans


def run_pipeline(
    sentence: Sentence,
    schema: EventSchema,
    cfg: PipelineConfig,
    gold_types: Sequence[EventType] | None = None,
    task_order: Callable[[list], list] | None = None,
) -> tuple[list[EventRecord], PipelineTrace]:
    """Detect types, then run all trigger/argument tasks for them.

    With ``cfg.golden_types`` the detection decode is skipped and
    ``gold_types`` is used instead.  ``task_order`` may reorder the
    downstream task list (testing hook); the output is assembled per
    type and role, so any order yields identical records.  A failing
    stage aborts the sentence with an error naming the stage and query.
    """
    trace = PipelineTrace()
    if cfg.golden_types:
        if gold_types is None:
            raise StageError(ETD, "golden-types mode needs gold event types")
        detected = []
        for event_type in gold_types:
            if event_type not in detected:
                detected.append(event_type)
    else:
        try:
            detected, emitted = _detect(sentence, schema, cfg, None)
        except StageError:
            raise
        except GenexError as exc:
            raise StageError(ETD, str(exc)) from exc
        trace.decode_logs[ETD] = emitted
    trace.x = len(detected)

    trie = span_trie(sentence, cfg)
    tasks: list[tuple[EventType, RoleType | None]] = []
    for event_type in detected:
        try:
            roles = schema.roles_of(event_type)
        except GenexError as exc:
            raise StageError(ETD, str(exc), event_type.name) from exc
        tasks.append((event_type, None))
        tasks.extend((event_type, role) for role in roles)
    if task_order is not None:
        tasks = list(task_order(tasks))

    triggers: dict[EventType, list[Span]] = {}
    arguments: dict[tuple[EventType, RoleType], list[Span]] = {}
    trigger_logs: dict[EventType, tuple[str, ...]] = {}
    argument_logs: dict[tuple[EventType, RoleType], tuple[str, ...]] = {}
    for event_type, role in tasks:
        if role is None:
            try:
                spans, emitted = _triggers(sentence, event_type, cfg, trie)
            except GenexError as exc:
                raise StageError(TRIGGER, str(exc), event_type.name) from exc
            triggers[event_type] = spans
            trigger_logs[event_type] = emitted
        else:
            try:
                spans, emitted = _arguments(
                    sentence, event_type, role, cfg, trie, schema
                )
            except GenexError as exc:
                raise StageError(
                    ARGUMENT, str(exc), event_type.name, role.name
                ) from exc
            arguments[(event_type, role)] = spans
            argument_logs[(event_type, role)] = emitted
    trace.decode_logs[TRIGGER] = trigger_logs
    trace.decode_logs[ARGUMENT] = argument_logs

    records = []
    for event_type in detected:
        trace.y_per_type[event_type] = len(triggers[event_type])
        pairs = []
        for role in schema.roles_of(event_type):
            spans = arguments[(event_type, role)]
            trace.z_per_type_role[(event_type, role)] = len(spans)
            pairs.extend((role, span) for span in spans)
        records.append(EventRecord(event_type, tuple(triggers[event_type]), tuple(pairs)))
    return records, trace


@dataclass
class SentenceResult:
    """Outcome of one sentence: records and trace, or an error message."""

    id: str
    records: list[EventRecord] | None
    trace: PipelineTrace | None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def run_corpus(
    corpus: Sequence[AnnotatedSentence],
    schema: EventSchema,
    cfg: PipelineConfig,
    jobs: int = 1,
) -> list[SentenceResult]:
    """Run the pipeline per sentence; failures become error entries.

    Results keep corpus order whatever the worker count.  Backends that
    do not declare themselves concurrent-query-safe are serialized
    behind a lock before any worker starts.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    cfg = serialized_config(cfg)

    def one(annotated: AnnotatedSentence) -> SentenceResult:
        gold = annotated.gold_event_types() if cfg.golden_types else None
        try:
            records, trace = run_pipeline(annotated.sentence, schema, cfg, gold)
        except GenexError as exc:
            return SentenceResult(annotated.id, None, None, str(exc))
        return SentenceResult(annotated.id, records, trace)

    if jobs == 1 or len(corpus) <= 1:
        return [one(annotated) for annotated in corpus]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, corpus))


def result_to_dict(result: SentenceResult, tokens: Sequence[str] | None = None) -> dict:
    """Prediction JSONL object: corpus record shape plus a trace field."""
    obj: dict = {"id": result.id}
    if tokens is not None:
        obj["tokens"] = list(tokens)
    if result.failed:
        obj["error"] = result.error
        return obj
    obj["records"] = [
        {
            "type": record.event_type.name,
            "triggers": [[span.start, span.end] for span in record.triggers],
            "arguments": [
                {"role": role.name, "span": [span.start, span.end]}
                for role, span in record.arguments
            ],
        }
        for record in result.records
    ]
    obj["trace"] = result.trace.to_dict()
    return obj
