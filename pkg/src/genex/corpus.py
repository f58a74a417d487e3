"""Annotated corpus: tokenized sentences with gold event records.

One JSON object per line::

    {"id": "s1",
     "tokens": ["In", "Copenhagen", ...],
     "records": [{"type": "CONVICT",
                  "triggers": [[4, 5]],
                  "arguments": [{"role": "defendant", "span": [2, 3]}]}]}

Spans are half-open token-index intervals ``[start, end)``.  Records of
the same event type within one sentence are merged on load, because the
pipeline queries gold per (type) and per (type, role), never per trigger.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import CorpusParseError, CorpusValidationError
from .schema import EventSchema, EventType, RoleType

_STRUCTURAL = ("(", ")")


@dataclass(frozen=True, order=True)
class Span:
    """Half-open token interval [start, end) within its sentence."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise CorpusValidationError(f"invalid span [{self.start}, {self.end})")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise CorpusValidationError(f"sentence {self.id!r} has no tokens")
        for token in self.tokens:
            if not token:
                raise CorpusValidationError(f"sentence {self.id!r} has an empty token")
            if any(ch in token for ch in _STRUCTURAL):
                raise CorpusValidationError(
                    f"sentence {self.id!r}: token {token!r} contains a structural character"
                )
            if any(ch.isspace() for ch in token):
                raise CorpusValidationError(
                    f"sentence {self.id!r}: token {token!r} contains whitespace"
                )


@dataclass(frozen=True)
class EventRecord:
    event_type: EventType
    triggers: tuple[Span, ...]
    arguments: tuple[tuple[RoleType, Span], ...]


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: Sentence
    records: tuple[EventRecord, ...]

    @property
    def id(self) -> str:
        return self.sentence.id

    def gold_event_types(self) -> tuple[EventType, ...]:
        """Gold event types in first-occurrence order; one per record."""
        return tuple(record.event_type for record in self.records)


def _check_span(span: Span, sentence: Sentence) -> None:
    if span.end > len(sentence.tokens):
        raise CorpusValidationError(
            f"sentence {sentence.id!r}: span [{span.start}, {span.end}) exceeds "
            f"{len(sentence.tokens)} tokens"
        )


def _dedup(pairs: Iterable) -> tuple:
    seen = set()
    out = []
    for pair in pairs:
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return tuple(out)


def _merge_records(
    raw_records: list[dict],
    sentence: Sentence,
    schema: EventSchema | None,
) -> tuple[EventRecord, ...]:
    triggers: dict[EventType, list[Span]] = {}
    arguments: dict[EventType, list[tuple[RoleType, Span]]] = {}
    order: list[EventType] = []
    for raw in raw_records:
        try:
            event_type = EventType(str(raw["type"]))
            raw_triggers = raw.get("triggers", [])
            raw_arguments = raw.get("arguments", [])
        except KeyError as exc:
            raise CorpusParseError(f"sentence {sentence.id!r}: record misses key {exc}") from None
        if schema is not None and event_type not in schema:
            raise CorpusValidationError(
                f"sentence {sentence.id!r}: event type {event_type.name!r} not in schema"
            )
        if event_type not in triggers:
            triggers[event_type] = []
            arguments[event_type] = []
            order.append(event_type)
        for pair in raw_triggers:
            span = Span(int(pair[0]), int(pair[1]))
            _check_span(span, sentence)
            triggers[event_type].append(span)
        for arg in raw_arguments:
            role = RoleType(str(arg["role"]))
            span = Span(int(arg["span"][0]), int(arg["span"][1]))
            _check_span(span, sentence)
            if schema is not None and role not in schema.roles_of(event_type):
                raise CorpusValidationError(
                    f"sentence {sentence.id!r}: role {role.name!r} is not a "
                    f"{event_type.name} role"
                )
            arguments[event_type].append((role, span))
    return tuple(
        EventRecord(et, _dedup(triggers[et]), _dedup(arguments[et])) for et in order
    )


def parse_corpus_line(
    line: str,
    schema: EventSchema | None = None,
    sep: str | None = None,
) -> AnnotatedSentence:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "id" not in obj or "tokens" not in obj:
        raise CorpusParseError("corpus line must be an object with 'id' and 'tokens'")
    sentence = Sentence(str(obj["id"]), tuple(str(t) for t in obj["tokens"]))
    if sep is not None and sep in sentence.tokens:
        raise CorpusValidationError(
            f"sentence {sentence.id!r} contains the separator token {sep!r}"
        )
    records = _merge_records(list(obj.get("records", [])), sentence, schema)
    return AnnotatedSentence(sentence, records)


def load_corpus(
    source: Union[str, os.PathLike, IO[bytes], IO[str], bytes],
    schema: EventSchema | None = None,
    sep: str | None = None,
) -> list[AnnotatedSentence]:
    """Load and validate a JSONL corpus, preserving line order.

    When ``schema`` is given, event types and roles are cross-checked;
    when ``sep`` is given, sentences containing it are rejected.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(parse_corpus_line(line, schema, sep))
        except (CorpusParseError, CorpusValidationError) as exc:
            raise type(exc)(f"line {line_no}: {exc}") from None
    return out


def sentence_to_dict(annotated: AnnotatedSentence) -> dict:
    """The JSON object form written by the corpus writer; inverse of loading."""
    return {
        "id": annotated.sentence.id,
        "tokens": list(annotated.sentence.tokens),
        "records": [
            {
                "type": record.event_type.name,
                "triggers": [[span.start, span.end] for span in record.triggers],
                "arguments": [
                    {"role": role.name, "span": [span.start, span.end]}
                    for role, span in record.arguments
                ],
            }
            for record in annotated.records
        ],
    }


def write_corpus(sentences: Iterable[AnnotatedSentence], handle: IO[str]) -> None:
    for annotated in sentences:
        handle.write(json.dumps(sentence_to_dict(annotated), ensure_ascii=False) + "\n")
