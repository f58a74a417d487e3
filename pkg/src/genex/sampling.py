"""Training-set construction with negative sampling.

For every sentence the builder emits one type-detection example, the
positive trigger and argument examples for each gold event type, and
negative examples for randomly drawn non-gold types whose target is the
empty value ``(())``.  Trigger negatives and argument negatives are
drawn independently (``n_trg`` and ``n_arg`` types respectively); each
negative argument type contributes one example per role it defines.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .corpus import AnnotatedSentence
from .paren import ParenList, serialize
from .prompts import Prompt, SeparatorToken, argument_prompt, etd_prompt, trigger_prompt
from .schema import EventSchema, EventType

ETD = "ETD"
TRIGGER = "TRIGGER"
ARGUMENT = "ARGUMENT"
POSITIVE = "positive"
NEGATIVE = "negative"

# default negative-type draw sizes for the trigger and argument stages
DEFAULT_N_TRG = 4
DEFAULT_N_ARG = 2

_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class TrainingExample:
    prompt: Prompt
    target: ParenList
    stage: str
    polarity: str

    def __post_init__(self):
        if self.stage not in (ETD, TRIGGER, ARGUMENT):
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        if self.polarity == NEGATIVE and self.target.items:
            raise ValueError("negative examples must have an empty target")


def sample_negative_types(
    gold: set[EventType],
    universe: Sequence[EventType],
    n: int,
    rng_seed: int,
) -> list[EventType]:
    """Draw up to ``n`` distinct types from ``universe`` avoiding ``gold``.

    A shortfall (fewer non-gold types than ``n``) truncates silently.
    The draw is a seeded sample over the universe in its given order, so
    equal inputs always produce the same list.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    candidates = [t for t in universe if t not in gold]
    k = min(n, len(candidates))
    if k == 0:
        return []
    return random.Random(rng_seed).sample(candidates, k)


def sentence_seed(rng_seed: int, index: int, stage_offset: int) -> int:
    """Per-sentence, per-stage seed: ``rng_seed * 1000003 + 2*index + offset``.

    Sentences are independent under this rule, so a parallel builder
    partitioned by sentence index reproduces the sequential output.
    """
    return rng_seed * _SEED_STRIDE + 2 * index + stage_offset


def _mention_items(spans, sentence) -> ParenList:
    return ParenList(tuple(tuple(sentence.tokens[s.start : s.end]) for s in spans))


def sentence_examples(
    annotated: AnnotatedSentence,
    schema: EventSchema,
    *,
    n_trg: int = DEFAULT_N_TRG,
    n_arg: int = DEFAULT_N_ARG,
    sep: SeparatorToken | None = None,
    index: int = 0,
    rng_seed: int = 0,
) -> list[TrainingExample]:
    """All training examples for one sentence, in a fixed order.

    Order: the ETD example, then per gold type its trigger and argument
    examples, then trigger negatives, then argument negatives.
    """
    if sep is None:
        sep = SeparatorToken()
    sentence = annotated.sentence
    gold_types = annotated.gold_event_types()
    gold_set = set(gold_types)
    universe = schema.all_types()

    examples = [
        TrainingExample(
            etd_prompt(sentence, sep),
            ParenList(tuple((et.name,) for et in gold_types)),
            ETD,
            POSITIVE,
        )
    ]

    for record in annotated.records:
        event_type = record.event_type
        examples.append(
            TrainingExample(
                trigger_prompt(event_type, sentence, sep),
                _mention_items(record.triggers, sentence),
                TRIGGER,
                POSITIVE,
            )
        )
        for role in schema.roles_of(event_type):
            spans = [span for (r, span) in record.arguments if r == role]
            examples.append(
                TrainingExample(
                    argument_prompt(event_type, role, sentence, sep),
                    _mention_items(spans, sentence),
                    ARGUMENT,
                    POSITIVE,
                )
            )

    empty = ParenList()
    trigger_negatives = sample_negative_types(
        gold_set, universe, n_trg, sentence_seed(rng_seed, index, 0)
    )
    for event_type in trigger_negatives:
        examples.append(
            TrainingExample(
                trigger_prompt(event_type, sentence, sep), empty, TRIGGER, NEGATIVE
            )
        )
    argument_negatives = sample_negative_types(
        gold_set, universe, n_arg, sentence_seed(rng_seed, index, 1)
    )
    for event_type in argument_negatives:
        for role in schema.roles_of(event_type):
            examples.append(
                TrainingExample(
                    argument_prompt(event_type, role, sentence, sep),
                    empty,
                    ARGUMENT,
                    NEGATIVE,
                )
            )
    return examples


def build_training_set(
    corpus: Sequence[AnnotatedSentence],
    schema: EventSchema,
    n_trg: int = DEFAULT_N_TRG,
    n_arg: int = DEFAULT_N_ARG,
    sep: SeparatorToken | None = None,
    rng_seed: int = 0,
) -> list[TrainingExample]:
    examples: list[TrainingExample] = []
    for index, annotated in enumerate(corpus):
        examples.extend(
            sentence_examples(
                annotated,
                schema,
                n_trg=n_trg,
                n_arg=n_arg,
                sep=sep,
                index=index,
                rng_seed=rng_seed,
            )
        )
    return examples


def training_example_to_dict(example: TrainingExample) -> dict:
    return {
        "stage": example.stage,
        "polarity": example.polarity,
        "prompt": list(example.prompt.rendered),
        "target": serialize(example.target),
    }


def write_training_set(examples: Iterable[TrainingExample], handle: IO[str]) -> int:
    """Write one JSON object per line; returns the number of lines."""
    count = 0
    for example in examples:
        handle.write(json.dumps(training_example_to_dict(example), ensure_ascii=False))
        handle.write("\n")
        count += 1
    return count
