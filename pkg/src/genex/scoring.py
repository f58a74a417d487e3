"""Exact-match precision/recall/F1 for triggers and arguments.

A predicted trigger is correct only when an unconsumed gold trigger
with the same (sentence id, event type, span) exists; arguments add the
role to the key.  Matching is one-to-one, so duplicated predictions
cannot inflate the correct count.  Arguments never need to match a
particular trigger.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import AnnotatedSentence
from .errors import CorpusValidationError


def f1(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    correct: int
    predicted: int
    gold: int

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.correct, self.predicted, self.gold)

    @classmethod
    def from_counts(cls, correct: int, predicted: int, gold: int) -> "Metrics":
        # zero-denominator conventions: an empty side is perfect against
        # an empty reference and worthless against a non-empty one
        if predicted == 0:
            p = 1.0 if gold == 0 else 0.0
        else:
            p = correct / predicted
        if gold == 0:
            r = 1.0 if predicted == 0 else 0.0
        else:
            r = correct / gold
        return cls(p, r, f1(p, r), correct, predicted, gold)


def _score(pred: Sequence, gold: Sequence) -> Metrics:
    pred_counts = Counter(pred)
    gold_counts = Counter(gold)
    correct = sum(
        min(count, gold_counts[key]) for key, count in pred_counts.items()
    )
    return Metrics.from_counts(correct, len(pred), len(gold))


def score_triggers(pred: Sequence, gold: Sequence) -> Metrics:
    """Score (sentence id, event type, span) triples, one-to-one."""
    return _score(pred, gold)


def score_arguments(pred: Sequence, gold: Sequence) -> Metrics:
    """Score (sentence id, event type, role, span) quadruples, one-to-one."""
    return _score(pred, gold)


def trigger_items(annotated: AnnotatedSentence) -> list[tuple]:
    return [
        (annotated.id, record.event_type, span)
        for record in annotated.records
        for span in record.triggers
    ]


def argument_items(annotated: AnnotatedSentence) -> list[tuple]:
    return [
        (annotated.id, record.event_type, role, span)
        for record in annotated.records
        for role, span in record.arguments
    ]


def corpus_trigger_items(corpus: Iterable[AnnotatedSentence]) -> list[tuple]:
    return [item for annotated in corpus for item in trigger_items(annotated)]


def corpus_argument_items(corpus: Iterable[AnnotatedSentence]) -> list[tuple]:
    return [item for annotated in corpus for item in argument_items(annotated)]


def check_alignment(
    pred: Sequence[AnnotatedSentence], gold: Sequence[AnnotatedSentence]
) -> None:
    """Require the two corpora to cover exactly the same sentence ids."""
    pred_ids = Counter(annotated.id for annotated in pred)
    gold_ids = Counter(annotated.id for annotated in gold)
    if pred_ids != gold_ids:
        extra = sorted((pred_ids - gold_ids).elements())
        missing = sorted((gold_ids - pred_ids).elements())
        raise CorpusValidationError(
            f"sentence ids differ: extra in predictions {extra}, missing {missing}"
        )


def score_corpora(
    pred: Sequence[AnnotatedSentence], gold: Sequence[AnnotatedSentence]
) -> tuple[Metrics, Metrics]:
    """Trigger and argument metrics for aligned prediction/gold corpora."""
    check_alignment(pred, gold)
    trigger = score_triggers(corpus_trigger_items(pred), corpus_trigger_items(gold))
    argument = score_arguments(corpus_argument_items(pred), corpus_argument_items(gold))
    return trigger, argument


def score_report(trigger: Metrics, argument: Metrics) -> dict:
    """JSON-ready report with per-task metrics and raw counts."""

    def block(m: Metrics) -> dict:
        return {"p": m.precision, "r": m.recall, "f1": m.f1}

    def counts(m: Metrics) -> dict:
        return {"correct": m.correct, "predicted": m.predicted, "gold": m.gold}

    return {
        "trigger": block(trigger),
        "argument": block(argument),
        "counts": {"trigger": counts(trigger), "argument": counts(argument)},
    }
