"""Stage prompts: label tokens joined to the sentence by a separator token.

Event type detection sees the bare sentence; trigger extraction sees
``TYPE <sep> sentence``; argument extraction sees
``TYPE <sep> role <sep> sentence``.  Labels enter verbatim, so a prompt
is injective over (stage, type, role, sentence) for a fixed separator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .corpus import Sentence
from .errors import PromptError, RoleMismatchError
from .schema import EventSchema, EventType, RoleType

DEFAULT_SEPARATOR = "</s>"


@dataclass(frozen=True)
class SeparatorToken:
    text: str = DEFAULT_SEPARATOR

    def __post_init__(self) -> None:
        if not self.text:
            raise PromptError("separator token must be non-empty")
        if "(" in self.text or ")" in self.text:
            raise PromptError("separator token may not contain parentheses")


@dataclass(frozen=True)
class Prompt:
    """Ordered segments plus the flat rendered token sequence.

    The last segment is always the sentence; separators appear only
    between segments, so a single-segment prompt renders without any.
    """

    segments: tuple[tuple[str, ...], ...]
    sep: SeparatorToken

    def __post_init__(self) -> None:
        if not self.segments:
            raise PromptError("prompt needs at least one segment")
        for segment in self.segments:
            for token in segment:
                if token == self.sep.text:
                    raise PromptError(
                        f"token {token!r} collides with the separator; "
                        "choose a different separator"
                    )

    @cached_property
    def rendered(self) -> tuple[str, ...]:
        flat: list[str] = []
        for index, segment in enumerate(self.segments):
            if index:
                flat.append(self.sep.text)
            flat.extend(segment)
        return tuple(flat)


def etd_prompt(sentence: Sentence, sep: SeparatorToken = SeparatorToken()) -> Prompt:
    return Prompt((sentence.tokens,), sep)


def trigger_prompt(
    event_type: EventType,
    sentence: Sentence,
    sep: SeparatorToken = SeparatorToken(),
) -> Prompt:
    return Prompt(((event_type.name,), sentence.tokens), sep)


def argument_prompt(
    event_type: EventType,
    role: RoleType,
    sentence: Sentence,
    sep: SeparatorToken = SeparatorToken(),
    schema: EventSchema | None = None,
) -> Prompt:
    if schema is not None and role not in schema.roles_of(event_type):
        raise RoleMismatchError(
            f"role {role.name!r} is not a {event_type.name} role"
        )
    return Prompt(((event_type.name,), (role.name,), sentence.tokens), sep)
