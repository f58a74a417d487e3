"""Parenthesis list format: ``((item1)(item2)...)`` with ``(())`` as the empty value.

This is the target format shared by all decoding stages.  An item is a
non-empty sequence of tokens joined by single spaces; the whole value is
a flat list of items, each wrapped in its own parentheses, inside one
outer pair.  The parser is strict: it accepts exactly the strings
``serialize`` can produce (modulo insignificant whitespace) and rejects
everything else, so a parse failure always indicates a real bug upstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import IllegalItemTokenError, ParenParseError

OPEN = "("
CLOSE = ")"

_EMPTY_RENDERED = "(())"


def _check_item_token(token: str) -> None:
    if not token:
        raise IllegalItemTokenError("item tokens must be non-empty")
    if OPEN in token or CLOSE in token:
        raise IllegalItemTokenError(f"item token may not contain parentheses: {token!r}")
    if any(ch.isspace() for ch in token):
        raise IllegalItemTokenError(f"item token may not contain whitespace: {token!r}")


@dataclass(frozen=True)
class ParenList:
    """An ordered list of token sequences; the parsed form of the format."""

    items: tuple[tuple[str, ...], ...] = ()

    def __init__(self, items: Iterable[Sequence[str]] = ()):
        normalized = tuple(tuple(item) for item in items)
        for item in normalized:
            if not item:
                raise IllegalItemTokenError("items must be non-empty token sequences")
            for token in item:
                _check_item_token(token)
        object.__setattr__(self, "items", normalized)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)


def serialize(value: ParenList) -> str:
    """Render a ParenList; the empty list renders as ``(())``."""
    if not value.items:
        return _EMPTY_RENDERED
    body = "".join(OPEN + " ".join(item) + CLOSE for item in value.items)
    return OPEN + body + CLOSE


def parse(text: str) -> ParenList:
    """Parse a parenthesis-format string back into a ParenList.

    Whitespace between structural tokens is tolerated; everything else is
    rejected: unbalanced parentheses, content outside the item level, and
    an empty inner group anywhere except as the sole group of ``(())``.
    """
    depth = 0
    items: list[tuple[str, ...]] = []
    current: list[str] = []
    word: list[str] = []
    closed_outer = False
    empty_groups = 0

    def flush_word() -> None:
        if word:
            current.append("".join(word))
            word.clear()

    for pos, ch in enumerate(text):
        if ch == OPEN:
            flush_word()
            if closed_outer:
                raise ParenParseError(f"content after closing parenthesis at position {pos}")
            if depth == 2:
                raise ParenParseError(f"nesting deeper than two at position {pos}")
            depth += 1
        elif ch == CLOSE:
            flush_word()
            if depth == 0:
                raise ParenParseError(f"unbalanced parentheses: unexpected ')' at position {pos}")
            if depth == 2:
                if current:
                    items.append(tuple(current))
                    current.clear()
                else:
                    empty_groups += 1
            depth -= 1
            if depth == 0:
                closed_outer = True
        elif ch.isspace():
            flush_word()
        else:
            if closed_outer or depth != 2:
                raise ParenParseError(
                    f"content token at depth {depth} (position {pos}); tokens are only legal inside an item"
                )
            word.append(ch)

    if depth != 0:
        raise ParenParseError("unbalanced parentheses: input ended before the outer close")
    if not closed_outer:
        raise ParenParseError("empty input")
    if empty_groups:
        if empty_groups > 1 or items:
            raise ParenParseError("empty inner group is only legal as the sole group of '(())'")
        return ParenList()
    if not items:
        raise ParenParseError("outer group must contain at least one item")
    return ParenList(items)
