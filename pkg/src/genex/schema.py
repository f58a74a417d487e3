"""Event schema: the closed set of event types and their ordered role types.

File format is line oriented and hand authorable::

    # comment
    CONVICT: defendant, place
    ATTACK: attacker, place, target, victim

Type and role names are single tokens: no parentheses, no whitespace,
so they can travel through prompts and decode targets unchanged.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import SchemaParseError, SchemaValidationError, UnknownEventTypeError

_ILLEGAL = ("(", ")")


def _check_name(name: str, kind: str, line_no: int | None = None) -> None:
    where = f" (line {line_no})" if line_no is not None else ""
    if not name:
        raise SchemaValidationError(f"empty {kind} name{where}")
    if any(ch in name for ch in _ILLEGAL):
        raise SchemaValidationError(f"{kind} name may not contain parentheses: {name!r}{where}")
    if any(ch.isspace() for ch in name):
        raise SchemaValidationError(f"{kind} name may not contain whitespace: {name!r}{where}")


@dataclass(frozen=True, order=True)
class EventType:
    name: str

    def __post_init__(self) -> None:
        _check_name(self.name, "event type")


@dataclass(frozen=True, order=True)
class RoleType:
    name: str

    def __post_init__(self) -> None:
        _check_name(self.name, "role type")


class EventSchema:
    """Mapping from event type to its ordered role list; immutable after load."""

    def __init__(self, entries: Iterable[tuple[EventType, Iterable[RoleType]]]):
        table: dict[EventType, tuple[RoleType, ...]] = {}
        for event_type, roles in entries:
            if event_type in table:
                raise SchemaValidationError(f"duplicate event type: {event_type.name}")
            role_tuple = tuple(roles)
            if not role_tuple:
                raise SchemaValidationError(f"event type {event_type.name} has no roles")
            if len(set(role_tuple)) != len(role_tuple):
                raise SchemaValidationError(f"event type {event_type.name} repeats a role")
            table[event_type] = role_tuple
        if not table:
            raise SchemaValidationError("schema defines no event types")
        self._entries = table

    def roles_of(self, event_type: EventType) -> tuple[RoleType, ...]:
        try:
            return self._entries[event_type]
        except KeyError:
            raise UnknownEventTypeError(f"unknown event type: {event_type.name}") from None

    def all_types(self) -> tuple[EventType, ...]:
        return tuple(self._entries)

    def __contains__(self, event_type: EventType) -> bool:
        return event_type in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventSchema):
            return NotImplemented
        return list(self._entries.items()) == list(other._entries.items())


def parse_schema(text: str) -> EventSchema:
    entries: list[tuple[EventType, list[RoleType]]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise SchemaParseError(f"line {line_no}: expected 'TYPE: role, role, ...', got {line!r}")
        name_part, roles_part = line.split(":", 1)
        _check_name(name_part.strip(), "event type", line_no)
        event_type = EventType(name_part.strip())
        roles = []
        for role_name in roles_part.split(","):
            role_name = role_name.strip()
            _check_name(role_name, "role type", line_no)
            roles.append(RoleType(role_name))
        entries.append((event_type, roles))
    return EventSchema(entries)


def load_schema(source: Union[str, os.PathLike, IO[bytes], IO[str], bytes]) -> EventSchema:
    """Load a schema from a path, an open file, or raw bytes."""
    if isinstance(source, bytes):
        return parse_schema(source.decode("utf-8"))
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as handle:
            return parse_schema(handle.read())
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return parse_schema(data)


def format_schema(schema: EventSchema) -> str:
    """Render a schema back into the line format ``load_schema`` accepts."""
    lines = []
    for event_type in schema.all_types():
        roles = ", ".join(role.name for role in schema.roles_of(event_type))
        lines.append(f"{event_type.name}: {roles}")
    return "\n".join(lines) + "\n"
