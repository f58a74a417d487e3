"""Exception hierarchy for the genex toolkit.

Every error raised by this package derives from :class:`GenexError`, so
callers can catch one type at the CLI boundary while tests can assert on
the specific failure.
"""


class GenexError(Exception):
    """Base class for all genex errors."""


class SchemaError(GenexError):
    """Base class for event-schema problems."""


class SchemaParseError(SchemaError):
    """The schema file is malformed."""


class SchemaValidationError(SchemaError):
    """The schema file parsed but violates an invariant."""


class UnknownEventTypeError(SchemaError, KeyError):
    """An event type was queried that the schema does not define."""


class CorpusError(GenexError):
    """Base class for corpus problems."""


class CorpusParseError(CorpusError):
    """A corpus line is not valid JSON or misses required keys."""


class CorpusValidationError(CorpusError):
    """A corpus line parsed but violates an invariant (bad span, role, token)."""


class ParenError(GenexError):
    """Base class for parenthesis-format problems."""


class IllegalItemTokenError(ParenError):
    """An item token contains a structural character or whitespace."""


class ParenParseError(ParenError):
    """A string does not conform to the parenthesis format."""


class TrieError(GenexError):
    """Invalid candidate handed to the token trie."""


class DecodeError(GenexError):
    """Base class for decoding failures."""


class DecodeDeadEndError(DecodeError):
    """No legal token exists at the current decode state."""


class MaxStepsExceededError(DecodeError):
    """Decoding did not finish within the step budget."""


class IllegalDecodeTokenError(DecodeError):
    """A token outside the legal set was fed to the decode state machine."""


class PromptError(GenexError):
    """Prompt composition failed (separator collision, structural token)."""


class RoleMismatchError(GenexError):
    """A role was used with an event type whose schema does not list it."""


class TokenizationError(GenexError):
    """A word could not be segmented with the configured vocabulary."""


class ConfigError(GenexError):
    """A configuration file or setting value is unusable."""


class PipelineError(GenexError):
    """Base class for extraction-pipeline failures."""


class StageError(PipelineError):
    """A pipeline stage failed; carries the stage name and query labels."""

    def __init__(self, stage: str, message: str, event_type: str | None = None,
                 role: str | None = None):
        where = stage
        if event_type is not None:
            where += f"[{event_type}" + (f"/{role}]" if role is not None else "]")
        super().__init__(f"{where}: {message}")
        self.stage = stage
        self.event_type = event_type
        self.role = role


class BackendError(GenexError):
    """Base class for scoring-backend failures."""


class RemoteBackendError(BackendError):
    """Base class for remote scoring-backend failures."""


class RemoteTimeoutError(RemoteBackendError):
    """The remote endpoint did not answer within the timeout."""


class RemoteConnectionError(RemoteBackendError):
    """The remote endpoint could not be reached."""


class RemoteStatusError(RemoteBackendError):
    """The remote endpoint answered with a non-200 status."""

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"remote scorer returned status {status}")
        self.status = status


class MalformedResponseError(RemoteBackendError):
    """The remote endpoint answered with a body the client cannot use."""


class ScoreLengthMismatchError(BackendError):
    """A backend returned a score list whose length differs from the query."""
