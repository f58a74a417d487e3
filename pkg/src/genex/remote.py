"""HTTP client backend speaking the remote scoring wire protocol.

One request per decode step: ``POST <base>/v1/score`` with a JSON body

    {"prompt": [...], "emitted": [...], "allowed": [...]}

answered by ``{"scores": [...]}`` with one float per allowed token, in
order.  Bodies are UTF-8 JSON with compact separators and unescaped
non-ASCII, so the bytes on the wire are canonical for a given query.
"""

from __future__ import annotations

import json
import os

import requests

from .backends import ScoreQuery, ScoringBackend
from .errors import (
    MalformedResponseError,
    RemoteConnectionError,
    RemoteStatusError,
    RemoteTimeoutError,
    ScoreLengthMismatchError,
)

SCORE_PATH = "/v1/score"
REMOTE_URL_ENV = "GENEX_REMOTE_URL"
DEFAULT_TIMEOUT = 10.0


def resolve_remote_url(explicit: str | None = None) -> str | None:
    """Pick the remote base URL: explicit value, else the environment."""
    if explicit:
        return explicit
    return os.environ.get(REMOTE_URL_ENV) or None


def encode_query(query: ScoreQuery) -> bytes:
    body = {
        "prompt": list(query.prompt),
        "emitted": list(query.emitted),
        "allowed": list(query.allowed),
    }
    return json.dumps(body, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


class RemoteBackend(ScoringBackend):
    """Scores tokens by calling a remote service; see the module docstring.

    Determinism is whatever the remote service provides, so it is not
    claimed here.
    """

    deterministic = False
    concurrent_query_safe = False  # one underlying session; callers serialize

    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = DEFAULT_TIMEOUT,
        session: requests.Session | None = None,
    ):
        if not base_url:
            raise ValueError("base_url must be non-empty")
        self.base_url = base_url.rstrip("/")
        self.endpoint = self.base_url + SCORE_PATH
        self.timeout = timeout
        self._session = session if session is not None else requests.Session()

    def score(self, query: ScoreQuery) -> list[float]:
        payload = encode_query(query)
        try:
            response = self._session.post(
                self.endpoint,
                data=payload,
                headers={"Content-Type": "application/json; charset=utf-8"},
                timeout=self.timeout,
            )
        except requests.exceptions.Timeout as exc:
            raise RemoteTimeoutError(
                f"scoring request to {self.endpoint} timed out after {self.timeout}s"
            ) from exc
        except requests.exceptions.ConnectionError as exc:
            raise RemoteConnectionError(
                f"could not connect to scoring service at {self.endpoint}"
            ) from exc
        if response.status_code != 200:
            raise RemoteStatusError(response.status_code)
        return parse_score_response(response.content, len(query.allowed))


def remote_backend(endpoint: str, timeout: float = DEFAULT_TIMEOUT) -> RemoteBackend:
    return RemoteBackend(endpoint, timeout=timeout)


def parse_score_response(body: bytes, expected: int) -> list[float]:
    """Validate a wire response and return the score list."""
    try:
        decoded = json.loads(body)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedResponseError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(decoded, dict) or "scores" not in decoded:
        raise MalformedResponseError('response JSON lacks a "scores" field')
    scores = decoded["scores"]
    if not isinstance(scores, list):
        raise MalformedResponseError('"scores" must be a JSON array')
    out: list[float] = []
    for value in scores:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedResponseError(f"score {value!r} is not a number")
        out.append(float(value))
    if len(out) != expected:
        raise ScoreLengthMismatchError(
            f"service returned {len(out)} scores for {expected} allowed tokens"
        )
    return out
