"""In-process mock of the remote scoring service, for tests and demos.

Serves ``POST /v1/score`` and records every raw request body so tests
can byte-check the wire format.  Behavior is selected per server:

- ``index``: scores are [0, 1, 2, ...], one per allowed token
- ``wrong-length``: returns one score too many
- ``error-status``: answers 500
- ``malformed``: answers 200 with a non-JSON body
- ``slow``: sleeps ``delay`` seconds, then behaves like ``index``

Runnable standalone: ``python -m genex.mock_server --port 8008``.
"""

from __future__ import annotations

import argparse
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .remote import SCORE_PATH

MODES = ("index", "wrong-length", "error-status", "malformed", "slow")


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, format, *args):  # noqa: A002 - base class signature
        pass

    def _reply(self, status: int, body: bytes, content_type: str = "application/json"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        server = self.server
        with server.requests_lock:
            server.requests.append(body)
        if self.path != SCORE_PATH:
            self._reply(404, b'{"error": "unknown path"}')
            return
        mode = server.mode
        if mode == "error-status":
            self._reply(500, b'{"error": "induced failure"}')
            return
        if mode == "malformed":
            self._reply(200, b"this is not json")
            return
        if mode == "slow":
            time.sleep(server.delay)
        try:
            query = json.loads(body)
            allowed = query["allowed"]
        except (json.JSONDecodeError, KeyError, TypeError):
            self._reply(400, b'{"error": "bad request body"}')
            return
        count = len(allowed)
        if mode == "wrong-length":
            count += 1
        scores = list(range(count))
        self._reply(200, json.dumps({"scores": scores}).encode("utf-8"))


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True


class MockScoreServer:
    """Ephemeral-port mock server; use as a context manager in tests."""

    def __init__(self, mode: str = "index", delay: float = 0.0):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self._server = _Server(("127.0.0.1", 0), _Handler)
        self._server.mode = mode
        self._server.delay = delay
        self._server.requests = []
        self._server.requests_lock = threading.Lock()
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def mode(self) -> str:
        return self._server.mode

    @mode.setter
    def mode(self, value: str) -> None:
        if value not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self._server.mode = value

    @property
    def delay(self) -> float:
        return self._server.delay

    @delay.setter
    def delay(self, value: float) -> None:
        self._server.delay = value

    @property
    def requests(self) -> list[bytes]:
        with self._server.requests_lock:
            return list(self._server.requests)

    def clear_requests(self) -> None:
        with self._server.requests_lock:
            self._server.requests.clear()

    def start(self) -> "MockScoreServer":
        if self._thread is not None:
            return self
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._thread is None:
            return
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()
        self._thread = None

    def __enter__(self) -> "MockScoreServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Run the mock scoring server.")
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--mode", choices=MODES, default="index")
    parser.add_argument("--delay", type=float, default=0.0,
                        help="response delay in seconds for --mode slow")
    args = parser.parse_args(argv)
    server = _Server(("127.0.0.1", args.port), _Handler)
    server.mode = args.mode
    server.delay = args.delay
    server.requests = []
    server.requests_lock = threading.Lock()
    print(f"mock scoring server on http://127.0.0.1:{args.port}{SCORE_PATH} "
          f"(mode={args.mode})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
