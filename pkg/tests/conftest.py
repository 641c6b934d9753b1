import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from types import SimpleNamespace

import pytest

from ontoalign.embedding import _hash_rows


class _StubState:
    """Mutable knobs the tests twist to simulate service behavior."""

    def __init__(self):
        self.mode = "ok"  # ok | unavailable | ragged
        self.delay = 0.0
        self.dimension = 32
        self.batch_sizes = []


class _StubServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, handler, state):
        super().__init__(address, handler)
        self.state = state


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        state = self.server.state
        if self.path != "/embed":
            self._reply(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length", 0))
        texts = json.loads(self.rfile.read(length))["texts"]
        state.batch_sizes.append(len(texts))
        if state.delay:
            time.sleep(state.delay)
        if state.mode == "unavailable":
            self._reply(503, {"error": "model not loaded"})
        elif state.mode == "ragged":
            self._reply(
                200,
                {
                    "dim": state.dimension,
                    "vectors": [[0.0] * (state.dimension - 1) for _ in texts],
                },
            )
        else:
            rows = _hash_rows(texts, state.dimension, seed=0)
            self._reply(200, {"dim": state.dimension, "vectors": rows.tolist()})

    def _reply(self, status, payload):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def embed_server():
    state = _StubState()
    server = _StubServer(("127.0.0.1", 0), _Handler, state)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield SimpleNamespace(
        url=f"http://127.0.0.1:{server.server_address[1]}", state=state
    )
    server.shutdown()
    thread.join(timeout=5)
