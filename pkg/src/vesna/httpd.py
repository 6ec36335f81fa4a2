"""HTTP front ends.

Two listeners: the chat service (POST /chat, POST /webhook, GET /scene,
GET /healthz, default port 8080) and the scene command service (the
path-based wire protocol, default port 8081).  Both are plain threading
servers from the standard library; all state funnels into the pipeline's
serialized mailbox and the scene host's lock, so concurrent connections are
safe.

HttpSceneClient is the agent-side counterpart of the scene listener: it turns
scene actions into GET requests and wire errors back into scene exceptions,
with a per-call timeout.
"""

from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .protocol import (
    FulfillmentRequest,
    FulfillmentSchemaError,
    SceneCommandRequest,
    SceneCommandResponse,
    WireFormatError,
    decode_scene_request,
    decode_scene_response,
    encode_scene_request,
    encode_scene_response,
)
from .scene import SceneError
from .service import MailboxTimeout, Pipeline, SceneHost

DEFAULT_CHAT_PORT = 8080
DEFAULT_SCENE_PORT = 8081
SCENE_CALL_TIMEOUT = 5.0
WEBHOOK_MAILBOX_TIMEOUT = 10.0

_ERROR_STATUS = {
    "occupied": 409,
    "out-of-bounds": 409,
    "not-found": 404,
    "unknown-anchor": 404,
    "unknown-prototype": 404,
    "bad-request": 400,
}

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class RemoteSceneError(SceneError):
    """A scene wire call failed; mirrors the engine's code/message pairs."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def execute_scene_command(host: SceneHost, command: SceneCommandRequest) -> str:
    """Run one decoded wire command against the scene host; the listing of a
    ``list`` command is serialized as a JSON array."""
    if command.verb == "add":
        return host.add(command.obj_name, command.pos_x, command.pos_y)
    if command.verb == "remove":
        return host.remove(command.obj_name)
    return json.dumps(host.list())


class _SceneHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "vesna-scene"

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send(self, status: int, body: str) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        host: SceneHost = self.server.scene_host
        try:
            command = decode_scene_request(self.path)
        except WireFormatError as err:
            self._send(400, encode_scene_response(
                SceneCommandResponse.error("bad-request", str(err))
            ))
            return
        try:
            payload = execute_scene_command(host, command)
        except SceneError as err:
            status = _ERROR_STATUS.get(err.code, 400)
            self._send(status, encode_scene_response(
                SceneCommandResponse.error(err.code, err.message)
            ))
            return
        self._send(200, encode_scene_response(SceneCommandResponse.done(payload)))


class SceneServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, host: SceneHost, port: int, bind: str = "127.0.0.1"):
        super().__init__((bind, port), _SceneHandler)
        self.scene_host = host


class HttpSceneClient:
    """Scene actions over the wire protocol, for the agent's plan bodies."""

    def __init__(self, base_url: str, timeout: float = SCENE_CALL_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def _call(self, request: SceneCommandRequest) -> str:
        url = self.base_url + encode_scene_request(request)
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                body = resp.read().decode("utf-8")
        except urllib.error.HTTPError as err:
            body = err.read().decode("utf-8")
        except OSError:
            raise RemoteSceneError(
                "timeout", f"scene service did not answer within {self.timeout} s"
            ) from None
        try:
            response = decode_scene_response(body)
        except WireFormatError:
            raise RemoteSceneError("bad-response", f"unintelligible scene reply {body!r}") from None
        if response.status == "error":
            raise RemoteSceneError(response.code, response.message)
        return response.payload

    def add(self, obj_name: str, pos_x: str, pos_y: str) -> str:
        return self._call(SceneCommandRequest.add(obj_name, pos_x, pos_y))

    def remove(self, ref_name: str) -> str:
        return self._call(SceneCommandRequest.remove(ref_name))

    def list(self) -> list[str]:
        return json.loads(self._call(SceneCommandRequest.list()))


class _ChatHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "vesna-chat"

    def log_message(self, format, *args):
        pass

    def _send_json(self, status: int, doc: dict) -> None:
        data = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length)

    def _read_json(self) -> object:
        try:
            return json.loads(self._read_body().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise FulfillmentSchemaError("request body is not valid JSON") from None

    def do_POST(self):
        pipeline: Pipeline = self.server.pipeline
        if self.path == "/chat":
            try:
                doc = self._read_json()
                if not isinstance(doc, dict) or not isinstance(doc.get("text"), str) \
                        or not doc["text"].strip():
                    raise FulfillmentSchemaError('expected {"text": <non-empty string>}')
            except FulfillmentSchemaError as err:
                self._send_json(400, {"error": str(err)})
                return
            result = pipeline.chat(doc["text"])
            self._send_json(200, {"reply": result.reply, "scene_version": result.scene_version})
        elif self.path == "/webhook":
            try:
                request = FulfillmentRequest.from_json_dict(self._read_json())
            except FulfillmentSchemaError as err:
                self._send_json(400, {"error": str(err)})
                return
            try:
                response = pipeline.webhook(request, timeout=self.server.mailbox_timeout)
            except MailboxTimeout as err:
                self._send_json(504, {"error": str(err)})
                return
            self._send_json(200, response.to_json_dict())
        else:
            self._send_json(404, {"error": f"no such endpoint {self.path}"})

    def do_GET(self):
        pipeline: Pipeline = self.server.pipeline
        if self.path == "/scene":
            self._send_json(200, pipeline.scene_state())
        elif self.path == "/healthz":
            self._send_json(200, {"status": "ready"})
        elif self.server.ui_dir is not None:
            self._serve_static()
        else:
            self._send_json(404, {"error": f"no such endpoint {self.path}"})

    def _serve_static(self):
        root: Path = self.server.ui_dir
        relative = self.path.lstrip("/") or "index.html"
        target = (root / relative).resolve()
        if not target.is_relative_to(root.resolve()) or not target.is_file():
            self._send_json(404, {"error": f"no such endpoint {self.path}"})
            return
        data = target.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


class ChatServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        pipeline: Pipeline,
        port: int,
        bind: str = "127.0.0.1",
        ui_dir: Path | None = None,
        mailbox_timeout: float = WEBHOOK_MAILBOX_TIMEOUT,
    ):
        super().__init__((bind, port), _ChatHandler)
        self.pipeline = pipeline
        self.ui_dir = ui_dir
        self.mailbox_timeout = mailbox_timeout


def start_in_thread(server: ThreadingHTTPServer) -> threading.Thread:
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread
