"""Wire formats: scene-command URL paths and the fulfillment JSON bodies.

The scene protocol is path-only.  An add command is three percent-encoded
segments (object name, posX, posY); remove and list use verb prefixes so the
flat three-segment form stays reserved for add:

    /Yaskawa%20MA2010/right/front
    /remove/Yaskawa%20MA2010
    /list

Responses are one line of plain text, ``done:<payload>`` or
``error:<code>:<message>``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field


class WireFormatError(Exception):
    """Malformed wire input; the scene must stay untouched when this raises."""


_UNRESERVED = set(string.ascii_letters + string.digits + "-._~")
_HEX = set(string.hexdigits)


def percent_encode(text: str) -> str:
    """RFC 3986 encoding keeping only the unreserved set."""
    out = []
    for byte in text.encode("utf-8"):
        ch = chr(byte)
        out.append(ch if ch in _UNRESERVED else f"%{byte:02X}")
    return "".join(out)


def percent_decode(segment: str) -> str:
    """Strict inverse of percent_encode: bad escapes and bad UTF-8 are errors
    rather than being passed through."""
    raw = bytearray()
    i = 0
    while i < len(segment):
        ch = segment[i]
        if ch == "%":
            if i + 3 > len(segment):
                raise WireFormatError(f"truncated percent escape in {segment!r}")
            hi, lo = segment[i + 1], segment[i + 2]
            if hi not in _HEX or lo not in _HEX:
                raise WireFormatError(f"bad percent escape in {segment!r}")
            raw.append(int(hi + lo, 16))
            i += 3
        else:
            raw.extend(ch.encode("utf-8"))
            i += 1
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        raise WireFormatError(f"segment {segment!r} is not valid UTF-8") from None


@dataclass(frozen=True)
class SceneCommandRequest:
    verb: str  # add | remove | list
    obj_name: str = ""
    pos_x: str = ""
    pos_y: str = ""

    @classmethod
    def add(cls, obj_name: str, pos_x: str, pos_y: str) -> "SceneCommandRequest":
        return cls("add", obj_name, pos_x, pos_y)

    @classmethod
    def remove(cls, ref_name: str) -> "SceneCommandRequest":
        return cls("remove", ref_name)

    @classmethod
    def list(cls) -> "SceneCommandRequest":
        return cls("list")


def encode_scene_request(request: SceneCommandRequest) -> str:
    if request.verb == "add":
        return "/{}/{}/{}".format(
            percent_encode(request.obj_name),
            percent_encode(request.pos_x),
            percent_encode(request.pos_y),
        )
    if request.verb == "remove":
        return f"/remove/{percent_encode(request.obj_name)}"
    if request.verb == "list":
        return "/list"
    raise ValueError(f"unknown verb {request.verb!r}")


def decode_scene_request(path: str) -> SceneCommandRequest:
    """Inverse of encode_scene_request on valid paths.

    Raises WireFormatError on a wrong segment count, an empty segment, a bad
    percent escape, or a decoded string that still carries a path separator.
    """
    if not path.startswith("/"):
        raise WireFormatError("path must start with '/'")
    segments = path[1:].split("/")
    if any(not seg for seg in segments):
        raise WireFormatError("empty path segment")

    def decoded(seg: str) -> str:
        text = percent_decode(seg)
        if "/" in text:
            raise WireFormatError("decoded segment contains a path separator")
        return text

    if len(segments) == 1:
        if segments[0] == "list":
            return SceneCommandRequest.list()
        raise WireFormatError(f"unknown single-segment command {segments[0]!r}")
    if len(segments) == 2:
        if segments[0] == "remove":
            return SceneCommandRequest.remove(decoded(segments[1]))
        raise WireFormatError(f"unknown two-segment command {segments[0]!r}")
    if len(segments) == 3:
        return SceneCommandRequest.add(*(decoded(s) for s in segments))
    raise WireFormatError(f"expected 1-3 path segments, got {len(segments)}")


@dataclass(frozen=True)
class SceneCommandResponse:
    status: str  # done | error
    payload: str = ""  # ref name / listing on done
    code: str = ""  # error code on error
    message: str = ""  # error message on error

    @classmethod
    def done(cls, payload: str) -> "SceneCommandResponse":
        return cls("done", payload)

    @classmethod
    def error(cls, code: str, message: str) -> "SceneCommandResponse":
        return cls("error", "", code, message)


def encode_scene_response(response: SceneCommandResponse) -> str:
    if response.status == "done":
        return f"done:{response.payload}"
    return f"error:{response.code}:{response.message}"


def decode_scene_response(text: str) -> SceneCommandResponse:
    if text.startswith("done:"):
        return SceneCommandResponse.done(text[len("done:"):])
    if text.startswith("error:"):
        rest = text[len("error:"):]
        code, sep, message = rest.partition(":")
        if not sep:
            raise WireFormatError(f"malformed error response {text!r}")
        return SceneCommandResponse.error(code, message)
    raise WireFormatError(f"malformed scene response {text!r}")


# --- fulfillment webhook bodies ----------------------------------------------

class FulfillmentSchemaError(Exception):
    """The webhook body did not match the fulfillment request schema."""


@dataclass(frozen=True)
class FulfillmentRequest:
    response_id: str
    query_text: str
    intent_name: str
    parameters: dict[str, str] = field(default_factory=dict)
    session: str = ""

    def to_json_dict(self) -> dict:
        return {
            "response_id": self.response_id,
            "query_text": self.query_text,
            "intent_name": self.intent_name,
            "parameters": dict(self.parameters),
            "session": self.session,
        }

    @classmethod
    def from_json_dict(cls, doc: object) -> "FulfillmentRequest":
        if not isinstance(doc, dict):
            raise FulfillmentSchemaError("request body must be a JSON object")
        required = {"response_id", "query_text", "intent_name", "parameters", "session"}
        unknown = set(doc) - required
        if unknown:
            raise FulfillmentSchemaError(f"unknown field(s) {sorted(unknown)}")
        missing = required - set(doc)
        if missing:
            raise FulfillmentSchemaError(f"missing field(s) {sorted(missing)}")
        for key in ("response_id", "query_text", "intent_name", "session"):
            if not isinstance(doc[key], str):
                raise FulfillmentSchemaError(f"{key} must be a string")
        if not doc["intent_name"]:
            raise FulfillmentSchemaError("intent_name must be non-empty")
        params = doc["parameters"]
        if not isinstance(params, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in params.items()
        ):
            raise FulfillmentSchemaError("parameters must map strings to strings")
        return cls(doc["response_id"], doc["query_text"], doc["intent_name"],
                   dict(params), doc["session"])


@dataclass(frozen=True)
class FulfillmentResponse:
    fulfillment_text: str

    def to_json_dict(self) -> dict:
        return {"fulfillment_text": self.fulfillment_text}

    @classmethod
    def from_json_dict(cls, doc: object) -> "FulfillmentResponse":
        if not isinstance(doc, dict) or set(doc) != {"fulfillment_text"} \
                or not isinstance(doc["fulfillment_text"], str):
            raise FulfillmentSchemaError("expected {'fulfillment_text': <string>}")
        return cls(doc["fulfillment_text"])
