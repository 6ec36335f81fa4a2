"""In-process pipeline: one object that owns the scene, the agent state, and
the NLU config, and exposes the chat / webhook / scene-state operations the
HTTP layer and the CLI both call.

All mutating requests are funneled through one lock (the agent's serialized
mailbox); state reads take the same lock just long enough to copy a snapshot.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from . import agent as agent_mod
from . import nlu as nlu_mod
from .beliefs import RequestBelief
from .protocol import FulfillmentRequest, FulfillmentResponse
from .scene import Catalog, Scene, SceneError, placement_from_strings
from .store import Workspace

HELP_REPLY = (
    "Sorry, I did not understand that. Try something like "
    '"Add a Yaskawa MA2010 in front on the right" or "Remove the Yaskawa MA2010".'
)


class MailboxTimeout(Exception):
    """The serialized mailbox did not become free within the deadline."""


class SceneHost:
    """The single mutation gateway for a scene: every add/remove/list/snapshot
    goes through one lock, whichever transport the call came in on.

    Doubles as the in-process scene client for the agent (same method
    signatures as the wire-level commands).
    """

    def __init__(self, scene: Scene, catalog: Catalog):
        self.scene = scene
        self.catalog = catalog
        self._lock = threading.Lock()

    def add(self, obj_name: str, pos_x: str, pos_y: str) -> str:
        with self._lock:
            placement = placement_from_strings(pos_x, pos_y)
            return self.scene.add_object(self.catalog, obj_name, placement)

    def remove(self, ref_name: str) -> str:
        with self._lock:
            return self.scene.remove_object(ref_name).ref_name

    def list(self) -> list[str]:
        with self._lock:
            return [obj.ref_name for obj in self.scene.list_objects()]

    def snapshot(self) -> dict:
        with self._lock:
            return self.scene.snapshot()

    @property
    def version(self) -> int:
        with self._lock:
            return self.scene.version

    def refs(self) -> set[str]:
        with self._lock:
            return set(self.scene.objects)


@dataclass(frozen=True)
class ChatResult:
    reply: str
    scene_version: int
    ok: bool


class Pipeline:
    """Classify -> dispatch -> reply, against one workspace.

    ``scene_client`` defaults to the in-process SceneHost; the serve command
    passes an HTTP client instead so commands travel the scene wire protocol.
    """

    def __init__(self, workspace: Workspace, scene_client: agent_mod.SceneClient | None = None):
        self.nlu_config = workspace.nlu_config
        self.catalog = workspace.catalog
        self.scene_host = SceneHost(workspace.scene, workspace.catalog)
        self.scene_client = scene_client if scene_client is not None else self.scene_host
        self.agent_state = agent_mod.AgentState(plan_library=list(workspace.plans))
        self._mailbox = threading.Lock()
        self._request_counter = 0

    # -- chat ---------------------------------------------------------------

    def chat(self, text: str) -> ChatResult:
        if not text.strip():
            raise ValueError("chat text must be non-empty")
        with self._mailbox:
            return self._chat_locked(text)

    def _chat_locked(self, text: str) -> ChatResult:
        match = nlu_mod.classify(
            self.nlu_config, self.catalog.names, self.scene_host.refs(), text
        )
        if match.intent == self.nlu_config.fallback_intent_name:
            return ChatResult(HELP_REPLY, self.scene_host.version, True)
        intent = self.nlu_config.intent(match.intent)
        if not intent.fulfillment:
            reply = nlu_mod.render_static_response(intent, match)
            return ChatResult(reply, self.scene_host.version, True)
        self._request_counter += 1
        request = FulfillmentRequest(
            response_id=f"r-{self._request_counter:06d}",
            query_text=text,
            intent_name=match.intent,
            parameters=match.params,
            session=f"s-{self._request_counter:06d}",
        )
        response, ok = self._dispatch_locked(request)
        return ChatResult(response.fulfillment_text, self.scene_host.version, ok)

    # -- webhook ------------------------------------------------------------

    def webhook(self, request: FulfillmentRequest, timeout: float | None = None) -> FulfillmentResponse:
        """Serve an external fulfillment request.  With a timeout, raise
        MailboxTimeout instead of waiting forever on a busy mailbox."""
        acquired = self._mailbox.acquire(timeout=-1 if timeout is None else timeout)
        if not acquired:
            raise MailboxTimeout(f"mailbox busy for more than {timeout} s")
        try:
            response, _ = self._dispatch_locked(request)
            return response
        finally:
            self._mailbox.release()

    def _dispatch_locked(self, request: FulfillmentRequest) -> tuple[FulfillmentResponse, bool]:
        # parameters sorted by name so the belief text is one canonical form
        # no matter which phrasing produced the match
        belief = RequestBelief(
            source="undefined",
            session_id=request.session,
            intent_name=request.intent_name,
            params=tuple(sorted(request.parameters.items())),
        )
        replies: list[str] = []
        ok = agent_mod.handle_request(
            self.agent_state, belief, self.scene_client, replies.append
        )
        assert len(replies) == 1
        return FulfillmentResponse(replies[0]), ok

    # -- state --------------------------------------------------------------

    def scene_state(self) -> dict:
        return self.scene_host.snapshot()

    @property
    def scene_version(self) -> int:
        return self.scene_host.version
