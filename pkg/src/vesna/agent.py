"""Belief-driven plan kernel.

Asserting a belief queues a belief-addition event; each reasoning step pops
one event, picks the first plan (in library order) whose trigger unifies with
the belief and whose guard holds, and runs the plan body.  Body actions go
through an effects sink that owns the scene client and the reply channel, so
the kernel itself stays transport-agnostic.

A plan failure mid-body (a rejected placement, an unreachable scene service)
skips the remaining actions and emits one error reply instead, which keeps
the one-reply-per-request contract.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Protocol

from .beliefs import (
    Atom,
    Belief,
    ListTerm,
    Param,
    RequestBelief,
    Str,
    Term,
    _Parser,
    render_belief,
    render_term,
)
from .scene import SceneError


class PlanConfigError(Exception):
    """A plan document failed validation."""


class SceneClient(Protocol):
    """What a plan body needs from the scene side; local and HTTP
    implementations raise SceneError subclasses on failure."""

    def add(self, obj_name: str, pos_x: str, pos_y: str) -> str: ...
    def remove(self, ref_name: str) -> str: ...
    def list(self) -> list[str]: ...


# --- trigger patterns -------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


PatternTerm = object  # Term | Var


@dataclass(frozen=True)
class TriggerPattern:
    functor: str
    args: tuple[PatternTerm, ...]


_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")


class _PatternParser(_Parser):
    """The belief term parser extended with uppercase-initial variables."""

    def parse_term(self):
        self.skip_ws()
        m = _VAR_RE.match(self.text, self.pos)
        if m is not None:
            self.pos = m.end()
            return Var(m.group(0))
        return super().parse_term()


def parse_trigger(text: str) -> TriggerPattern:
    parsed = _PatternParser(text).parse_belief()
    if isinstance(parsed, Param):
        raise PlanConfigError("a trigger must be a belief pattern, not a bare param")
    return TriggerPattern(parsed.functor, tuple(parsed.args))


def _unify_term(pattern, ground: Term, bindings: dict[str, Term]) -> bool:
    if isinstance(pattern, Var):
        if pattern.name in bindings:
            return bindings[pattern.name] == ground
        bindings[pattern.name] = ground
        return True
    if isinstance(pattern, ListTerm):
        if not isinstance(ground, ListTerm) or len(pattern.items) != len(ground.items):
            return False
        return all(
            _unify_term(p, g, bindings)
            for p, g in zip(pattern.items, ground.items)
        )
    return pattern == ground


def unify(pattern: TriggerPattern, belief: Belief) -> dict[str, Term] | None:
    if pattern.functor != belief.functor or len(pattern.args) != len(belief.args):
        return None
    bindings: dict[str, Term] = {}
    for p, g in zip(pattern.args, belief.args):
        if not _unify_term(p, g, bindings):
            return None
    return bindings


# --- guards and actions -----------------------------------------------------

@dataclass(frozen=True)
class ParamBind:
    """Bind a variable to a named parameter of the triggering request."""

    param: str
    var: str


@dataclass(frozen=True)
class OneOf:
    """Require a bound variable's string value to be in a fixed set."""

    var: str
    values: tuple[str, ...]


GuardCond = ParamBind | OneOf


@dataclass(frozen=True)
class SceneAdd:
    object_var: str
    pos_x_var: str
    pos_y_var: str
    into: str | None = None


@dataclass(frozen=True)
class SceneRemove:
    ref_var: str
    into: str | None = None


@dataclass(frozen=True)
class SceneList:
    into: str | None = None


@dataclass(frozen=True)
class Reply:
    template: str


Action = SceneAdd | SceneRemove | SceneList | Reply


@dataclass(frozen=True)
class Plan:
    name: str
    trigger: TriggerPattern
    guard: tuple[GuardCond, ...]
    body: tuple[Action, ...]


@dataclass
class AgentState:
    plan_library: list[Plan]
    belief_base: dict[str, Belief] = field(default_factory=dict)
    event_queue: deque = field(default_factory=deque)


class Effects:
    """Sink for plan-body actions: scene calls plus the reply channel.

    Replies are tagged ok/error so callers can tell a fulfilled command from
    a failed one without parsing the text.
    """

    def __init__(self, scene: SceneClient, replier: Callable[[str], None]):
        self.scene = scene
        self._replier = replier
        self.reply_count = 0
        self.last_reply_ok = True

    def reply(self, text: str, *, ok: bool = True) -> None:
        self.reply_count += 1
        self.last_reply_ok = ok
        self._replier(text)


def assert_belief(state: AgentState, belief: Belief) -> bool:
    """Add the belief and queue its addition event; a belief already present
    (same canonical rendering) changes nothing and queues nothing."""
    key = render_belief(belief)
    if key in state.belief_base:
        return False
    state.belief_base[key] = belief
    state.event_queue.append(belief)
    return True


def _eval_guard(
    guard: tuple[GuardCond, ...], bindings: dict[str, Term], event: Belief
) -> bool:
    for cond in guard:
        if isinstance(cond, ParamBind):
            req = RequestBelief.from_belief(event)
            if req is None:
                return False
            value = req.param(cond.param)
            if value is None:
                return False
            term = Str(value)
            if cond.var in bindings and bindings[cond.var] != term:
                return False
            bindings[cond.var] = term
        else:
            term = bindings.get(cond.var)
            if not isinstance(term, Str) or term.value not in cond.values:
                return False
    return True


def select_plan(state: AgentState, event: Belief) -> tuple[Plan, dict[str, Term]] | None:
    """First plan in library order whose trigger unifies and guard holds."""
    for plan in state.plan_library:
        bindings = unify(plan.trigger, event)
        if bindings is None:
            continue
        if _eval_guard(plan.guard, bindings, event):
            return plan, bindings
    return None


def _string_value(bindings: dict[str, Term], var: str) -> str:
    term = bindings[var]
    if isinstance(term, Str):
        return term.value
    if isinstance(term, Atom):
        return term.name
    return render_term(term)


_TEMPLATE_VAR_RE = re.compile(r"\{([A-Z_][A-Za-z0-9_]*)\}")


def _render_reply(template: str, bindings: dict[str, Term]) -> str:
    return _TEMPLATE_VAR_RE.sub(
        lambda m: _string_value(bindings, m.group(1)), template
    )


def _format_listing(refs: list[str]) -> str:
    return ", ".join(f'"{r}"' for r in refs) if refs else "nothing"


def _run_action(action: Action, bindings: dict[str, Term], effects: Effects) -> None:
    if isinstance(action, SceneAdd):
        ref = effects.scene.add(
            _string_value(bindings, action.object_var),
            _string_value(bindings, action.pos_x_var),
            _string_value(bindings, action.pos_y_var),
        )
        if action.into:
            bindings[action.into] = Str(ref)
    elif isinstance(action, SceneRemove):
        ref = effects.scene.remove(_string_value(bindings, action.ref_var))
        if action.into:
            bindings[action.into] = Str(ref)
    elif isinstance(action, SceneList):
        refs = effects.scene.list()
        if action.into:
            bindings[action.into] = Str(_format_listing(refs))
    else:
        effects.reply(_render_reply(action.template, bindings))


def step(state: AgentState, effects: Effects) -> None:
    """Process one queued event; a quiet no-op when the queue is empty."""
    if not state.event_queue:
        return
    event = state.event_queue.popleft()
    selected = select_plan(state, event)
    if selected is None:
        req = RequestBelief.from_belief(event)
        if req is not None:
            effects.reply(f"I don't know how to handle {req.intent_name}", ok=False)
        return
    plan, bindings = selected
    for action in plan.body:
        try:
            _run_action(action, bindings, effects)
        except SceneError as err:
            effects.reply(f"Sorry, I could not do that: {err.message}", ok=False)
            return


def handle_request(
    state: AgentState,
    request: RequestBelief,
    scene_client: SceneClient,
    replier: Callable[[str], None],
) -> bool:
    """Assert the request belief and run one step; exactly one reply lands in
    the replier.  Returns True when the request was fulfilled cleanly."""
    effects = Effects(scene_client, replier)
    if not assert_belief(state, request.to_belief()):
        effects.reply("I already handled that request.", ok=False)
        return False
    step(state, effects)
    assert effects.reply_count == 1
    return effects.last_reply_ok


# --- plan documents ---------------------------------------------------------

def _check_var_name(name, where: str) -> str:
    if not isinstance(name, str) or not _VAR_RE.fullmatch(name):
        raise PlanConfigError(f"{where}: {name!r} is not a variable name")
    return name


def _parse_guard_cond(doc: dict, plan_name: str) -> GuardCond:
    if not isinstance(doc, dict):
        raise PlanConfigError(f'plan "{plan_name}": guard entries must be objects')
    keys = set(doc)
    where = f'plan "{plan_name}" guard'
    if keys == {"param", "var"}:
        return ParamBind(doc["param"], _check_var_name(doc["var"], where))
    if keys == {"one_of", "var"}:
        values = doc["one_of"]
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise PlanConfigError(f"{where}: one_of must be a list of strings")
        return OneOf(_check_var_name(doc["var"], where), tuple(values))
    raise PlanConfigError(f"{where}: unrecognized condition {sorted(keys)}")


def _parse_action(doc: dict, plan_name: str, bound: set[str]) -> Action:
    where = f'plan "{plan_name}" body'
    if not isinstance(doc, dict) or "do" not in doc:
        raise PlanConfigError(f"{where}: every action needs a \"do\" field")

    def need_bound_var(key: str) -> str:
        name = _check_var_name(doc.get(key), where)
        if name not in bound:
            raise PlanConfigError(f"{where}: variable {name} is not bound yet")
        return name

    def into_var() -> str | None:
        if "into" not in doc:
            return None
        name = _check_var_name(doc["into"], where)
        bound.add(name)
        return name

    kind = doc["do"]
    if kind == "scene_add":
        if set(doc) - {"do", "object", "pos_x", "pos_y", "into"}:
            raise PlanConfigError(f"{where}: unexpected fields in scene_add")
        return SceneAdd(
            need_bound_var("object"), need_bound_var("pos_x"), need_bound_var("pos_y"),
            into_var(),
        )
    if kind == "scene_remove":
        if set(doc) - {"do", "ref", "into"}:
            raise PlanConfigError(f"{where}: unexpected fields in scene_remove")
        return SceneRemove(need_bound_var("ref"), into_var())
    if kind == "scene_list":
        if set(doc) - {"do", "into"}:
            raise PlanConfigError(f"{where}: unexpected fields in scene_list")
        return SceneList(into_var())
    if kind == "reply":
        if set(doc) - {"do", "template"}:
            raise PlanConfigError(f"{where}: unexpected fields in reply")
        template = doc.get("template")
        if not isinstance(template, str):
            raise PlanConfigError(f"{where}: reply needs a string template")
        for var in _TEMPLATE_VAR_RE.findall(template):
            if var not in bound:
                raise PlanConfigError(f"{where}: template uses unbound variable {var}")
        return Reply(template)
    raise PlanConfigError(f"{where}: unknown action {kind!r}")


def _parse_plan(doc: dict) -> Plan:
    if not isinstance(doc, dict):
        raise PlanConfigError("each plan must be an object")
    unknown = set(doc) - {"name", "trigger", "guard", "body"}
    if unknown:
        raise PlanConfigError(f"plan: unknown field(s) {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise PlanConfigError("every plan needs a non-empty name")
    try:
        trigger = parse_trigger(doc["trigger"])
    except (KeyError, TypeError):
        raise PlanConfigError(f'plan "{name}": missing or non-string trigger') from None
    except Exception as err:
        raise PlanConfigError(f'plan "{name}": bad trigger: {err}') from None

    bound = {p.name for p in trigger.args if isinstance(p, Var)}
    guard = []
    for cdoc in doc.get("guard", []):
        cond = _parse_guard_cond(cdoc, name)
        if isinstance(cond, ParamBind):
            bound.add(cond.var)
        elif cond.var not in bound:
            raise PlanConfigError(f'plan "{name}": one_of tests unbound variable {cond.var}')
        guard.append(cond)

    body_docs = doc.get("body")
    if not isinstance(body_docs, list) or not body_docs:
        raise PlanConfigError(f'plan "{name}": body must be a non-empty list')
    body = [_parse_action(adoc, name, bound) for adoc in body_docs]
    replies = [a for a in body if isinstance(a, Reply)]
    if len(replies) != 1 or not isinstance(body[-1], Reply):
        raise PlanConfigError(
            f'plan "{name}": the body must end with its single reply action'
        )
    return Plan(name, trigger, tuple(guard), tuple(body))


def plans_from_document(document: dict) -> list[Plan]:
    if not isinstance(document, dict):
        raise PlanConfigError("plan document must be an object")
    unknown = set(document) - {"schema_version", "plans"}
    if unknown:
        raise PlanConfigError(f"plan document: unknown field(s) {sorted(unknown)}")
    if document.get("schema_version") != 1:
        raise PlanConfigError(
            f"unsupported schema_version {document.get('schema_version')!r}"
        )
    plans_doc = document.get("plans")
    if not isinstance(plans_doc, list) or not plans_doc:
        raise PlanConfigError("plans must be a non-empty list")
    plans = [_parse_plan(p) for p in plans_doc]
    names = [p.name for p in plans]
    if len(names) != len(set(names)):
        raise PlanConfigError("plan names must be unique")
    return plans


def default_plan_library() -> list[Plan]:
    """The built-in library: global add, relative add, remove, list."""
    import json
    from pathlib import Path

    doc = json.loads((Path(__file__).parent / "data" / "plans.json").read_text())
    return plans_from_document(doc)
