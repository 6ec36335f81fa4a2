"""Ground belief terms with a canonical textual form.

Grammar:

    belief := functor | functor '(' term (',' term)* ')'
    term   := atom | string | list | param
    param  := 'param' '(' string ',' string ')'
    list   := '[' (term (',' term)*)? ']'

Atoms are lowercase-initial identifiers; strings are double-quoted with
backslash escapes.  Rendering is canonical (no whitespace), so the rendered
text of a belief doubles as its identity in a belief base, and
``parse_belief(render_belief(b)) == b`` for every belief.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class BeliefParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class ListTerm:
    items: tuple["Term", ...] = ()


@dataclass(frozen=True)
class Param:
    name: str
    value: str


Term = Union[Atom, Str, ListTerm, Param]


@dataclass(frozen=True)
class Belief:
    functor: str
    args: tuple[Term, ...] = ()


_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*")


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_term(term: Term) -> str:
    if isinstance(term, Atom):
        return term.name
    if isinstance(term, Str):
        return _quote(term.value)
    if isinstance(term, ListTerm):
        return "[" + ",".join(render_term(t) for t in term.items) + "]"
    if isinstance(term, Param):
        return f"param({_quote(term.name)},{_quote(term.value)})"
    raise TypeError(f"not a term: {term!r}")


def render_belief(belief: Belief) -> str:
    if not belief.args:
        return belief.functor
    return belief.functor + "(" + ",".join(render_term(t) for t in belief.args) + ")"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> BeliefParseError:
        return BeliefParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected '{ch}'")
        self.pos += 1

    def parse_identifier(self) -> str:
        m = _ATOM_RE.match(self.text, self.pos)
        if m is None:
            raise self.error("expected an identifier")
        self.pos = m.end()
        return m.group(0)

    def parse_string(self) -> str:
        self.expect('"')
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                if self.pos >= len(self.text):
                    raise self.error("unterminated escape")
                out.append(self.text[self.pos])
                self.pos += 1
            else:
                out.append(ch)

    def parse_term(self) -> Term:
        self.skip_ws()
        ch = self.peek()
        if ch == '"':
            return Str(self.parse_string())
        if ch == "[":
            self.pos += 1
            items: list[Term] = []
            self.skip_ws()
            if self.peek() == "]":
                self.pos += 1
                return ListTerm(())
            while True:
                items.append(self.parse_term())
                self.skip_ws()
                if self.peek() == ",":
                    self.pos += 1
                    continue
                self.expect("]")
                return ListTerm(tuple(items))
        if ch.islower():
            name = self.parse_identifier()
            if name == "param" and self.peek() == "(":
                self.pos += 1
                self.skip_ws()
                pname = self.parse_string()
                self.skip_ws()
                self.expect(",")
                self.skip_ws()
                pvalue = self.parse_string()
                self.skip_ws()
                self.expect(")")
                return Param(pname, pvalue)
            return Atom(name)
        raise self.error("expected a term")

    def parse_belief(self) -> Belief:
        self.skip_ws()
        functor = self.parse_identifier()
        if self.peek() != "(":
            self.skip_ws()
            if self.pos != len(self.text):
                raise self.error("trailing input")
            return Belief(functor)
        self.pos += 1
        args: list[Term] = [self.parse_term()]
        while True:
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                args.append(self.parse_term())
                continue
            self.expect(")")
            break
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")
        return Belief(functor, tuple(args))


def parse_belief(text: str) -> Belief:
    parsed = _Parser(text).parse_belief()
    # A top-level param(...) reads as a plain two-string belief.
    if isinstance(parsed, Param):
        return Belief("param", (Str(parsed.name), Str(parsed.value)))
    return parsed


NONE_TERM = Atom("none")


@dataclass(frozen=True)
class RequestBelief:
    """The belief shape a fulfillment-routed chat command arrives as.

    The trailing ``extra`` slot is reserved; it is the atom ``none`` unless a
    caller supplies something else.
    """

    source: str
    session_id: str
    intent_name: str
    params: tuple[tuple[str, str], ...]
    extra: Term = NONE_TERM

    def __post_init__(self):
        names = [name for name, _ in self.params]
        if len(names) != len(set(names)):
            raise ValueError("request param names must be unique")

    def param(self, name: str) -> str | None:
        for pname, pvalue in self.params:
            if pname == name:
                return pvalue
        return None

    def to_belief(self) -> Belief:
        return Belief("request", (
            Str(self.source),
            Str(self.session_id),
            Str(self.intent_name),
            ListTerm(tuple(Param(n, v) for n, v in self.params)),
            self.extra,
        ))

    @classmethod
    def from_belief(cls, belief: Belief) -> "RequestBelief | None":
        """Back-convert; None when the belief is not request-shaped."""
        if belief.functor != "request" or len(belief.args) != 5:
            return None
        source, session_id, intent_name, params, extra = belief.args
        if not all(isinstance(t, Str) for t in (source, session_id, intent_name)):
            return None
        if not isinstance(params, ListTerm):
            return None
        if not all(isinstance(p, Param) for p in params.items):
            return None
        pairs = tuple((p.name, p.value) for p in params.items)
        try:
            return cls(source.value, session_id.value, intent_name.value, pairs, extra)
        except ValueError:
            return None
