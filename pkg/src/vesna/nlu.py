"""Deterministic natural-language understanding.

Utterances are matched against per-intent phrase templates.  A template mixes
anchor words with typed slots, e.g.::

    add a {objName:object} in {posY:row} on the {posX:column}

Anchors are matched left to right (extra words in between are ignored); the
score of a template is the fraction of its anchors found.  Slots bind to the
leftmost occurrence of a value from their entity kind's domain, preferring
longer token spans at the same start ("Yaskawa MA2010" beats "Yaskawa").
Every slot must bind or the template does not match at all.  Matching is case
insensitive; bound values are reported in their domain casing (catalog names
as listed in the catalog, free text as typed).
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field

ENTITY_KINDS = (
    "catalog-name",
    "grid-column-token",
    "grid-row-token",
    "relative-relation-token",
    "reference-name",
    "free-text",
)

FIXED_DOMAINS = {
    "grid-column-token": ("left", "center", "right"),
    "grid-row-token": ("front", "center", "back"),
    "relative-relation-token": ("left of", "right of", "behind", "in front of"),
}

_SLOT_RE = re.compile(r"^\{([A-Za-z][A-Za-z0-9_]*):([A-Za-z][A-Za-z0-9_-]*)\}$")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


class NluConfigError(Exception):
    """A config document violated the schema or an invariant."""


class ResponseRenderError(Exception):
    """A static response referenced a parameter with no bound value."""


def normalize(utterance: str) -> list[str]:
    """Lowercased, punctuation-stripped, whitespace-split tokens."""
    return [t for t in (tok.translate(_PUNCT_TABLE).lower() for tok in utterance.split()) if t]


def _tokenize_cased(utterance: str) -> list[str]:
    """Same splitting as normalize() but with the original casing kept."""
    return [t for t in (tok.translate(_PUNCT_TABLE) for tok in utterance.split()) if t]


@dataclass(frozen=True)
class EntityKind:
    name: str
    value_domain: str  # one of ENTITY_KINDS


@dataclass(frozen=True)
class Slot:
    param: str
    entity: str  # declared EntityKind name


@dataclass(frozen=True)
class Phrase:
    """A parsed training phrase: anchors and slots in source order."""

    text: str
    elements: tuple[object, ...]  # str anchors and Slot instances

    @property
    def slots(self) -> tuple[Slot, ...]:
        return tuple(e for e in self.elements if isinstance(e, Slot))

    @property
    def anchor_count(self) -> int:
        return sum(1 for e in self.elements if isinstance(e, str))


@dataclass(frozen=True)
class IntentDef:
    name: str
    training_phrases: tuple[Phrase, ...]
    fulfillment: bool
    static_response: str | None = None


@dataclass(frozen=True)
class IntentMatch:
    intent: str
    params: dict[str, str]
    confidence: float
    matched_phrase: int  # -1 for the fallback match


@dataclass(frozen=True)
class NluConfig:
    intents: tuple[IntentDef, ...]
    entities: tuple[EntityKind, ...]
    fallback_intent_name: str
    confidence_threshold: float
    kind_by_entity: dict[str, str] = field(default_factory=dict)

    def intent(self, name: str) -> IntentDef:
        for intent in self.intents:
            if intent.name == name:
                return intent
        raise KeyError(name)


_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z][A-Za-z0-9_]*)\}")


def _parse_phrase(text: str, intent_name: str, kind_by_entity: dict[str, str]) -> Phrase:
    elements: list[object] = []
    seen_params: set[str] = set()
    for raw in text.split():
        m = _SLOT_RE.match(raw)
        if m:
            param, entity = m.group(1), m.group(2)
            if entity not in kind_by_entity:
                raise NluConfigError(
                    f'intent "{intent_name}": slot references undeclared entity "{entity}"'
                )
            if param in seen_params:
                raise NluConfigError(
                    f'intent "{intent_name}": duplicate slot "{param}" in one phrase'
                )
            seen_params.add(param)
            elements.append(Slot(param, entity))
        else:
            anchor_tokens = normalize(raw)
            if len(anchor_tokens) != 1:
                raise NluConfigError(
                    f'intent "{intent_name}": anchor word "{raw}" does not survive '
                    "normalization as a single token"
                )
            elements.append(anchor_tokens[0])
    if not elements:
        raise NluConfigError(f'intent "{intent_name}": empty training phrase')
    return Phrase(text, tuple(elements))


def _require_keys(doc: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(doc, dict):
        raise NluConfigError(f"{where}: expected an object")
    unknown = set(doc) - allowed
    if unknown:
        raise NluConfigError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise NluConfigError(f"{where}: missing field(s) {sorted(missing)}")


def load_nlu_config(document: dict) -> NluConfig:
    """Validate a parsed config document and build an NluConfig.

    Raises NluConfigError naming the offending intent or entity.
    """
    _require_keys(
        document,
        {"schema_version", "confidence_threshold", "fallback_intent_name", "entities", "intents"},
        {"schema_version", "confidence_threshold", "fallback_intent_name", "entities", "intents"},
        "nlu config",
    )
    if document["schema_version"] != 1:
        raise NluConfigError(f"unsupported schema_version {document['schema_version']!r}")
    threshold = document["confidence_threshold"]
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or not 0 <= threshold <= 1:
        raise NluConfigError("confidence_threshold must be a number in [0, 1]")
    fallback = document["fallback_intent_name"]
    if not isinstance(fallback, str) or not fallback:
        raise NluConfigError("fallback_intent_name must be a non-empty string")

    entities: list[EntityKind] = []
    kind_by_entity: dict[str, str] = {}
    if not isinstance(document["entities"], list):
        raise NluConfigError("entities must be a list")
    for edoc in document["entities"]:
        _require_keys(edoc, {"name", "value_domain"}, {"name", "value_domain"}, "entity")
        name, kind = edoc["name"], edoc["value_domain"]
        if not isinstance(name, str) or not name:
            raise NluConfigError("entity name must be a non-empty string")
        if kind not in ENTITY_KINDS:
            raise NluConfigError(f'entity "{name}": unknown value_domain "{kind}"')
        if name in kind_by_entity:
            raise NluConfigError(f'duplicate entity "{name}"')
        kind_by_entity[name] = kind
        entities.append(EntityKind(name, kind))

    if not isinstance(document["intents"], list) or not document["intents"]:
        raise NluConfigError("intents must be a non-empty list")
    intents: list[IntentDef] = []
    names: set[str] = set()
    for idoc in document["intents"]:
        _require_keys(
            idoc,
            {"name", "fulfillment", "training_phrases", "static_response"},
            {"name", "fulfillment", "training_phrases"},
            "intent",
        )
        name = idoc["name"]
        if not isinstance(name, str) or not name:
            raise NluConfigError("intent name must be a non-empty string")
        if name in names:
            raise NluConfigError(f'duplicate intent "{name}"')
        names.add(name)
        fulfillment = idoc["fulfillment"]
        if not isinstance(fulfillment, bool):
            raise NluConfigError(f'intent "{name}": fulfillment must be a boolean')
        static_response = idoc.get("static_response")
        if fulfillment and static_response is not None:
            raise NluConfigError(
                f'intent "{name}": a fulfillment intent cannot carry a static_response'
            )
        if not fulfillment and not isinstance(static_response, str):
            raise NluConfigError(
                f'intent "{name}": a non-fulfillment intent needs a static_response'
            )
        raw_phrases = idoc["training_phrases"]
        if not isinstance(raw_phrases, list) or not raw_phrases:
            raise NluConfigError(f'intent "{name}": training_phrases must be a non-empty list')
        if not all(isinstance(p, str) for p in raw_phrases):
            raise NluConfigError(f'intent "{name}": training phrases must be strings')
        phrases = tuple(_parse_phrase(p, name, kind_by_entity) for p in raw_phrases)
        if static_response is not None:
            wanted = set(_PLACEHOLDER_RE.findall(static_response))
            for phrase in phrases:
                slot_names = {s.param for s in phrase.slots}
                if not wanted <= slot_names:
                    raise NluConfigError(
                        f'intent "{name}": static_response parameter(s) '
                        f"{sorted(wanted - slot_names)} missing from phrase \"{phrase.text}\""
                    )
        intents.append(IntentDef(name, phrases, fulfillment, static_response))

    if fallback in names:
        raise NluConfigError(f'fallback intent "{fallback}" must not be a configured intent')
    return NluConfig(tuple(intents), tuple(entities), fallback, float(threshold), kind_by_entity)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _find_binding(tokens, cursor, domain_values):
    """Leftmost occurrence of any domain value in tokens[cursor:], longer
    token spans winning at the same start.  Returns (start, end, value)."""
    best = None
    for value in sorted(domain_values):
        vtokens = normalize(value)
        if not vtokens:
            continue
        for start in range(cursor, len(tokens) - len(vtokens) + 1):
            if tokens[start:start + len(vtokens)] == vtokens:
                key = (start, -len(vtokens), value)
                if best is None or key < best:
                    best = key
                break
    if best is None:
        return None
    start, neg_len, value = best
    return start, start - neg_len, value


def _match_phrase(phrase, tokens, cased_tokens, domains):
    """Try one template; returns (score, params) or None when a slot fails."""
    cursor = 0
    matched_anchors = 0
    params: dict[str, str] = {}
    elements = phrase.elements
    for i, element in enumerate(elements):
        if isinstance(element, str):
            try:
                idx = tokens.index(element, cursor)
            except ValueError:
                continue
            matched_anchors += 1
            cursor = idx + 1
        elif domains[element.entity] is None:  # free text
            stop = len(tokens)
            for later in elements[i + 1:]:
                if isinstance(later, str):
                    try:
                        stop = tokens.index(later, cursor + 1)
                    except ValueError:
                        stop = len(tokens)
                    break
            if stop <= cursor:
                return None
            params[element.param] = " ".join(cased_tokens[cursor:stop])
            cursor = stop
        else:
            found = _find_binding(tokens, cursor, domains[element.entity])
            if found is None:
                return None
            start, end, value = found
            params[element.param] = value
            cursor = end
    total = phrase.anchor_count
    score = matched_anchors / total if total else 1.0
    return score, params


def classify(
    config: NluConfig,
    catalog_names: set[str],
    scene_refs: set[str],
    utterance: str,
) -> IntentMatch:
    """Best template match across all intents, or the fallback match.

    Pure function of its arguments: ties break to the earliest intent in
    config order, then the earliest phrase, and domain scans are sorted, so
    repeated calls agree exactly.
    """
    tokens = normalize(utterance)
    cased_tokens = _tokenize_cased(utterance)
    domains: dict[str, object] = {}
    for entity in config.entities:
        if entity.value_domain == "catalog-name":
            domains[entity.name] = catalog_names
        elif entity.value_domain == "reference-name":
            domains[entity.name] = scene_refs
        elif entity.value_domain == "free-text":
            domains[entity.name] = None
        else:
            domains[entity.name] = FIXED_DOMAINS[entity.value_domain]

    best: tuple[float, int, int, dict[str, str]] | None = None
    for intent_idx, intent in enumerate(config.intents):
        for phrase_idx, phrase in enumerate(intent.training_phrases):
            result = _match_phrase(phrase, tokens, cased_tokens, domains)
            if result is None:
                continue
            score, params = result
            if best is None or score > best[0]:
                best = (score, intent_idx, phrase_idx, params)

    if best is None or best[0] < config.confidence_threshold:
        return IntentMatch(config.fallback_intent_name, {}, 0.0, -1)
    score, intent_idx, phrase_idx, params = best
    return IntentMatch(config.intents[intent_idx].name, params, score, phrase_idx)


def render_static_response(intent: IntentDef, match: IntentMatch) -> str:
    """Fill the intent's fixed response template from the match parameters."""
    if intent.static_response is None:
        raise ResponseRenderError(f'intent "{intent.name}" has no static response')

    def substitute(m: re.Match) -> str:
        name = m.group(1)
        if name not in match.params:
            raise ResponseRenderError(
                f'no value for placeholder "{name}" in intent "{intent.name}"'
            )
        return match.params[name]

    return _PLACEHOLDER_RE.sub(substitute, intent.static_response)
