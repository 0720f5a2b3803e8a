"""Schema knowledge base: an isa tree with role links and prior probabilities.

A schema describes a class of entities (a plan or an object type) and is
read set-theoretically: asserting ``(inst go1 go)`` asserts that ``go1`` is
an element of the ``go`` set.  Schemas nest by subset along ``isa`` links,
which are restricted to a tree, so the immediate children of any parent are
disjoint.  ``(role shopping go-step go)`` declares a slot: whatever fills
``go-step`` of a ``shopping`` instance is a ``go`` instance.

Each schema carries a prior probability (the share of explanations in which
it appears), and the base carries one global equality prior ``p(==)``: the
prior probability that two arbitrary things are the same thing.  Priors
obey the subset structure: a child's prior never exceeds its parent's, and
the immediate children of a parent sum to at most the parent.

Textual format (UTF-8 s-expressions, ``;`` comments, order-insensitive,
forward references allowed)::

    (eq-prior 0.001)
    (schema store- :prior 0.05)
    (schema supermarket :isa store- :prior 0.01)
    (role supermarket-shopping store-of supermarket)

A loaded `KnowledgeBase` is immutable and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .paths import KIND_ORDER, TraversalLink

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


class KbError(Exception):
    """Raised for both syntactic and semantic problems in a KB source.
    Carries the 1-based source ``line`` when one is known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Schema:
    """One schema: its isa parent (if any), prior, and declared slots
    as (slot-name, filler-schema) pairs sorted by slot name."""

    name: str
    parent: str | None
    prior: float
    slots: tuple[tuple[str, str], ...] = ()

    def filler_of(self, slot: str) -> str | None:
        for slot_name, filler in self.slots:
            if slot_name == slot:
                return filler
        return None


@dataclass(frozen=True)
class Observation:
    """An observed instance: a unique identifier, the schema it was observed
    as, and the current belief p(inst | evidence) in (0, 1]."""

    instance: str
    schema: str
    belief: float = 1.0


@dataclass(frozen=True)
class KnowledgeBase:
    schemas: dict[str, Schema]
    eq_prior: float
    adjacency: dict[str, tuple[TraversalLink, ...]] = field(compare=False)

    def schema(self, name: str) -> Schema:
        try:
            return self.schemas[name]
        except KeyError:
            raise KbError(f"unknown schema {name!r}") from None

    def prior(self, name: str) -> float:
        return self.schema(name).prior

    def isa_star(self, a: str, b: str) -> bool:
        """True iff ``b`` is a proper isa ancestor of ``a``."""
        self.schema(b)
        parent = self.schema(a).parent
        while parent is not None:
            if parent == b:
                return True
            parent = self.schemas[parent].parent
        return False

    def neighbors(self, name: str) -> tuple[TraversalLink, ...]:
        """All moves leaving ``name``, sorted by destination schema then
        link kind then slot; every move has its inverse at the far end."""
        self.schema(name)
        return self.adjacency.get(name, ())

    def has_role(self, filled: str, slot: str, filler: str) -> bool:
        schema = self.schemas.get(filled)
        return schema is not None and schema.filler_of(slot) == filler

    def has_isa_edge(self, specific: str, general: str) -> bool:
        schema = self.schemas.get(specific)
        return schema is not None and schema.parent == general

    def ancestors_or_self(self, name: str) -> list[str]:
        chain = [name]
        parent = self.schema(name).parent
        while parent is not None:
            chain.append(parent)
            parent = self.schemas[parent].parent
        return chain

    def declared_slot(self, owner_type: str, slot: str) -> tuple[str, str] | None:
        """Find ``slot`` on ``owner_type`` or the nearest ancestor declaring
        it; returns (declaring schema, filler schema).  Slots are inherited
        downward because a subtype is a subset of its parent."""
        for name in self.ancestors_or_self(owner_type):
            filler = self.schemas[name].filler_of(slot)
            if filler is not None:
                return name, filler
        return None

    def render(self) -> str:
        """Canonical textual form; `load_kb` of it reproduces this base."""
        lines = [f"(eq-prior {self.eq_prior!r})"]
        for name in sorted(self.schemas):
            schema = self.schemas[name]
            isa = f" :isa {schema.parent}" if schema.parent is not None else ""
            lines.append(f"(schema {name}{isa} :prior {schema.prior!r})")
        for name in sorted(self.schemas):
            for slot, filler in self.schemas[name].slots:
                lines.append(f"(role {name} {slot} {filler})")
        return "\n".join(lines) + "\n"


def _tokenize(text: str) -> list[tuple[str, int]]:
    """Tokens with 1-based line numbers; ';' comments run to end of line."""
    tokens = []
    line = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append((ch, line))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            tokens.append((text[i:j], line))
            i = j
    return tokens


def _read_forms(text: str) -> list[tuple[list[str], int]]:
    tokens = _tokenize(text)
    forms = []
    i = 0
    while i < len(tokens):
        tok, line = tokens[i]
        if tok != "(":
            raise KbError(f"expected '(' but found {tok!r}", line)
        items = []
        j = i + 1
        while j < len(tokens) and tokens[j][0] not in "()":
            items.append(tokens[j][0])
            j += 1
        if j >= len(tokens) or tokens[j][0] != ")":
            raise KbError("unterminated form", line)
        if not items:
            raise KbError("empty form", line)
        forms.append((items, line))
        i = j + 1
    return forms


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise KbError(f"bad number {token!r}", line) from None
    return value


def _check_name(token: str, line: int) -> str:
    if not NAME_RE.match(token):
        raise KbError(f"bad name {token!r}", line)
    return token


def load_kb(text: str) -> KnowledgeBase:
    """Parse and validate a KB source; raises `KbError` on the first
    syntactic or semantic problem."""
    raw_schemas: dict[str, tuple[str | None, float, int]] = {}
    raw_roles: list[tuple[str, str, str, int]] = []
    eq_prior: float | None = None

    for items, line in _read_forms(text):
        head = items[0]
        if head == "schema":
            if len(items) not in (4, 6):
                raise KbError("schema form is (schema NAME [:isa NAME] :prior FLOAT)", line)
            name = _check_name(items[1], line)
            rest = items[2:]
            parent = None
            if rest[0] == ":isa":
                parent = _check_name(rest[1], line)
                rest = rest[2:]
            if len(rest) != 2 or rest[0] != ":prior":
                raise KbError("schema form is (schema NAME [:isa NAME] :prior FLOAT)", line)
            prior = _parse_float(rest[1], line)
            if name in raw_schemas:
                raise KbError(f"duplicate schema {name!r}", line)
            if not 0.0 < prior <= 1.0:
                raise KbError(f"prior of {name!r} must be in (0,1], got {prior!r}", line)
            raw_schemas[name] = (parent, prior, line)
        elif head == "role":
            if len(items) != 4:
                raise KbError("role form is (role FILLED SLOT FILLER)", line)
            filled = _check_name(items[1], line)
            slot = _check_name(items[2], line)
            filler = _check_name(items[3], line)
            raw_roles.append((filled, slot, filler, line))
        elif head == "eq-prior":
            if len(items) != 2:
                raise KbError("eq-prior form is (eq-prior FLOAT)", line)
            if eq_prior is not None:
                raise KbError("duplicate eq-prior", line)
            eq_prior = _parse_float(items[1], line)
            if not 0.0 < eq_prior < 1.0:
                raise KbError(f"eq-prior must be in (0,1), got {eq_prior!r}", line)
        else:
            raise KbError(f"unknown form {head!r}", line)

    if eq_prior is None:
        raise KbError("missing eq-prior")

    for name, (parent, _, line) in raw_schemas.items():
        if parent is not None and parent not in raw_schemas:
            raise KbError(f"unknown parent {parent!r} of schema {name!r}", line)

    # isa must be a forest: walk up from each schema looking for a loop.
    for name in raw_schemas:
        seen = {name}
        parent = raw_schemas[name][0]
        while parent is not None:
            if parent in seen:
                raise KbError(f"isa cycle through {name!r}", raw_schemas[name][2])
            seen.add(parent)
            parent = raw_schemas[parent][0]

    for name, (parent, prior, line) in raw_schemas.items():
        if parent is not None and prior > raw_schemas[parent][1]:
            raise KbError(
                f"schema {name!r} has prior {prior!r} above its parent "
                f"{parent!r} ({raw_schemas[parent][1]!r})", line)

    child_sums: dict[str, float] = {}
    for name, (parent, prior, _) in raw_schemas.items():
        if parent is not None:
            child_sums[parent] = child_sums.get(parent, 0.0) + prior
    for parent, total in child_sums.items():
        if total - raw_schemas[parent][1] > 1e-12:
            raise KbError(
                f"children of {parent!r} have priors summing to {total!r}, "
                f"above the parent prior {raw_schemas[parent][1]!r}")

    slot_map: dict[str, dict[str, str]] = {name: {} for name in raw_schemas}
    for filled, slot, filler, line in raw_roles:
        if filled not in raw_schemas:
            raise KbError(f"role on unknown schema {filled!r}", line)
        if filler not in raw_schemas:
            raise KbError(f"unknown filler {filler!r} in role of {filled!r}", line)
        if slot in slot_map[filled]:
            raise KbError(f"duplicate slot {slot!r} on schema {filled!r}", line)
        slot_map[filled][slot] = filler

    schemas = {
        name: Schema(
            name=name,
            parent=parent,
            prior=prior,
            slots=tuple(sorted(slot_map[name].items())),
        )
        for name, (parent, prior, _) in raw_schemas.items()
    }
    return KnowledgeBase(schemas=schemas, eq_prior=eq_prior,
                         adjacency=_build_adjacency(schemas))


def _build_adjacency(schemas: dict[str, Schema]) -> dict[str, tuple[TraversalLink, ...]]:
    moves: dict[str, list[TraversalLink]] = {name: [] for name in schemas}
    for schema in schemas.values():
        if schema.parent is not None:
            moves[schema.name].append(TraversalLink.isa_up(schema.name, schema.parent))
            moves[schema.parent].append(TraversalLink.isa_down(schema.name, schema.parent))
        for slot, filler in schema.slots:
            moves[schema.name].append(TraversalLink.role_down(schema.name, slot, filler))
            moves[filler].append(TraversalLink.role_up(schema.name, slot, filler))

    def key(link: TraversalLink):
        return (link.destination, KIND_ORDER[link.kind], link.slot)

    return {name: tuple(sorted(links, key=key)) for name, links in moves.items()}


def render_kb(kb: KnowledgeBase) -> str:
    return kb.render()
