"""Domain and scenario text formats, plus JSON and DOT serialization.

The concrete grammar is line-oriented and diffable::

    # lake pollution, two factories
    domain pollution {
      fluents: d, polluted, treatment_broken;
      init: treatment_broken;
      horizon: 4;
      action prod_s { pre: true; eff: spk_waste; }
      event discharge { tri: spk_waste; eff: polluted; }
      priority: discharge > prod_s;
    }

Fluents missing from ``init`` default to false; ``init-strict`` demands every
fluent be listed. Formulas use ``&``, ``|``, ``!`` (literals only), ``true``
and parentheses. Effect items are ``lit`` or ``[condition] lit``. Scenario
files hold ``time: action, action;`` lines. ``#`` starts a comment in both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .core import (
    And,
    Atom,
    ConditionalEffect,
    EffectFormula,
    Fluent,
    Formula,
    Literal,
    NessCauseError,
    Occurrence,
    Or,
    TOP,
    Top,
    format_literals,
    is_coherent,
    sorted_literals,
)

INI_PREFIX = "ini_"


class DslSyntaxError(NessCauseError):
    """Malformed domain or scenario text; carries line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class DslSemanticError(NessCauseError):
    """Well-formed text describing an inconsistent domain or scenario."""


class EventKind(Enum):
    ACTION = "action"
    EXOGENOUS = "event"


@dataclass(frozen=True)
class EventDecl:
    """A declared event: its kind, precondition, trigger, and effects.

    For exogenous events the trigger and the precondition are one and the
    same. For actions the trigger defaults to the precondition; the declared
    formula never fires the action by itself because volition is not part of
    any state (the simulator only auto-fires exogenous events).
    """

    name: str
    kind: EventKind
    pre: Formula
    tri: Formula
    eff: EffectFormula

    def is_action(self) -> bool:
        return self.kind is EventKind.ACTION


@dataclass(frozen=True)
class Context:
    """A domain declaration: fluents, events, initial state, priorities, horizon."""

    name: str
    fluents: FrozenSet[Fluent]
    events: FrozenSet[EventDecl]
    initial_state: FrozenSet[Literal]
    priority: FrozenSet[Tuple[str, str]] = frozenset()
    horizon: int = 0

    def __post_init__(self) -> None:
        names = [e.name for e in self.events]
        if len(names) != len(set(names)):
            raise DslSemanticError("duplicate event name")
        if not self.fluents:
            raise DslSemanticError("a domain needs at least one fluent")
        if self.horizon < 0:
            raise DslSemanticError("horizon must be >= 0")
        if not is_coherent(self.initial_state):
            raise DslSemanticError("initial state is incoherent")
        if {l.fluent for l in self.initial_state} != set(self.fluents):
            raise DslSemanticError("initial state does not assign every fluent")
        object.__setattr__(self, "priority", _closed_priority(self.priority, set(names)))

    def event(self, name: str) -> EventDecl:
        for e in self.events:
            if e.name == name:
                return e
        raise KeyError(name)

    def has_event(self, name: str) -> bool:
        return any(e.name == name for e in self.events)

    def actions(self) -> FrozenSet[EventDecl]:
        return frozenset(e for e in self.events if e.is_action())

    def exogenous(self) -> FrozenSet[EventDecl]:
        return frozenset(e for e in self.events if not e.is_action())

    def dominates(self, higher: str, lower: str) -> bool:
        return (higher, lower) in self.priority


def _closed_priority(
    pairs: Iterable[Tuple[str, str]], names: set
) -> FrozenSet[Tuple[str, str]]:
    """Validate and transitively close the priority relation."""
    closed = set(pairs)
    for a, b in closed:
        if a not in names or b not in names:
            raise DslSemanticError(f"priority names unknown event: {a} > {b}")
    changed = True
    while changed:
        changed = False
        for a, b in list(closed):
            for c, d in list(closed):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
    for a, b in closed:
        if a == b:
            raise DslSemanticError(f"priority cycle through {a}")
    return frozenset(closed)


@dataclass(frozen=True)
class Scenario:
    """The timed agent actions given as input; exogenous events are derived."""

    occurrences: FrozenSet[Occurrence] = frozenset()

    def actions_at(self, t: int) -> FrozenSet[str]:
        return frozenset(o.event for o in self.occurrences if o.time == t)

    def times(self) -> Tuple[int, ...]:
        return tuple(sorted({o.time for o in self.occurrences}))

    def without(self, occurrence: Occurrence) -> "Scenario":
        return Scenario(self.occurrences - {occurrence})


def check_scenario(scenario: Scenario, ctx: Context) -> None:
    """Raise DslSemanticError unless every occurrence is a schedulable action."""
    for o in scenario.occurrences:
        if not ctx.has_event(o.event):
            raise DslSemanticError(f"unknown action in scenario: {o.event}")
        if not ctx.event(o.event).is_action():
            raise DslSemanticError(
                f"{o.event} is exogenous; it triggers itself and cannot be scheduled"
            )
        if not 0 <= o.time <= ctx.horizon:
            raise DslSemanticError(
                f"time {o.time} for {o.event} outside 0..{ctx.horizon}"
            )


# --- tokenizer -------------------------------------------------------------

_PUNCT = ("{", "}", "(", ")", "[", "]", ":", ";", ",", ">", "&", "|", "!")


@dataclass
class _Token:
    kind: str  # "name" | "int" | punctuation | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _PUNCT:
            tokens.append(_Token(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            tokens.append(_Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def _fail(self, expected: str) -> None:
        got = self.cur.text or "end of input"
        raise DslSyntaxError(
            f"expected {expected}, found {got!r}", self.cur.line, self.cur.column
        )

    def eat(self, kind: str, expected: Optional[str] = None) -> _Token:
        if self.cur.kind != kind:
            self._fail(expected or repr(kind))
        tok = self.cur
        self.pos += 1
        return tok

    def eat_keyword(self, word: str) -> _Token:
        if self.cur.kind != "name" or self.cur.text != word:
            self._fail(repr(word))
        return self.eat("name")

    def peek_keyword(self, word: str) -> bool:
        return self.cur.kind == "name" and self.cur.text == word

    def name(self, what: str) -> str:
        tok = self.eat("name", what)
        if "-" in tok.text:
            raise DslSyntaxError(
                f"{what} may not contain '-': {tok.text!r}", tok.line, tok.column
            )
        return tok.text

    def integer(self, what: str) -> int:
        return int(self.eat("int", what).text)

    # -- formulas --

    def formula(self) -> Formula:
        f = self._term()
        while self.cur.kind == "|":
            self.eat("|")
            f = Or(f, self._term())
        return f

    def _term(self) -> Formula:
        f = self._factor()
        while self.cur.kind == "&":
            self.eat("&")
            f = And(f, self._factor())
        return f

    def _factor(self) -> Formula:
        if self.cur.kind == "(":
            self.eat("(")
            f = self.formula()
            self.eat(")")
            return f
        if self.cur.kind == "!":
            bang = self.eat("!")
            if self.cur.kind == "(":
                raise DslSyntaxError(
                    "'!' applies to fluent names only, not to subformulas",
                    bang.line,
                    bang.column,
                )
            return Atom(Literal(Fluent(self.name("fluent name")), False))
        if self.peek_keyword("true"):
            self.eat("name")
            return TOP
        if self.cur.kind == "name":
            return Atom(Literal(Fluent(self.name("fluent name"))))
        self._fail("a formula")
        raise AssertionError("unreachable")

    def literal(self) -> Literal:
        if self.cur.kind == "!":
            self.eat("!")
            return Literal(Fluent(self.name("fluent name")), False)
        return Literal(Fluent(self.name("fluent name")))


# --- domain parsing --------------------------------------------------------


def parse_domain(text: str) -> Context:
    """Parse domain text into a validated Context."""
    p = _Parser(text)
    p.eat_keyword("domain")
    name = p.name("domain name")
    p.eat("{")

    fluents: List[str] = []
    init_literals: List[Literal] = []
    init_strict = False
    init_seen = False
    horizon: Optional[int] = None
    decls: List[_RawEvent] = []
    priority_pairs: List[Tuple[str, str]] = []

    while p.cur.kind != "}":
        if p.peek_keyword("fluents"):
            p.eat("name")
            p.eat(":")
            fluents.append(p.name("fluent name"))
            while p.cur.kind == ",":
                p.eat(",")
                fluents.append(p.name("fluent name"))
            p.eat(";")
        elif p.peek_keyword("init") or p.peek_keyword("init-strict"):
            init_strict = p.cur.text == "init-strict"
            init_seen = True
            p.eat("name")
            p.eat(":")
            while p.cur.kind != ";":
                if init_literals:
                    p.eat(",")
                init_literals.append(p.literal())
            p.eat(";")
        elif p.peek_keyword("horizon"):
            p.eat("name")
            p.eat(":")
            horizon = p.integer("horizon")
            p.eat(";")
        elif p.peek_keyword("action") or p.peek_keyword("event"):
            decls.append(_parse_event_block(p))
        elif p.peek_keyword("priority"):
            p.eat("name")
            p.eat(":")
            hi = p.name("event name")
            p.eat(">")
            lo = p.name("event name")
            p.eat(";")
            priority_pairs.append((hi, lo))
        else:
            p._fail("'fluents', 'init', 'horizon', 'action', 'event' or 'priority'")
    p.eat("}")
    p.eat("eof", "end of input")

    if not fluents:
        raise DslSemanticError(f"domain {name}: no fluents declared")
    if len(fluents) != len(set(fluents)):
        raise DslSemanticError(f"domain {name}: duplicate fluent")
    if horizon is None:
        raise DslSemanticError(f"domain {name}: horizon is mandatory")
    if not init_seen:
        raise DslSemanticError(f"domain {name}: init section is mandatory")

    universe = {f: Fluent(f) for f in fluents}
    initial = _resolve_init(name, init_literals, universe, init_strict)
    events = frozenset(_resolve_event(d, universe) for d in decls)
    return Context(
        name=name,
        fluents=frozenset(universe.values()),
        events=events,
        initial_state=initial,
        priority=frozenset(priority_pairs),
        horizon=horizon,
    )


@dataclass
class _RawEvent:
    name: str
    kind: EventKind
    pre: Optional[Formula]
    tri: Optional[Formula]
    eff: List[ConditionalEffect] = field(default_factory=list)


def _parse_event_block(p: _Parser) -> _RawEvent:
    kind = EventKind.ACTION if p.cur.text == "action" else EventKind.EXOGENOUS
    p.eat("name")
    tok = p.cur
    name = p.name("event name")
    if name.startswith(INI_PREFIX):
        raise DslSyntaxError(
            f"event names starting with {INI_PREFIX!r} are reserved",
            tok.line,
            tok.column,
        )
    p.eat("{")
    pre: Optional[Formula] = None
    tri: Optional[Formula] = None
    eff: List[ConditionalEffect] = []
    while p.cur.kind != "}":
        if p.peek_keyword("pre"):
            p.eat("name")
            p.eat(":")
            if pre is not None:
                raise DslSemanticError(f"{name}: duplicate pre")
            pre = p.formula()
            p.eat(";")
        elif p.peek_keyword("tri"):
            p.eat("name")
            p.eat(":")
            if tri is not None:
                raise DslSemanticError(f"{name}: duplicate tri")
            tri = p.formula()
            p.eat(";")
        elif p.peek_keyword("eff"):
            p.eat("name")
            p.eat(":")
            eff.append(_parse_effect_item(p))
            while p.cur.kind == ",":
                p.eat(",")
                eff.append(_parse_effect_item(p))
            p.eat(";")
        else:
            p._fail("'pre', 'tri' or 'eff'")
    p.eat("}")
    return _RawEvent(name, kind, pre, tri, eff)


def _parse_effect_item(p: _Parser) -> ConditionalEffect:
    condition: Formula = TOP
    if p.cur.kind == "[":
        p.eat("[")
        condition = p.formula()
        p.eat("]")
    return ConditionalEffect(condition, p.literal())


def _resolve_init(
    name: str,
    literals: List[Literal],
    universe: Dict[str, Fluent],
    strict: bool,
) -> FrozenSet[Literal]:
    seen: Dict[str, Literal] = {}
    for l in literals:
        if l.fluent.name not in universe:
            raise DslSemanticError(f"domain {name}: init names unknown fluent {l.fluent}")
        if l.fluent.name in seen:
            raise DslSemanticError(f"domain {name}: init lists {l.fluent} twice")
        seen[l.fluent.name] = l
    if strict and set(seen) != set(universe):
        missing = ", ".join(sorted(set(universe) - set(seen)))
        raise DslSemanticError(f"domain {name}: init-strict leaves unset: {missing}")
    complete = set(seen.values())
    for fname, fluent in universe.items():
        if fname not in seen:
            complete.add(Literal(fluent, False))
    return frozenset(complete)


def _resolve_event(raw: _RawEvent, universe: Dict[str, Fluent]) -> EventDecl:
    def check_formula(f: Formula, what: str) -> Formula:
        for l in f.literals():
            if l.fluent.name not in universe:
                raise DslSemanticError(f"{raw.name}: {what} names unknown fluent {l.fluent}")
        return f

    if raw.kind is EventKind.EXOGENOUS:
        if raw.pre is not None and raw.tri is not None and raw.pre != raw.tri:
            raise DslSemanticError(
                f"{raw.name}: an exogenous event has tri = pre; give just one"
            )
        tri = raw.tri if raw.tri is not None else raw.pre
        if tri is None:
            raise DslSemanticError(f"{raw.name}: exogenous event needs tri")
        pre = tri
    else:
        pre = raw.pre if raw.pre is not None else TOP
        tri = raw.tri if raw.tri is not None else pre
    if not raw.eff:
        raise DslSemanticError(f"{raw.name}: an event needs at least one effect")
    for item in raw.eff:
        check_formula(item.condition, "effect condition")
        if item.literal.fluent.name not in universe:
            raise DslSemanticError(
                f"{raw.name}: effect names unknown fluent {item.literal.fluent}"
            )
    return EventDecl(
        name=raw.name,
        kind=raw.kind,
        pre=check_formula(pre, "pre"),
        tri=check_formula(tri, "tri"),
        eff=EffectFormula(raw.eff),
    )


def parse_scenario(text: str, ctx: Context) -> Scenario:
    """Parse scenario text (``time: action, action;`` lines) against a context."""
    p = _Parser(text)
    occurrences = set()
    while p.cur.kind != "eof":
        t = p.integer("a time point")
        p.eat(":")
        occurrences.add(Occurrence(p.name("action name"), t))
        while p.cur.kind == ",":
            p.eat(",")
            occurrences.add(Occurrence(p.name("action name"), t))
        p.eat(";")
    scenario = Scenario(frozenset(occurrences))
    check_scenario(scenario, ctx)
    return scenario


def parse_formula(text: str, ctx: Optional[Context] = None) -> Formula:
    """Parse a bare condition formula, optionally checking fluents against a domain."""
    p = _Parser(text)
    f = p.formula()
    p.eat("eof", "end of formula")
    if ctx is not None:
        known = {fl.name for fl in ctx.fluents}
        for l in f.literals():
            if l.fluent.name not in known:
                raise DslSemanticError(f"formula names unknown fluent {l.fluent}")
    return f


# --- printing --------------------------------------------------------------


def print_formula(f: Formula) -> str:
    return str(f)


def print_domain(ctx: Context) -> str:
    """Canonical domain text; parse_domain(print_domain(ctx)) == ctx."""
    lines = [f"domain {ctx.name} {{"]
    names = sorted(f.name for f in ctx.fluents)
    lines.append(f"  fluents: {', '.join(names)};")
    positive = sorted(l.fluent.name for l in ctx.initial_state if l.positive)
    lines.append(f"  init: {', '.join(positive)};" if positive else "  init: ;")
    lines.append(f"  horizon: {ctx.horizon};")
    for e in sorted(ctx.events, key=lambda e: e.name):
        head = "action" if e.is_action() else "event"
        body = []
        if e.is_action():
            body.append(f"pre: {e.pre};")
            if e.tri != e.pre:
                body.append(f"tri: {e.tri};")
        else:
            body.append(f"tri: {e.tri};")
        body.append(f"eff: {e.eff};")
        lines.append(f"  {head} {e.name} {{ {' '.join(body)} }}")
    for hi, lo in sorted(ctx.priority):
        lines.append(f"  priority: {hi} > {lo};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_scenario(scenario: Scenario) -> str:
    lines = []
    for t in scenario.times():
        names = ", ".join(sorted(scenario.actions_at(t)))
        lines.append(f"{t}: {names};")
    return "\n".join(lines) + ("\n" if lines else "")


# --- serialization ---------------------------------------------------------


def _dump(payload: object) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _occ_payload(o: Occurrence) -> Dict[str, object]:
    return {"event": o.event, "t": o.time}


def _occ_list(occurrences: Iterable[Occurrence]) -> List[Dict[str, object]]:
    return [
        _occ_payload(o)
        for o in sorted(occurrences, key=lambda o: (o.time, o.event))
    ]


def trace_to_json(trace) -> str:
    """Canonical JSON for a trace: states S0.. and event sets for t >= 0."""
    payload = {
        "domain": trace.context.name,
        "horizon": trace.context.horizon,
        "scenario": _occ_list(trace.scenario.occurrences),
        "states": [
            [str(l) for l in sorted_literals(s)] for s in trace.states
        ],
        "events": [sorted(e.name for e in es) for es in trace.events],
    }
    return _dump(payload)


def report_to_json(report) -> str:
    """Canonical JSON for a causal report."""
    payload = {
        "target": {"formula": str(report.formula), "at": report.at},
        "direct": [
            {
                "backing": [str(l) for l in sorted_literals(rel.backing)],
                "causes": _occ_list(rel.causes),
                "partition": [
                    {"t": t, "literals": [str(l) for l in sorted_literals(w)]}
                    for t, w in rel.partition
                ],
            }
            for rel in report.direct
        ],
        "cause_sets": [
            {
                "events": _occ_list(cs.occurrences),
                "decisional": cs.decisional,
                "backings": sorted(
                    format_literals(b) for b in cs.backings
                ),
            }
            for cs in report.cause_sets
        ],
        "decisional": _occ_list(report.decisional_causes()),
        "union": _occ_list(report.union_of_causes()),
        "expansions": [
            {
                "from": _occ_payload(e.source),
                "to": _occ_payload(e.target),
                "via": str(e.via),
            }
            for e in report.expansions
        ],
    }
    payload["direct"].sort(
        key=lambda d: (d["backing"], json.dumps(d["causes"], sort_keys=True))
    )
    payload["cause_sets"].sort(
        key=lambda c: (json.dumps(c["events"], sort_keys=True), c["backings"])
    )
    payload["expansions"].sort(key=lambda e: json.dumps(e, sort_keys=True))
    return _dump(payload)


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def report_to_dot(report) -> str:
    """DOT digraph: occurrences as boxes, the target as an ellipse.

    Dashed edges run from each causing occurrence to the target, labelled by
    the backings it serves; solid edges follow the expansion chain from an
    upstream occurrence to the occurrence it explains, labelled by the
    formula that links them.
    """
    target = f"{report.formula}@{report.at}"
    lines = ["digraph causes {", "  rankdir=LR;"]
    lines.append(f"  {_quote(target)} [shape=ellipse];")
    for occ in sorted(report.union_of_causes()):
        lines.append(f"  {_quote(str(occ))} [shape=box];")
    backing_labels: Dict[str, List[str]] = {}
    for cs in report.cause_sets:
        for occ in cs.occurrences:
            labels = backing_labels.setdefault(str(occ), [])
            for b in cs.backings:
                text = format_literals(b)
                if text not in labels:
                    labels.append(text)
    for occ in sorted(report.union_of_causes()):
        label = " ".join(sorted(backing_labels.get(str(occ), [])))
        lines.append(
            f"  {_quote(str(occ))} -> {_quote(target)} "
            f"[style=dashed, label={_quote(label)}];"
        )
    seen = set()
    for e in report.expansions:
        key = (str(e.source), str(e.target), str(e.via))
        if key in seen:
            continue
        seen.add(key)
        lines.append(
            f"  {_quote(str(e.source))} -> {_quote(str(e.target))} "
            f"[label={_quote(str(e.via))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(value, format: str = "json") -> str:
    """Serialize a Trace or a CausalReport to canonical text."""
    kind = type(value).__name__
    if kind == "Trace":
        if format != "json":
            raise ValueError("traces serialize to json only")
        return trace_to_json(value)
    if kind == "CausalReport":
        if format == "json":
            return report_to_json(value)
        if format == "dot":
            return report_to_dot(value)
        raise ValueError(f"unknown report format: {format}")
    raise TypeError(f"cannot serialize {kind}")
