"""Actual causation over simulated traces.

A set of event occurrences directly causes a formula when it achieves, cell
by cell, some minimal set of literals backing the formula: each cell is the
last-moment batch of backing literals not yet holding, the cell's events are
a minimal choice from what fired there whose update makes the batch true,
and every batch then persists to the query time. But-for reasoning fails on
overdetermined outcomes; this construction does not, because each backing is
examined separately and a sufficient set is never excused by the presence of
another.

Direct causes chain backwards: a cell's events were themselves triggered,
and what they needed from the state when they fired is again a formula with
causes. Expanding a cell replaces it by the causes of that formula, one step
earlier, until an expansion bottoms out at no requirement at all. Cause sets
collect every keep-or-expand combination; the expansion edges record the
derivation graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (
    Atom,
    Formula,
    Literal,
    NessCauseError,
    Occurrence,
    TOP,
    conj,
    conj_literals,
    evaluate,
    is_coherent,
    minimal_backings,
    sorted_literals,
)
from .dsl import Context, EventDecl, Scenario
from .simulator import (
    IncoherentEffects,
    Trace,
    actual_effects,
    build_trace,
    update,
)


class NotOccurred(NessCauseError):
    """The queried occurrence is not part of the trace."""

    def __init__(self, occurrence: Occurrence):
        super().__init__(f"{occurrence} does not occur in this trace")
        self.occurrence = occurrence


class NotScheduled(NessCauseError):
    """But-for removal needs a scheduled action, not a derived event."""

    def __init__(self, occurrence: Occurrence):
        super().__init__(f"{occurrence} is not scheduled in the scenario")
        self.occurrence = occurrence


class NoWitness(NessCauseError):
    """No partial state lets these events do the required work."""


class RecursionDepthExceeded(NessCauseError):
    """Cause expansion went deeper than the allowed bound."""


class CausalSetting:
    """A domain, a scenario, and the trace they determine."""

    def __init__(self, context: Context, scenario: Scenario, trace: Optional[Trace] = None):
        self.context = context
        self.scenario = scenario
        self.trace = trace if trace is not None else build_trace(context, scenario)

    def state_at(self, t: int) -> FrozenSet[Literal]:
        return self.trace.state_at(t)

    def events_at(self, t: int) -> FrozenSet[EventDecl]:
        return self.trace.events_at(t)


@dataclass(frozen=True)
class DirectRelation:
    """One way a set of occurrences directly causes ``formula`` at ``at``.

    ``partition`` lists the cells latest first; ``causes`` is exactly the
    union of the per-cell event choices.
    """

    formula: Formula
    at: int
    backing: FrozenSet[Literal]
    partition: Tuple[Tuple[int, FrozenSet[Literal]], ...]
    causes: FrozenSet[Occurrence]

    def cell_events(self, t: int) -> FrozenSet[Occurrence]:
        return frozenset(o for o in self.causes if o.time == t)


@dataclass(frozen=True)
class CauseSet:
    """A complete cause set plus which backings of the target it serves."""

    occurrences: FrozenSet[Occurrence]
    actions: FrozenSet[Occurrence]
    backings: FrozenSet[FrozenSet[Literal]]

    @property
    def decisional(self) -> bool:
        return bool(self.occurrences) and self.actions == self.occurrences


@dataclass(frozen=True)
class ExpansionEdge:
    """``source`` entered a cause set by expanding away ``target`` via a formula."""

    source: Occurrence
    target: Occurrence
    via: Formula


@dataclass(frozen=True)
class CausalReport:
    """Everything the analysis found for one formula at one time."""

    formula: Formula
    at: int
    direct: Tuple[DirectRelation, ...]
    cause_sets: Tuple[CauseSet, ...]
    expansions: Tuple[ExpansionEdge, ...]

    def union_of_causes(self) -> FrozenSet[Occurrence]:
        out: FrozenSet[Occurrence] = frozenset()
        for cs in self.cause_sets:
            out |= cs.occurrences
        return out

    def decisional_causes(self) -> FrozenSet[Occurrence]:
        out: FrozenSet[Occurrence] = frozenset()
        for cs in self.cause_sets:
            out |= cs.actions
        return out

    def direct_causes(self) -> FrozenSet[Occurrence]:
        out: FrozenSet[Occurrence] = frozenset()
        for rel in self.direct:
            out |= rel.causes
        return out


# --- direct causes ---------------------------------------------------------


def _achievement_time(trace: Trace, literal: Literal, at: int) -> int:
    """Last time in [-1, at-1] where the literal does not yet hold.

    Persistency pins the cell time: the literal must hold from just after its
    cell through the query time, so the only candidate is the final moment it
    was still absent.
    """
    for t in range(at - 1, -2, -1):
        if literal not in trace.state_at(t):
            return t
    raise AssertionError("unreachable: nothing holds at t=-1")


def _minimal_covers(
    events: Sequence[EventDecl],
    state: FrozenSet[Literal],
    goal: FrozenSet[Literal],
) -> List[FrozenSet[EventDecl]]:
    """All minimal event subsets whose active effects cover ``goal``.

    Effects activate against the shared pre-update state, so contributions
    are per-event and coverage is monotone; minimal therefore means that
    dropping any single member loses some goal literal.
    """
    contrib = {
        e: actual_effects([e], state) & goal
        for e in events
    }
    useful = [e for e in events if contrib[e]]
    out: List[FrozenSet[EventDecl]] = []
    for r in range(len(useful) + 1):
        for combo in combinations(useful, r):
            covered: FrozenSet[Literal] = frozenset()
            for e in combo:
                covered |= contrib[e]
            if goal <= covered and not any(o < frozenset(combo) for o in out):
                out.append(frozenset(combo))
    return [c for c in out if not any(o < c for o in out)]


def direct_ness_causes(
    setting: CausalSetting, formula: Formula, at: int
) -> Tuple[DirectRelation, ...]:
    """Every direct causal relation for ``formula`` at time ``at``.

    One relation per backing and per choice of minimal per-cell event sets;
    a backing with any unachievable cell yields nothing. Backings must hold
    at ``at``; empty backings (the formula is trivially true) yield nothing,
    there being no work anything could have done.
    """
    if at < -1:
        raise ValueError(f"no state exists at t={at}")
    trace = setting.trace
    target_state = trace.state_at(at)
    relations: List[DirectRelation] = []
    for backing in sorted(minimal_backings(formula), key=lambda b: sorted(b)):
        if not backing or not backing <= target_state:
            continue
        cells: Dict[int, Set[Literal]] = {}
        for literal in backing:
            cells.setdefault(_achievement_time(trace, literal, at), set()).add(literal)
        per_cell_choices: List[List[Tuple[int, FrozenSet[Literal], FrozenSet[EventDecl]]]] = []
        feasible = True
        for t in sorted(cells, reverse=True):
            goal = frozenset(cells[t])
            fired = sorted(trace.events_at(t), key=lambda e: e.name)
            covers = _minimal_covers(fired, trace.state_at(t), goal)
            if not covers:
                feasible = False
                break
            per_cell_choices.append([(t, goal, c) for c in covers])
        if not feasible:
            continue
        for choice in product(*per_cell_choices):
            causes = frozenset(
                Occurrence(e.name, t) for t, _, es in choice for e in es
            )
            partition = tuple((t, goal) for t, goal, _ in choice)
            relations.append(
                DirectRelation(
                    formula=formula,
                    at=at,
                    backing=backing,
                    partition=partition,
                    causes=causes,
                )
            )
    return tuple(relations)


# --- the work a set of events does ------------------------------------------


def _relevant_fluents(
    events: Iterable[EventDecl],
    extra: Iterable[Literal],
) -> FrozenSet:
    fluents = set()
    for e in events:
        for item in e.eff:
            fluents.add(item.literal.fluent)
            for l in item.condition.literals():
                fluents.add(l.fluent)
    for l in extra:
        fluents.add(l.fluent)
    return frozenset(fluents)


def _achieves(
    base: FrozenSet[Literal],
    events: FrozenSet[EventDecl],
    required: FrozenSet[Literal],
) -> bool:
    try:
        return required <= update(base, events)
    except IncoherentEffects:
        return False


def _monotone(
    base: FrozenSet[Literal],
    events: FrozenSet[EventDecl],
    required: FrozenSet[Literal],
    free_fluents: Sequence,
) -> bool:
    """Does every coherent extension of ``base`` still let ``events`` achieve?

    Only fluents that feed an effect condition, an effect target, or the
    requirement can interfere, so the extensions range over those alone.
    """
    options = [
        (None, Literal(f, True), Literal(f, False)) for f in free_fluents
    ]
    for picks in product(*options):
        extension = base | frozenset(p for p in picks if p is not None)
        if not _achieves(extension, events, required):
            return False
    return True


def after_witnesses(
    context: Context,
    state: FrozenSet[Literal],
    events: FrozenSet[EventDecl],
    produced: FrozenSet[Literal],
    maintained: FrozenSet[Literal] = frozenset(),
) -> Tuple[FrozenSet[Literal], ...]:
    """All minimal parts of ``state`` on which ``events`` do exactly this work.

    A witness W, taken together with the maintained literals, must make the
    update of the firing events satisfy produced plus maintained; every
    proper subset of the events must fail at that; every coherent superset
    of W plus maintained must still succeed; and W must actually hold in the
    given state. Sorted smallest first, ties by literal text.
    """
    required = produced | maintained
    if not is_coherent(required):
        raise NoWitness("the produced and maintained literals contradict")
    relevant = _relevant_fluents(events, required | maintained)
    pool = sorted_literals(l for l in state if l.fluent in relevant)
    found: List[FrozenSet[Literal]] = []
    for r in range(len(pool) + 1):
        for combo in combinations(pool, r):
            witness = frozenset(combo)
            if any(prior <= witness for prior in found):
                continue
            base = witness | maintained
            if not is_coherent(base):
                continue
            if not _achieves(base, events, required):
                continue
            if any(
                _achieves(base, frozenset(sub), required)
                for n in range(len(events))
                for sub in combinations(sorted(events, key=lambda e: e.name), n)
            ):
                continue
            free = sorted(
                (f for f in relevant if not any(l.fluent == f for l in base)),
                key=lambda f: f.name,
            )
            if not _monotone(base, events, required, free):
                continue
            found.append(witness)
    if not found:
        raise NoWitness(
            f"no part of the state lets {{{', '.join(sorted(e.name for e in events))}}}"
            " do this work"
        )
    return tuple(
        sorted(found, key=lambda w: (len(w), [str(l) for l in sorted_literals(w)]))
    )


def after(
    setting: CausalSetting,
    events: Iterable[EventDecl],
    produced: Iterable[Literal],
    maintained: Iterable[Literal] = (),
    at: int = 0,
) -> Formula:
    """The weakest condition under which ``events`` did this work at ``at``.

    The conjunction of the canonical minimal witness; ``true`` when the
    events needed nothing from the state, as with unconditional effects.
    Where several minimal witnesses exist this picks the least by size then
    by literal text; recursion inside the cause analysis considers them all.
    """
    witness = after_witnesses(
        setting.context,
        setting.state_at(at),
        frozenset(events),
        frozenset(produced),
        frozenset(maintained),
    )[0]
    return conj_literals(witness)


# --- recursive causes --------------------------------------------------------


@dataclass
class _Expansion:
    memo: Dict[Tuple[str, int], FrozenSet[FrozenSet[Occurrence]]] = field(
        default_factory=dict
    )
    edges: Set[ExpansionEdge] = field(default_factory=set)


def _cell_requirements(
    setting: CausalSetting,
    relation: DirectRelation,
    cell_time: int,
    cell_goal: FrozenSet[Literal],
) -> Tuple[Formula, ...]:
    """The formulas whose earlier truth let this cell fire and do its work.

    The conjunction of the cell events' triggers with what the events needed
    from the state, where the needed part ranges over every minimal witness.
    Earlier cells count as maintained: they already held here and had to
    survive the firing.
    """
    occs = relation.cell_events(cell_time)
    decls = frozenset(setting.context.event(o.event) for o in occs)
    state = setting.state_at(cell_time)
    produced = cell_goal & actual_effects(decls, state, cell_time)
    maintained = frozenset(cell_goal - produced)
    for t, goal in relation.partition:
        if t < cell_time:
            maintained |= goal
    triggers = [d.tri for d in sorted(decls, key=lambda d: d.name)]
    try:
        witnesses = after_witnesses(
            setting.context, state, decls, produced, maintained
        )
    except NoWitness:
        return ()
    formulas: List[Formula] = []
    seen: Set[str] = set()
    for witness in witnesses:
        f = conj(triggers + [Atom(l) for l in sorted_literals(witness)])
        if str(f) not in seen:
            seen.add(str(f))
            formulas.append(f)
    return tuple(formulas)


def _expand(
    setting: CausalSetting,
    formula: Formula,
    at: int,
    ctx: _Expansion,
    depth: int,
    max_depth: int,
) -> Tuple[Tuple[DirectRelation, ...], Dict[FrozenSet[Occurrence], Set[FrozenSet[Literal]]]]:
    key = (str(formula), at)
    relations = direct_ness_causes(setting, formula, at)
    sets: Dict[FrozenSet[Occurrence], Set[FrozenSet[Literal]]] = {}
    if depth > max_depth:
        raise RecursionDepthExceeded(
            f"cause expansion for {formula} at t={at} exceeded depth {max_depth}"
        )
    for rel in relations:
        cell_options: List[List[FrozenSet[Occurrence]]] = []
        for cell_time, cell_goal in rel.partition:
            kept = rel.cell_events(cell_time)
            options: List[FrozenSet[Occurrence]] = [kept]
            if cell_time >= 0:
                for requirement in _cell_requirements(
                    setting, rel, cell_time, cell_goal
                ):
                    if requirement == TOP:
                        continue
                    child_sets = _node(
                        setting, requirement, cell_time, ctx, depth + 1, max_depth
                    )
                    for cs in child_sets:
                        if cs not in options:
                            options.append(cs)
                        for source in cs:
                            for target in kept:
                                ctx.edges.add(
                                    ExpansionEdge(source, target, requirement)
                                )
            cell_options.append(options)
        for choice in product(*cell_options):
            occs: FrozenSet[Occurrence] = frozenset()
            for part in choice:
                occs |= part
            sets.setdefault(occs, set()).add(rel.backing)
    ctx.memo[key] = frozenset(sets)
    return relations, sets


def _node(
    setting: CausalSetting,
    formula: Formula,
    at: int,
    ctx: _Expansion,
    depth: int,
    max_depth: int,
) -> FrozenSet[FrozenSet[Occurrence]]:
    key = (str(formula), at)
    if key in ctx.memo:
        return ctx.memo[key]
    _, sets = _expand(setting, formula, at, ctx, depth, max_depth)
    return frozenset(sets)


def _is_action_occurrence(context: Context, occ: Occurrence) -> bool:
    return (
        occ.time >= 0
        and context.has_event(occ.event)
        and context.event(occ.event).is_action()
    )


def ness_causes(
    setting: CausalSetting,
    formula: Formula,
    at: int,
    max_depth: Optional[int] = None,
) -> CausalReport:
    """Direct relations, all keep-or-expand cause sets, and the derivation graph."""
    if max_depth is None:
        max_depth = setting.context.horizon + 2
    ctx = _Expansion()
    relations, sets = _expand(setting, formula, at, ctx, 0, max_depth)
    cause_sets = []
    for occs in sorted(sets, key=lambda s: sorted(str(o) for o in s)):
        actions = frozenset(
            o for o in occs if _is_action_occurrence(setting.context, o)
        )
        cause_sets.append(
            CauseSet(
                occurrences=occs,
                actions=actions,
                backings=frozenset(sets[occs]),
            )
        )
    edges = tuple(
        sorted(ctx.edges, key=lambda e: (str(e.source), str(e.target), str(e.via)))
    )
    return CausalReport(
        formula=formula,
        at=at,
        direct=relations,
        cause_sets=tuple(cause_sets),
        expansions=edges,
    )


def actual_causes(
    setting: CausalSetting,
    occurrence: Occurrence,
    max_depth: Optional[int] = None,
) -> CausalReport:
    """Causes of an event's occurrence: why its trigger held when it fired."""
    if not setting.trace.occurred(occurrence):
        raise NotOccurred(occurrence)
    if occurrence.time == -1:
        return CausalReport(TOP, -1, (), (), ())
    decl = setting.context.event(occurrence.event)
    return ness_causes(setting, decl.tri, occurrence.time, max_depth)


# --- but-for -----------------------------------------------------------------


@dataclass(frozen=True)
class ButForResult:
    """What removing one scheduled action does to the formula.

    Truthiness is the plain counterfactual verdict: the formula fails at the
    query time once the action is gone. The ``is_cause_*`` properties fold in
    the factual side, so an action is never called a cause of something that
    never happened.
    """

    occurrence: Occurrence
    formula: Formula
    at: int
    factual_holds: bool
    counterfactual_holds_at: bool
    counterfactual_holds_ever: bool
    counterfactual: Trace

    def __bool__(self) -> bool:
        return not self.counterfactual_holds_at

    @property
    def refuted_at(self) -> bool:
        return not self.counterfactual_holds_at

    @property
    def refuted_ever(self) -> bool:
        return not self.counterfactual_holds_ever

    @property
    def is_cause_at(self) -> bool:
        return self.factual_holds and not self.counterfactual_holds_at

    @property
    def is_cause_any_time(self) -> bool:
        return self.factual_holds and not self.counterfactual_holds_ever


def but_for(
    setting: CausalSetting,
    occurrence: Occurrence,
    formula: Formula,
    at: int,
) -> ButForResult:
    """Re-run the scenario without one action and see whether the formula survives.

    The counterfactual is judged both at the original query time and over
    the whole run; overdetermination shows up as the formula surviving the
    removal either way.
    """
    if occurrence not in setting.scenario.occurrences:
        raise NotScheduled(occurrence)
    reduced = setting.scenario.without(occurrence)
    counterfactual = build_trace(setting.context, reduced)
    factual = evaluate(setting.state_at(at), formula)
    holds_at = evaluate(counterfactual.state_at(at), formula)
    holds_ever = any(evaluate(s, formula) for s in counterfactual.states)
    return ButForResult(
        occurrence=occurrence,
        formula=formula,
        at=at,
        factual_holds=factual,
        counterfactual_holds_at=holds_at,
        counterfactual_holds_ever=holds_ever,
        counterfactual=counterfactual,
    )
