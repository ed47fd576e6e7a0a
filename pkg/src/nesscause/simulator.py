"""Deterministic concurrent simulation of domains.

A trace interleaves states and event sets: the actions scheduled for time t
fire together with every exogenous event whose trigger holds, the state is
updated once with their combined active effects, and the run continues until
the horizon, stopping early only when nothing is scheduled and nothing
triggers. Priorities cancel lower-priority events but only an exogenous
event may be cancelled away without complaint; losing a scheduled action is
a scenario conflict.

Time -1 is the empty pseudo-state. Its event set holds one initialisation
pseudo-event per initial literal, so the first real state is itself the
outcome of an update.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (
    ConditionalEffect,
    EffectFormula,
    Literal,
    NessCauseError,
    Occurrence,
    complement,
    complement_set,
    evaluate,
    is_coherent,
)
from .dsl import Context, EventDecl, EventKind, INI_PREFIX, Scenario


class SimulationError(NessCauseError):
    """Base for everything that can go wrong while building a trace."""


class IncoherentEffects(SimulationError):
    """Two concurrently firing events assert complementary literals."""

    def __init__(self, literal: Literal, producers: FrozenSet[str], time: int):
        names = ", ".join(sorted(producers))
        super().__init__(
            f"at t={time}, {literal} and {complement(literal)} are both"
            f" produced (by {names})"
        )
        self.literal = literal
        self.producers = producers
        self.time = time


class ScenarioActionConflict(SimulationError):
    """Scheduled actions interfere with each other and priorities cannot help."""

    def __init__(self, message: str, time: int):
        super().__init__(message)
        self.time = time


class UnresolvedInterference(SimulationError):
    """Triggered events clash and the priority relation settles nothing."""

    def __init__(self, message: str, time: int):
        super().__init__(message)
        self.time = time


class PreconditionViolated(SimulationError):
    """A scheduled action's precondition fails in the state it fires from."""

    def __init__(self, action: str, time: int):
        super().__init__(f"precondition of {action} fails at t={time}")
        self.action = action
        self.time = time


def actual_effects(
    events: Iterable[EventDecl], state: FrozenSet[Literal], time: int = 0
) -> FrozenSet[Literal]:
    """Literals that firing ``events`` in ``state`` actually changes.

    An effect item [c] l contributes l when the state satisfies c and l does
    not already hold; re-asserting what holds is a no-op, never a change.
    Complementary contributions are an error, reported with their producers.
    """
    produced: Dict[Literal, Set[str]] = {}
    for e in events:
        for item in e.eff:
            if evaluate(state, item.condition) and item.literal not in state:
                produced.setdefault(item.literal, set()).add(e.name)
    for l, producers in produced.items():
        if complement(l) in produced:
            raise IncoherentEffects(
                l, frozenset(producers | produced[complement(l)]), time
            )
    return frozenset(produced)


def update(
    state: FrozenSet[Literal], events: Iterable[EventDecl], time: int = 0
) -> FrozenSet[Literal]:
    """Successor state: active effects override, untouched literals persist."""
    changed = actual_effects(events, state, time)
    return (state - complement_set(changed)) | changed


def _ini_event(literal: Literal) -> EventDecl:
    name = INI_PREFIX + ("" if literal.positive else "!") + literal.fluent.name
    from .core import TOP

    return EventDecl(
        name=name,
        kind=EventKind.EXOGENOUS,
        pre=TOP,
        tri=TOP,
        eff=EffectFormula([ConditionalEffect(TOP, literal)]),
    )


def triggered_events(
    state: FrozenSet[Literal],
    ctx: Context,
    scheduled: FrozenSet[EventDecl] = frozenset(),
    time: int = 0,
) -> FrozenSet[EventDecl]:
    """The exogenous events that fire at ``time`` alongside ``scheduled``.

    Candidates are the exogenous events whose trigger holds. A candidate may
    stay out only when something firing dominates it, and whatever fires must
    be free of internal priority conflicts. The transitive, acyclic priority
    relation makes the answer unique when one exists; no answer at all means
    the domain under-specifies this state and we refuse to guess.
    """
    candidates = sorted(
        (e for e in ctx.exogenous() if evaluate(state, e.tri)),
        key=lambda e: e.name,
    )
    solutions: List[FrozenSet[EventDecl]] = []
    for r in range(len(candidates), -1, -1):
        for chosen in combinations(candidates, r):
            fired = set(chosen) | set(scheduled)
            names = {e.name for e in fired}
            if any(
                ctx.dominates(a, b) for a in names for b in names if a != b
            ):
                continue
            excluded = [e for e in candidates if e not in chosen]
            if all(
                any(ctx.dominates(w, e.name) for w in names) for e in excluded
            ):
                solutions.append(frozenset(chosen))
        if solutions:
            break
    if not solutions:
        raise UnresolvedInterference(
            "no set of triggered events respects the priorities at"
            f" t={time} (candidates: {', '.join(e.name for e in candidates)})",
            time,
        )
    if len(solutions) > 1:
        raise UnresolvedInterference(
            f"priorities leave {len(solutions)} ways to resolve the triggered"
            f" events at t={time}",
            time,
        )
    return solutions[0]


@dataclass(frozen=True)
class Trace:
    """A finished run: states[i] is the state at time i, events[i] fires at i.

    ``states`` has one more entry than ``events``. Accessors clamp: past the
    end the final state persists and nothing further occurs, and time -1
    yields the empty pseudo-state with the initialisation pseudo-events.
    """

    context: Context
    scenario: Scenario
    states: Tuple[FrozenSet[Literal], ...]
    events: Tuple[FrozenSet[EventDecl], ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.events) + 1:
            raise ValueError("trace shape: need one more state than event sets")

    @property
    def length(self) -> int:
        return len(self.events)

    def state_at(self, t: int) -> FrozenSet[Literal]:
        if t < -1:
            raise IndexError(f"no state at t={t}")
        if t == -1:
            return frozenset()
        return self.states[min(t, len(self.states) - 1)]

    def events_at(self, t: int) -> FrozenSet[EventDecl]:
        if t < -1:
            raise IndexError(f"no events at t={t}")
        if t == -1:
            return frozenset(_ini_event(l) for l in self.states[0])
        if t >= len(self.events):
            return frozenset()
        return self.events[t]

    def occurred(self, occ: Occurrence) -> bool:
        return any(e.name == occ.event for e in self.events_at(occ.time))

    def holds_at(self, formula, t: int) -> bool:
        return evaluate(self.state_at(t), formula)


def build_trace(ctx: Context, scenario: Scenario) -> Trace:
    """Run the scenario to the horizon (or to quiescence) and return the trace."""
    states = [ctx.initial_state]
    events: List[FrozenSet[EventDecl]] = []
    for t in range(ctx.horizon + 1):
        state = states[-1]
        scheduled_names = scenario.actions_at(t)
        scheduled = frozenset(ctx.event(n) for n in scheduled_names)
        for e in sorted(scheduled, key=lambda e: e.name):
            if not evaluate(state, e.pre):
                raise PreconditionViolated(e.name, t)
        pair_conflicts = [
            (a, b)
            for a in sorted(scheduled_names)
            for b in sorted(scheduled_names)
            if a != b and ctx.dominates(a, b)
        ]
        if pair_conflicts:
            a, b = pair_conflicts[0]
            raise ScenarioActionConflict(
                f"scheduled actions conflict at t={t}: {a} > {b}", t
            )
        triggered = triggered_events(state, ctx, scheduled, t)
        fired = scheduled | triggered
        pending = any(o.time > t for o in scenario.occurrences)
        if not fired and not pending:
            break
        try:
            next_state = update(state, fired, t)
        except IncoherentEffects as exc:
            if exc.producers <= scheduled_names:
                raise ScenarioActionConflict(str(exc), t) from exc
            raise UnresolvedInterference(str(exc), t) from exc
        events.append(fired)
        states.append(next_state)
    return Trace(ctx, scenario, tuple(states), tuple(events))


@dataclass(frozen=True)
class ValidityReport:
    """Clause-by-clause verdict on a candidate trace."""

    executable: bool
    concurrent_correct: bool
    trigger_correct: bool
    problems: Tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return self.executable and self.concurrent_correct and self.trigger_correct


def validate_sequence(
    ctx: Context,
    states: Sequence[FrozenSet[Literal]],
    events: Sequence[FrozenSet[EventDecl]],
) -> ValidityReport:
    """Check an arbitrary state/event sequence against the domain's rules.

    Executable: every firing event's precondition holds when it fires and the
    combined effects cohere. Concurrent-correct: each state transition equals
    the update by the events below it, and no two events in one step stand in
    the priority relation. Trigger-correct: an exogenous event fires exactly
    when its trigger holds, unless a firing event dominates it.
    """
    problems: List[str] = []
    executable = True
    concurrent = True
    trigger = True
    if len(states) != len(events) + 1:
        return ValidityReport(False, False, False, ("shape mismatch",))
    for t, fired in enumerate(events):
        state = states[t]
        for e in sorted(fired, key=lambda e: e.name):
            if not evaluate(state, e.pre):
                executable = False
                problems.append(f"pre of {e.name} fails at t={t}")
        try:
            next_state = update(state, fired, t)
        except IncoherentEffects as exc:
            executable = False
            concurrent = False
            problems.append(str(exc))
            continue
        if states[t + 1] != next_state:
            concurrent = False
            problems.append(f"state at t={t + 1} is not the update at t={t}")
        names = {e.name for e in fired}
        for a in sorted(names):
            for b in sorted(names):
                if a != b and ctx.dominates(a, b):
                    concurrent = False
                    problems.append(
                        f"{a} and {b} fire together at t={t} despite {a} > {b}"
                    )
        for e in sorted(ctx.exogenous(), key=lambda e: e.name):
            fires = e.name in names
            holds = evaluate(state, e.tri)
            dominated = any(ctx.dominates(w, e.name) for w in names if w != e.name)
            if fires and not holds:
                trigger = False
                problems.append(f"{e.name} fires at t={t} without its trigger")
            if holds and not fires and not dominated:
                trigger = False
                problems.append(f"{e.name} should fire at t={t} and does not")
    return ValidityReport(executable, concurrent, trigger, tuple(problems))
