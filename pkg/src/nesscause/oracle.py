"""Reference checker and random domain generator.

The checker recomputes direct causes the slow way: enumerate every coherent
literal set, keep the minimal ones satisfying the formula, try every
assignment of achievement times, and test each defining clause by direct
state inspection. It shares only the state primitives and the trace with the
fast path, none of its search structure, so agreement between the two is
evidence rather than tautology.

The generator draws small random domains and scenarios for that comparison,
rejecting any draw whose trace fails to build.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

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
    evaluate,
    is_coherent,
)
from .causation import DirectRelation
from .dsl import Context, EventDecl, EventKind, Scenario
from .simulator import SimulationError, Trace, build_trace, update

ORACLE_MAX_FLUENTS = 6
ORACLE_MAX_HORIZON = 5
GENERATION_ATTEMPTS = 1000


class SizeLimit(NessCauseError):
    """The instance is too large for exhaustive checking."""


class GenerationExhausted(NessCauseError):
    """Too many rejected draws; loosen the configuration or change the seed."""


def _minimal_satisfying_sets(
    fluents: Sequence[Fluent], formula: Formula
) -> List[FrozenSet[Literal]]:
    """Minimal coherent literal sets satisfying the formula, by enumeration."""
    pool = [Literal(f, pos) for f in sorted(fluents) for pos in (True, False)]
    satisfying: List[FrozenSet[Literal]] = []
    for r in range(len(fluents) + 1):
        for combo in combinations(pool, r):
            w = frozenset(combo)
            if not is_coherent(w):
                continue
            if any(prior <= w for prior in satisfying):
                continue
            if evaluate(w, formula):
                satisfying.append(w)
    return satisfying


def _qualifying_cell_choices(
    trace: Trace, t: int, goal: FrozenSet[Literal]
) -> List[FrozenSet[EventDecl]]:
    """Every minimal subset of what fired at ``t`` whose update reaches ``goal``."""
    fired = sorted(trace.events_at(t), key=lambda e: e.name)
    state = trace.state_at(t)
    qualifying: List[FrozenSet[EventDecl]] = []
    for r in range(len(fired) + 1):
        for combo in combinations(fired, r):
            events = frozenset(combo)
            if goal <= update(state, events, t):
                qualifying.append(events)
    return [c for c in qualifying if not any(o < c for o in qualifying)]


def brute_force_direct(
    context: Context,
    scenario: Scenario,
    formula: Formula,
    at: int,
    trace: Optional[Trace] = None,
) -> FrozenSet[DirectRelation]:
    """Recompute every direct causal relation by checking the clauses outright."""
    if len(context.fluents) > ORACLE_MAX_FLUENTS:
        raise SizeLimit(f"more than {ORACLE_MAX_FLUENTS} fluents")
    if context.horizon > ORACLE_MAX_HORIZON:
        raise SizeLimit(f"horizon beyond {ORACLE_MAX_HORIZON}")
    if trace is None:
        trace = build_trace(context, scenario)
    target_state = trace.state_at(at)
    relations: Set[DirectRelation] = set()
    for backing in _minimal_satisfying_sets(sorted(context.fluents), formula):
        if not backing or not backing <= target_state:
            continue
        literals = sorted(backing, key=lambda l: l.sort_key)
        time_options: List[List[int]] = []
        for l in literals:
            allowed = [
                t
                for t in range(-1, at)
                if l not in trace.state_at(t)
                and all(l in trace.state_at(u) for u in range(t + 1, at + 1))
            ]
            time_options.append(allowed)
        for assignment in product(*time_options):
            cells: Dict[int, Set[Literal]] = {}
            for l, t in zip(literals, assignment):
                cells.setdefault(t, set()).add(l)
            partition = tuple(
                (t, frozenset(cells[t])) for t in sorted(cells, reverse=True)
            )
            cell_choices = [
                _qualifying_cell_choices(trace, t, goal) for t, goal in partition
            ]
            if any(not c for c in cell_choices):
                continue
            for choice in product(*cell_choices):
                causes = frozenset(
                    Occurrence(e.name, t)
                    for (t, _), events in zip(partition, choice)
                    for e in events
                )
                relations.add(
                    DirectRelation(
                        formula=formula,
                        at=at,
                        backing=backing,
                        partition=partition,
                        causes=causes,
                    )
                )
    return frozenset(relations)


# --- random instances --------------------------------------------------------


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for random domain drawing; sizes are capped to stay checkable."""

    seed: int = 0
    max_fluents: int = 4
    max_events: int = 4
    max_horizon: int = 3
    conditional_effect_probability: float = 0.3

    def __post_init__(self) -> None:
        if not 1 <= self.max_fluents <= ORACLE_MAX_FLUENTS:
            raise ValueError(f"max_fluents must be in 1..{ORACLE_MAX_FLUENTS}")
        if not 1 <= self.max_events <= 6:
            raise ValueError("max_events must be in 1..6")
        if not 1 <= self.max_horizon <= ORACLE_MAX_HORIZON:
            raise ValueError(f"max_horizon must be in 1..{ORACLE_MAX_HORIZON}")
        if not 0.0 <= self.conditional_effect_probability <= 1.0:
            raise ValueError("conditional_effect_probability must be in 0..1")


_FLUENT_NAMES = ("a", "b", "c", "d", "e", "f")


def _random_literal(rng: random.Random, fluents: Sequence[Fluent]) -> Literal:
    return Literal(rng.choice(list(fluents)), rng.random() < 0.5)


def _random_formula(rng: random.Random, fluents: Sequence[Fluent]) -> Formula:
    roll = rng.random()
    if roll < 0.15:
        return TOP
    if roll < 0.55:
        return Atom(_random_literal(rng, fluents))
    left = Atom(_random_literal(rng, fluents))
    right = Atom(_random_literal(rng, fluents))
    if roll < 0.8:
        return And(left, right)
    return Or(left, right)


def _random_effects(
    rng: random.Random, fluents: Sequence[Fluent], conditional_p: float
) -> EffectFormula:
    items = []
    for _ in range(rng.randint(1, 2)):
        condition: Formula = TOP
        if rng.random() < conditional_p:
            condition = Atom(_random_literal(rng, fluents))
        items.append(ConditionalEffect(condition, _random_literal(rng, fluents)))
    return EffectFormula(items)


def _draw(rng: random.Random, cfg: GeneratorConfig) -> Tuple[Context, Scenario]:
    n_fluents = rng.randint(1, cfg.max_fluents)
    fluents = [Fluent(n) for n in _FLUENT_NAMES[:n_fluents]]
    horizon = rng.randint(1, cfg.max_horizon)
    n_events = rng.randint(1, cfg.max_events)
    n_actions = rng.randint(1, n_events)
    decls: List[EventDecl] = []
    for i in range(n_actions):
        pre = TOP if rng.random() < 0.5 else _random_formula(rng, fluents)
        decls.append(
            EventDecl(
                name=f"act{i}",
                kind=EventKind.ACTION,
                pre=pre,
                tri=pre,
                eff=_random_effects(rng, fluents, cfg.conditional_effect_probability),
            )
        )
    for i in range(n_events - n_actions):
        tri = _random_formula(rng, fluents)
        decls.append(
            EventDecl(
                name=f"evt{i}",
                kind=EventKind.EXOGENOUS,
                pre=tri,
                tri=tri,
                eff=_random_effects(rng, fluents, cfg.conditional_effect_probability),
            )
        )
    exogenous = [d.name for d in decls if d.kind is EventKind.EXOGENOUS]
    priority: Set[Tuple[str, str]] = set()
    if len(exogenous) >= 2 and rng.random() < 0.4:
        hi, lo = rng.sample(exogenous, 2)
        priority.add((min(hi, lo), max(hi, lo)))
    initial = frozenset(Literal(f, rng.random() < 0.5) for f in fluents)
    context = Context(
        name=f"random{rng.randrange(10_000)}",
        fluents=frozenset(fluents),
        events=frozenset(decls),
        initial_state=initial,
        priority=frozenset(priority),
        horizon=horizon,
    )
    occurrences: Set[Occurrence] = set()
    for _ in range(rng.randint(1, max(1, n_actions + 1))):
        occurrences.add(
            Occurrence(f"act{rng.randrange(n_actions)}", rng.randrange(horizon + 1))
        )
    return context, Scenario(frozenset(occurrences))


def generate(cfg: GeneratorConfig) -> Tuple[Context, Scenario, Trace]:
    """Draw a random domain and scenario whose trace builds; deterministic in seed."""
    rng = random.Random(cfg.seed)
    for _ in range(GENERATION_ATTEMPTS):
        try:
            context, scenario = _draw(rng, cfg)
        except NessCauseError:
            continue
        try:
            trace = build_trace(context, scenario)
        except SimulationError:
            continue
        return context, scenario, trace
    raise GenerationExhausted(
        f"no valid draw in {GENERATION_ATTEMPTS} attempts for seed {cfg.seed}"
    )
