"""Fluents, literals, condition formulas, effect formulas, and backing enumeration.

Everything here is an immutable value. Partial states are plain frozensets of
Literal; a set is coherent when it never contains a literal together with its
complement, and it is a (complete) state when it additionally assigns every
fluent of the domain. Formula satisfaction is by membership: a literal holds in
a partial state only if it is present, so an absent fluent satisfies neither
polarity. This matters: ``(a & b) | (a & !b)`` is *not* equivalent to ``a``
here, and backings are computed accordingly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Iterable, Iterator, Tuple

DEFAULT_IMPLICANT_LIMIT = 10_000
_IMPLICANT_LIMIT_ENV = "NESS_MAX_IMPLICANTS"


class NessCauseError(Exception):
    """Base class for every error raised by this package."""


class ImplicantLimitExceeded(NessCauseError):
    """Backing enumeration grew past the configured term limit."""


@dataclass(frozen=True, order=True)
class Fluent:
    """A named boolean property of the world."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("fluent name must be nonempty")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Literal:
    """A fluent or its negation."""

    fluent: Fluent
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.fluent, not self.positive)

    def __str__(self) -> str:
        return self.fluent.name if self.positive else "!" + self.fluent.name

    @property
    def sort_key(self) -> Tuple[str, bool]:
        # negative before positive for equal names keeps printed sets stable
        return (self.fluent.name, self.positive)


def lit(name: str, positive: bool = True) -> Literal:
    """Shorthand constructor used pervasively in tests."""
    if name.startswith("!"):
        return Literal(Fluent(name[1:]), not positive)
    return Literal(Fluent(name), positive)


def complement(l: Literal) -> Literal:
    """The complement of a literal; an involution."""
    return l.complement()


def complement_set(literals: Iterable[Literal]) -> FrozenSet[Literal]:
    return frozenset(l.complement() for l in literals)


def is_coherent(literals: Iterable[Literal]) -> bool:
    s = frozenset(literals)
    return all(l.complement() not in s for l in s)


def is_state(literals: Iterable[Literal], fluents: Iterable[Fluent]) -> bool:
    """Coherent and complete over the given fluent universe."""
    s = frozenset(literals)
    if not is_coherent(s):
        return False
    return {l.fluent for l in s} == set(fluents) and len(s) == len(set(fluents))


def sorted_literals(literals: Iterable[Literal]) -> Tuple[Literal, ...]:
    return tuple(sorted(literals, key=lambda l: l.sort_key))


def format_literals(literals: Iterable[Literal]) -> str:
    return "{" + ", ".join(str(l) for l in sorted_literals(literals)) + "}"


class Formula:
    """A condition over literals: literals, conjunction, disjunction, truth.

    There is deliberately no negation node; negation exists only inside
    literals and the parser enforces the same restriction.
    """

    def __hash__(self) -> int:
        return hash(str(self))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Formula) and str(self) == str(other)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    def literals(self) -> Iterator[Literal]:
        raise NotImplementedError

    def fluents(self) -> FrozenSet[Fluent]:
        return frozenset(l.fluent for l in self.literals())


class Top(Formula):
    """The always-true condition; printable as ``true``."""

    def __str__(self) -> str:
        return "true"

    def literals(self) -> Iterator[Literal]:
        return iter(())


class Atom(Formula):
    """A single literal used as a formula."""

    def __init__(self, literal: Literal):
        self.literal = literal

    def __str__(self) -> str:
        return str(self.literal)

    def literals(self) -> Iterator[Literal]:
        yield self.literal


class And(Formula):
    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"

    def literals(self) -> Iterator[Literal]:
        yield from self.left.literals()
        yield from self.right.literals()


class Or(Formula):
    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"

    def literals(self) -> Iterator[Literal]:
        yield from self.left.literals()
        yield from self.right.literals()


TOP = Top()


def atom(name: str, positive: bool = True) -> Atom:
    return Atom(lit(name, positive))


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-folded conjunction with ``true`` absorbed."""
    out: Formula | None = None
    for p in parts:
        if isinstance(p, Top):
            continue
        out = p if out is None else And(out, p)
    return out if out is not None else TOP


def conj_literals(literals: Iterable[Literal]) -> Formula:
    return conj(Atom(l) for l in sorted_literals(literals))


def evaluate(state: Iterable[Literal], formula: Formula) -> bool:
    """Membership satisfaction of a condition in a coherent partial state."""
    s = state if isinstance(state, frozenset) else frozenset(state)
    return _eval(s, formula)


def _eval(s: FrozenSet[Literal], f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Atom):
        return f.literal in s
    if isinstance(f, And):
        return _eval(s, f.left) and _eval(s, f.right)
    if isinstance(f, Or):
        return _eval(s, f.left) or _eval(s, f.right)
    raise TypeError(f"not a formula: {f!r}")


def _implicant_limit(limit: int | None) -> int:
    if limit is not None:
        return limit
    raw = os.environ.get(_IMPLICANT_LIMIT_ENV)
    return int(raw) if raw else DEFAULT_IMPLICANT_LIMIT


def minimal_backings(
    formula: Formula, limit: int | None = None
) -> FrozenSet[FrozenSet[Literal]]:
    """All minimal coherent literal sets that satisfy the formula.

    These are the prime implicants of the formula under membership
    semantics: every returned set satisfies the formula and no proper subset
    does. Incoherent branches are dropped, duplicates and supersets absorbed.
    The sets are arbitrary coherent literal sets; nothing requires them to be
    reachable in any particular domain.

    The expansion is exact and exponential in the worst case; it aborts with
    ImplicantLimitExceeded once more than ``limit`` terms are alive (default
    10000, or the NESS_MAX_IMPLICANTS environment variable).
    """
    cap = _implicant_limit(limit)
    terms = _dnf(formula, cap)
    return _absorb(terms)


def _dnf(f: Formula, cap: int) -> list:
    if isinstance(f, Top):
        return [frozenset()]
    if isinstance(f, Atom):
        return [frozenset([f.literal])]
    if isinstance(f, Or):
        out = _dnf(f.left, cap) + _dnf(f.right, cap)
        if len(out) > cap:
            raise ImplicantLimitExceeded(f"more than {cap} terms while expanding")
        return out
    if isinstance(f, And):
        left, right = _dnf(f.left, cap), _dnf(f.right, cap)
        out = []
        for a, b in product(left, right):
            u = a | b
            if is_coherent(u):
                out.append(u)
            if len(out) > cap:
                raise ImplicantLimitExceeded(f"more than {cap} terms while expanding")
        return out
    raise TypeError(f"not a formula: {f!r}")


def _absorb(terms: list) -> FrozenSet[FrozenSet[Literal]]:
    uniq = set(terms)
    kept = {t for t in uniq if not any(o < t for o in uniq)}
    return frozenset(kept)


@dataclass(frozen=True)
class ConditionalEffect:
    """One ``[condition] literal`` item of an effect formula."""

    condition: Formula
    literal: Literal

    def __str__(self) -> str:
        if isinstance(self.condition, Top):
            return str(self.literal)
        return f"[{self.condition}] {self.literal}"

    @property
    def sort_key(self) -> Tuple[Tuple[str, bool], str]:
        return (self.literal.sort_key, str(self.condition))


class EffectFormula:
    """A set of conditional effects; unconditional items carry condition true."""

    def __init__(self, effects: Iterable[ConditionalEffect]):
        self.effects: FrozenSet[ConditionalEffect] = frozenset(effects)

    def __iter__(self) -> Iterator[ConditionalEffect]:
        return iter(sorted(self.effects, key=lambda e: e.sort_key))

    def __len__(self) -> int:
        return len(self.effects)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EffectFormula) and self.effects == other.effects

    def __hash__(self) -> int:
        return hash(self.effects)

    def __str__(self) -> str:
        return ", ".join(str(e) for e in self)

    def __repr__(self) -> str:
        return f"EffectFormula({self})"

    def literals(self) -> FrozenSet[Literal]:
        return frozenset(e.literal for e in self.effects)


def unconditional(*literals: Literal) -> EffectFormula:
    return EffectFormula(ConditionalEffect(TOP, l) for l in literals)


@dataclass(frozen=True, order=True)
class Occurrence:
    """An event name paired with the time point at which it occurred."""

    event: str
    time: int

    def __str__(self) -> str:
        return f"{self.event}@{self.time}"
