"""Literals, formulas, membership evaluation, and minimal backings."""

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nesscause import (
    TOP,
    And,
    Atom,
    ConditionalEffect,
    EffectFormula,
    Fluent,
    ImplicantLimitExceeded,
    Literal,
    Occurrence,
    Or,
    Top,
    atom,
    complement,
    complement_set,
    conj,
    conj_literals,
    evaluate,
    format_literals,
    is_coherent,
    is_state,
    lit,
    minimal_backings,
    sorted_literals,
    unconditional,
)

NAMES = ("a", "b", "c", "d", "e")

literal_st = st.builds(lit, st.sampled_from(NAMES), st.booleans())

formula_st = st.recursive(
    st.one_of(st.just(TOP), st.builds(Atom, literal_st)),
    lambda inner: st.one_of(st.builds(And, inner, inner), st.builds(Or, inner, inner)),
    max_leaves=8,
)


def backs(text_pairs):
    """Build the expected frozenset-of-frozensets from literal name tuples."""
    return frozenset(frozenset(lit(n) for n in names) for names in text_pairs)


# --- literals ----------------------------------------------------------------


def test_literal_text():
    assert str(lit("a")) == "a"
    assert str(lit("!a")) == "!a"
    assert str(lit("a", positive=False)) == "!a"
    assert lit("!a") == Literal(Fluent("a"), positive=False)


def test_fluent_name_must_be_nonempty():
    with pytest.raises(ValueError):
        Fluent("")


def test_complement_set():
    assert complement_set([lit("a"), lit("!b")]) == frozenset({lit("!a"), lit("b")})


def test_coherence():
    assert is_coherent([lit("a"), lit("!b")])
    assert not is_coherent([lit("a"), lit("!a")])
    assert is_coherent([])


def test_is_state():
    fluents = [Fluent("a"), Fluent("b")]
    assert is_state([lit("a"), lit("!b")], fluents)
    assert not is_state([lit("a")], fluents)
    assert not is_state([lit("a"), lit("!a")], fluents)
    assert not is_state([lit("a"), lit("b"), lit("c")], fluents)


def test_sorting_and_formatting():
    xs = [lit("b"), lit("!b"), lit("a")]
    assert sorted_literals(xs) == (lit("a"), lit("!b"), lit("b"))
    assert format_literals([lit("a"), lit("!b")]) == "{a, !b}"
    assert format_literals([]) == "{}"


@given(literal_st)
@settings(max_examples=50)
def test_complement_is_an_involution(l):
    assert complement(complement(l)) == l
    assert complement(l).fluent == l.fluent
    assert complement(l) != l


# --- formulas ----------------------------------------------------------------


def test_formula_text_forms():
    assert str(TOP) == "true"
    assert str(atom("a")) == "a"
    assert str(Atom(lit("!b"))) == "!b"
    assert str(And(atom("a"), atom("b"))) == "(a & b)"
    assert str(Or(atom("a"), And(atom("b"), atom("!c")))) == "(a | (b & !c))"


def test_formula_equality_is_syntactic():
    assert Atom(lit("a")) == atom("a")
    assert hash(Atom(lit("a"))) == hash(atom("a"))
    assert And(atom("a"), atom("b")) != And(atom("b"), atom("a"))
    assert TOP == Top()


def test_conj_absorbs_truth():
    assert conj([]) == TOP
    assert conj([TOP, atom("a"), TOP]) == atom("a")
    assert str(conj([atom("a"), atom("b"), atom("c")])) == "((a & b) & c)"
    assert str(conj_literals([lit("b"), lit("!a")])) == "(!a & b)"
    assert conj_literals([]) == TOP


def test_formula_fluents():
    f = Or(atom("a"), And(atom("b"), atom("!a")))
    assert f.fluents() == frozenset({Fluent("a"), Fluent("b")})


# --- evaluation ----------------------------------------------------------------


def test_evaluate_is_membership():
    assert evaluate([], TOP)
    assert not evaluate([], atom("a"))
    assert not evaluate([], atom("a", positive=False))
    assert evaluate([lit("!a")], Atom(lit("!a")))
    assert not evaluate([lit("a")], Atom(lit("!a")))
    assert not evaluate([lit("a")], And(atom("a"), atom("b")))
    assert evaluate([lit("a"), lit("b")], And(atom("a"), atom("b")))
    assert evaluate([lit("b")], Or(atom("a"), atom("b")))


@given(formula_st, st.sets(literal_st, max_size=5))
@settings(max_examples=100)
def test_evaluate_is_monotone_in_the_state(f, extra):
    """Adding literals to a partial state never falsifies a condition."""
    base = {l for l in extra if complement(l) not in extra}
    if not evaluate(base, f):
        return
    grown = set(base)
    for name in NAMES:
        if lit(name) not in grown and lit("!" + name) not in grown:
            grown.add(lit(name))
    assert evaluate(grown, f)


# --- minimal backings ----------------------------------------------------------


def test_backings_of_truth_and_atoms():
    assert minimal_backings(TOP) == frozenset({frozenset()})
    assert minimal_backings(atom("d")) == backs([("d",)])
    assert minimal_backings(Atom(lit("!d"))) == backs([("!d",)])


def test_backings_of_the_discharge_trigger():
    f = Or(atom("spk_waste"), And(atom("med_waste"), atom("treatment_broken")))
    assert minimal_backings(f) == backs(
        [("spk_waste",), ("med_waste", "treatment_broken")]
    )


def test_backings_of_the_three_switch_circuits():
    f = Or(
        Or(
            And(atom("closed1"), atom("powered")),
            And(atom("closed2"), atom("powered")),
        ),
        And(atom("closed3"), atom("powered")),
    )
    assert minimal_backings(f) == backs(
        [
            ("closed1", "powered"),
            ("closed2", "powered"),
            ("closed3", "powered"),
        ]
    )


def test_no_consensus_between_opposite_branches():
    # (a & b) | (a & !b) keeps both backings; the sets are what gets cited
    # as supporting conditions, so they are not boolean-simplified to a.
    f = Or(And(atom("a"), atom("b")), And(atom("a"), Atom(lit("!b"))))
    assert minimal_backings(f) == backs([("a", "b"), ("a", "!b")])


def test_incoherent_branches_are_dropped():
    f = Or(And(atom("a"), Atom(lit("!a"))), atom("b"))
    assert minimal_backings(f) == backs([("b",)])


def test_supersets_are_absorbed():
    f = Or(atom("a"), And(atom("a"), atom("b")))
    assert minimal_backings(f) == backs([("a",)])
    g = And(atom("a"), Or(TOP, atom("b")))
    assert minimal_backings(g) == backs([("a",)])


def test_unsatisfiable_formula_has_no_backings():
    f = And(atom("a"), Atom(lit("!a")))
    assert minimal_backings(f) == frozenset()


def test_explicit_implicant_limit():
    f = Or(Or(atom("a"), atom("b")), Or(atom("c"), atom("d")))
    with pytest.raises(ImplicantLimitExceeded):
        minimal_backings(f, limit=3)
    assert len(minimal_backings(f, limit=4)) == 4


def test_implicant_limit_from_environment(monkeypatch):
    monkeypatch.setenv("NESS_MAX_IMPLICANTS", "2")
    f = Or(Or(atom("a"), atom("b")), atom("c"))
    with pytest.raises(ImplicantLimitExceeded):
        minimal_backings(f)
    monkeypatch.setenv("NESS_MAX_IMPLICANTS", "50")
    assert len(minimal_backings(f)) == 3


@given(formula_st)
@settings(max_examples=100)
def test_backings_satisfy_and_are_minimal(f):
    for b in minimal_backings(f):
        assert is_coherent(b)
        assert evaluate(b, f)
        for l in b:
            assert not evaluate(b - {l}, f)


@given(formula_st)
@settings(max_examples=60)
def test_backings_agree_with_truth_tables(f):
    """On complete states, backing containment equals direct evaluation."""
    bs = minimal_backings(f)
    for bits in product((True, False), repeat=len(NAMES)):
        state = frozenset(lit(n, p) for n, p in zip(NAMES, bits))
        assert evaluate(state, f) == any(b <= state for b in bs)


# --- effect formulas -----------------------------------------------------------


def test_conditional_effect_text():
    assert str(ConditionalEffect(TOP, lit("jobs"))) == "jobs"
    assert str(ConditionalEffect(atom("guard_new"), lit("extra"))) == "[guard_new] extra"


def test_effect_formula_is_a_sorted_set():
    eff = EffectFormula(
        [
            ConditionalEffect(TOP, lit("jobs")),
            ConditionalEffect(atom("guard_new"), lit("extra")),
        ]
    )
    assert str(eff) == "[guard_new] extra, jobs"
    assert len(eff) == 2
    assert eff == EffectFormula(reversed(list(eff)))
    assert eff.literals() == frozenset({lit("jobs"), lit("extra")})


def test_unconditional_builder():
    eff = unconditional(lit("a"), lit("!b"))
    assert all(cond.condition == TOP for cond in eff)
    assert eff.literals() == frozenset({lit("a"), lit("!b")})


def test_occurrence_text():
    assert str(Occurrence("prod_s", 0)) == "prod_s@0"
    assert str(Occurrence("ini_treatment_broken", -1)) == "ini_treatment_broken@-1"
