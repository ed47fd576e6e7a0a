"""Acceptance gate: golden examples, oracle equivalence, simulator laws,
round-trips. One test per acceptance check; run with -v for one verdict
line each."""

import time
from importlib.resources import files

from nesscause import (
    And,
    Atom,
    CausalSetting,
    GeneratorConfig,
    Literal,
    Occurrence,
    Or,
    actual_effects,
    after,
    brute_force_direct,
    build_trace,
    but_for,
    complement_set,
    direct_ness_causes,
    generate,
    is_coherent,
    is_state,
    lit,
    ness_causes,
    parse_domain,
    parse_formula,
    parse_scenario,
    print_domain,
    print_scenario,
    update,
    validate_sequence,
)
from nesscause.cli import run

DOMAINS = files("nesscause") / "domains"


def names(occurrences):
    return {f"{o.event}@{o.time}" for o in occurrences}


def test_live_circuits_back_the_current(switches, switches_scenario):
    started = time.monotonic()
    setting = CausalSetting(switches, switches_scenario)
    formula = parse_formula(
        "closed1 & powered | closed2 & powered | closed3 & powered", switches
    )
    relations = direct_ness_causes(setting, formula, 2)
    backings = {rel.backing for rel in relations}
    assert backings == {
        frozenset({lit("closed2"), lit("powered")}),
        frozenset({lit("closed3"), lit("powered")}),
    }
    assert frozenset({lit("closed1"), lit("powered")}) not in backings
    union = frozenset().union(*(rel.causes for rel in relations))
    assert names(union) == {"close2@0", "close3@1", "power_on@1"}
    assert time.monotonic() - started < 1.0


def test_joint_production_defeats_but_for(pollution, duplication):
    started = time.monotonic()
    setting = CausalSetting(pollution, duplication)
    d = parse_formula("d", pollution)
    report = ness_causes(setting, d, 3)
    assert names(report.decisional_causes()) == {"prod_s@0", "prod_m@0"}
    for action in ("prod_s", "prod_m"):
        verdict = but_for(setting, Occurrence(action, 0), d, 3)
        assert not verdict.refuted_at
        assert not verdict.refuted_ever
        assert not verdict.is_cause_at
    assert time.monotonic() - started < 1.0


def test_early_production_preempts_the_late_one(pollution, preemption):
    started = time.monotonic()
    setting = CausalSetting(pollution, preemption)
    report = ness_causes(setting, parse_formula("d", pollution), 3)
    assert names(report.decisional_causes()) == {"prod_s@0"}
    assert time.monotonic() - started < 1.0


def test_guarded_write_traces_back_to_arming(guarded_write, guarded_write_scenario):
    started = time.monotonic()
    setting = CausalSetting(guarded_write, guarded_write_scenario)
    apply = guarded_write.event("apply")
    state_1 = setting.state_at(1)
    assert actual_effects({apply}, state_1, 1) == frozenset(
        {lit("done"), lit("extra")}
    )
    formula = parse_formula("done & extra & intact", guarded_write)
    relations = direct_ness_causes(setting, formula, 2)
    assert len(relations) == 1
    assert names(relations[0].causes) == {"apply@1", "ini_intact@-1"}
    requirement = after(
        setting,
        {apply},
        {lit("done"), lit("extra")},
        maintained={lit("intact")},
        at=1,
    )
    assert str(requirement) == "(guard_new & !guard_old)"
    report = ness_causes(setting, formula, 2)
    assert Occurrence("arm", 0) in report.union_of_causes()
    assert frozenset(
        {Occurrence("arm", 0), Occurrence("ini_intact", -1)}
    ) in {cs.occurrences for cs in report.cause_sets}
    assert any(
        str(e.source) == "arm@0" and str(e.target) == "apply@1"
        for e in report.expansions
    )
    assert time.monotonic() - started < 1.0


def test_engine_agrees_with_exhaustive_checker_on_200_domains():
    started = time.monotonic()
    mismatches = []
    checked = 0
    for seed in range(200):
        cfg = GeneratorConfig(seed=seed, max_fluents=5, max_horizon=4)
        ctx, scenario, trace = generate(cfg)
        setting = CausalSetting(ctx, scenario, trace)
        fluents = sorted(ctx.fluents, key=lambda f: f.name)
        formulas = [Atom(Literal(f, pos)) for f in fluents for pos in (True, False)]
        if len(fluents) >= 2:
            a, b = Atom(Literal(fluents[0], True)), Atom(Literal(fluents[1], True))
            formulas.append(And(a, b))
            formulas.append(Or(Atom(Literal(fluents[0], False)), b))
        for at in {trace.length, max(0, trace.length - 1)}:
            for formula in formulas:
                fast = frozenset(direct_ness_causes(setting, formula, at))
                slow = brute_force_direct(ctx, scenario, formula, at, trace=trace)
                checked += 1
                if fast != slow:
                    mismatches.append((seed, str(formula), at))
    assert checked >= 200
    assert mismatches == []
    assert time.monotonic() - started < 300.0


def test_all_traces_obey_the_simulator_laws(
    pollution, duplication, preemption,
    switches, switches_scenario, guarded_write, guarded_write_scenario,
):
    bundled = [
        (pollution, build_trace(pollution, duplication)),
        (pollution, build_trace(pollution, preemption)),
        (switches, build_trace(switches, switches_scenario)),
        (guarded_write, build_trace(guarded_write, guarded_write_scenario)),
    ]
    generated = []
    for seed in range(100):
        ctx, _, trace = generate(GeneratorConfig(seed=seed))
        generated.append((ctx, trace))
    for ctx, trace in bundled + generated:
        for state in trace.states:
            assert is_coherent(state)
            assert is_state(state, ctx.fluents)
        assert update(frozenset(), trace.events_at(-1)) == trace.state_at(0)
        for t in range(trace.length):
            before, fired = trace.state_at(t), trace.events_at(t)
            after_state = trace.state_at(t + 1)
            assert after_state == update(before, fired, t)
            changed = actual_effects(fired, before, t)
            assert changed == after_state - before
            assert after_state == (before - complement_set(changed)) | changed
        verdict = validate_sequence(ctx, trace.states, trace.events)
        assert verdict.valid, verdict.problems


def test_printing_parses_back_and_cli_output_is_stable(capsys):
    for seed in range(40):
        ctx, scenario, _ = generate(GeneratorConfig(seed=seed))
        domain_text = print_domain(ctx)
        reparsed = parse_domain(domain_text)
        assert print_domain(reparsed) == domain_text
        scenario_text = print_scenario(scenario)
        assert print_scenario(parse_scenario(scenario_text, reparsed)) == scenario_text

    pollution = str(DOMAINS / "pollution.adl")
    duplication = str(DOMAINS / "duplication.sc")
    invocations = [
        ("simulate", pollution, duplication),
        ("causes", pollution, duplication, "--formula", "d", "--at", "3"),
        ("export-dot", pollution, duplication, "--formula", "d", "--at", "3"),
    ]
    for argv in invocations:
        assert run(list(argv)) == 0
        first = capsys.readouterr().out
        assert run(list(argv)) == 0
        assert capsys.readouterr().out == first
        assert first
