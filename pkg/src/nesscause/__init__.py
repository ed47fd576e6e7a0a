"""Simulation of concurrent action domains and NESS-style actual causation."""

from .core import (
    And,
    Atom,
    ConditionalEffect,
    EffectFormula,
    Fluent,
    Formula,
    ImplicantLimitExceeded,
    Literal,
    NessCauseError,
    Occurrence,
    Or,
    TOP,
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
from .dsl import (
    Context,
    DslSemanticError,
    DslSyntaxError,
    EventDecl,
    EventKind,
    Scenario,
    parse_domain,
    parse_formula,
    parse_scenario,
    print_domain,
    print_scenario,
    report_to_dot,
    report_to_json,
    serialize,
    trace_to_json,
)
from .simulator import (
    IncoherentEffects,
    PreconditionViolated,
    ScenarioActionConflict,
    SimulationError,
    Trace,
    UnresolvedInterference,
    ValidityReport,
    actual_effects,
    build_trace,
    triggered_events,
    update,
    validate_sequence,
)
from .causation import (
    ButForResult,
    CausalReport,
    CausalSetting,
    CauseSet,
    DirectRelation,
    ExpansionEdge,
    NoWitness,
    NotOccurred,
    NotScheduled,
    RecursionDepthExceeded,
    actual_causes,
    after,
    after_witnesses,
    but_for,
    direct_ness_causes,
    ness_causes,
)
from .oracle import (
    GenerationExhausted,
    GeneratorConfig,
    SizeLimit,
    brute_force_direct,
    generate,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "ButForResult",
    "CausalReport",
    "CausalSetting",
    "CauseSet",
    "ConditionalEffect",
    "Context",
    "DirectRelation",
    "DslSemanticError",
    "DslSyntaxError",
    "EffectFormula",
    "EventDecl",
    "EventKind",
    "ExpansionEdge",
    "Fluent",
    "Formula",
    "GenerationExhausted",
    "GeneratorConfig",
    "ImplicantLimitExceeded",
    "IncoherentEffects",
    "Literal",
    "NessCauseError",
    "NoWitness",
    "NotOccurred",
    "NotScheduled",
    "Occurrence",
    "Or",
    "PreconditionViolated",
    "RecursionDepthExceeded",
    "Scenario",
    "ScenarioActionConflict",
    "SimulationError",
    "SizeLimit",
    "TOP",
    "Top",
    "Trace",
    "UnresolvedInterference",
    "ValidityReport",
    "actual_causes",
    "actual_effects",
    "after",
    "after_witnesses",
    "atom",
    "brute_force_direct",
    "build_trace",
    "but_for",
    "complement",
    "complement_set",
    "format_literals",
    "sorted_literals",
    "conj",
    "conj_literals",
    "direct_ness_causes",
    "evaluate",
    "generate",
    "is_coherent",
    "is_state",
    "lit",
    "minimal_backings",
    "ness_causes",
    "parse_domain",
    "parse_formula",
    "parse_scenario",
    "print_domain",
    "print_scenario",
    "report_to_dot",
    "report_to_json",
    "serialize",
    "trace_to_json",
    "triggered_events",
    "unconditional",
    "update",
    "validate_sequence",
]
