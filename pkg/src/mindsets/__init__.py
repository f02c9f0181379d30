"""Executable semantics for finite universes that move, learn, and qualify.

A universe is a finite set of elements spread over named regions, each
region on the system or environment side. Step-indexed transfer events
evolve it under a conservation law; decidable witnesses settle whether a
window of the history shows input, processing, and output; a finite
category layer turns histories into functors and checks mimicry claims;
scenario generators, a line-oriented trace format, and a CLI tie it
together.
"""

from .universe import (
    ConstructionError,
    Snapshot,
    StructureRelation,
    make_snapshot,
    cardinality,
    complement,
    carrier_at,
    remove_product,
    extend_product,
    is_subrelation,
)
from .evolution import (
    EXTERNAL_IN,
    EXTERNAL_OUT,
    INTERNAL,
    ConservationViolation,
    Phase,
    StepError,
    Trace,
    TransferEvent,
    apply_step,
    build_trace,
    verify_conservation,
)
from .classify import (
    ActivityScore,
    IntelligenceReport,
    WindowError,
    Witness,
    activity,
    attribution,
    brute_force_classify,
    classify,
    witness_input,
    witness_output,
    witness_processing,
)
from .categories import (
    IntelligenceCategory,
    IntelligenceMorphism,
    IntelligenceObject,
    LawFailure,
    LawReport,
    MimicryError,
    MimicryFunctor,
    TimeCategoryDescriptor,
    TimeFunctor,
    TimeMorphism,
    check_functor_laws,
    compose_functors,
    compose_morphisms,
    functor_from_trace,
    identity_functor,
    identity_morphism,
    intelligence_category,
    mimicry_functor,
    time_category,
)
from .scenarios import (
    SCENARIO_NAMES,
    ScenarioBundle,
    ScenarioConfig,
    TrialRecord,
    aplysia_scenario,
    backprop_scenario,
    habituation_extinction_point,
    hebbian_scenario,
    make_scenario,
    powered_off_scenario,
    sandpile_scenario,
)
from .io import (
    ConfigError,
    MappingFormatError,
    ReportDocument,
    TraceFormatError,
    default_mimicry_mapping,
    load_config,
    load_mapping,
    mapping_components,
    mapping_object_map,
    parse_window,
    read_trace,
    render_report,
    trace_to_text,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "Snapshot",
    "StructureRelation",
    "make_snapshot",
    "cardinality",
    "complement",
    "carrier_at",
    "remove_product",
    "extend_product",
    "is_subrelation",
    "EXTERNAL_IN",
    "EXTERNAL_OUT",
    "INTERNAL",
    "ConservationViolation",
    "Phase",
    "StepError",
    "Trace",
    "TransferEvent",
    "apply_step",
    "build_trace",
    "verify_conservation",
    "ActivityScore",
    "IntelligenceReport",
    "WindowError",
    "Witness",
    "activity",
    "attribution",
    "brute_force_classify",
    "classify",
    "witness_input",
    "witness_output",
    "witness_processing",
    "IntelligenceCategory",
    "IntelligenceMorphism",
    "IntelligenceObject",
    "LawFailure",
    "LawReport",
    "MimicryError",
    "MimicryFunctor",
    "TimeCategoryDescriptor",
    "TimeFunctor",
    "TimeMorphism",
    "check_functor_laws",
    "compose_functors",
    "compose_morphisms",
    "functor_from_trace",
    "identity_functor",
    "identity_morphism",
    "intelligence_category",
    "mimicry_functor",
    "time_category",
    "SCENARIO_NAMES",
    "ScenarioBundle",
    "ScenarioConfig",
    "TrialRecord",
    "aplysia_scenario",
    "backprop_scenario",
    "habituation_extinction_point",
    "hebbian_scenario",
    "make_scenario",
    "powered_off_scenario",
    "sandpile_scenario",
    "ConfigError",
    "MappingFormatError",
    "ReportDocument",
    "TraceFormatError",
    "default_mimicry_mapping",
    "load_config",
    "load_mapping",
    "mapping_components",
    "mapping_object_map",
    "parse_window",
    "read_trace",
    "render_report",
    "trace_to_text",
    "write_trace",
]
