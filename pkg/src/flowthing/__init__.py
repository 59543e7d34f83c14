"""Flowthing machine (FM) models: schemas, events, verb templates, and DOT output."""

from .core import (
    ADJACENCY,
    Diagnostic,
    FMError,
    Flow,
    Machine,
    Schema,
    Sphere,
    StageKind,
    StageRef,
    Trigger,
    adjacency_allowed,
    build,
    canonicalize,
    ref,
    validate,
)
from .dsl import DSLSyntaxError, ParseError, SourceSpan, from_json, parse, print_schema, to_json
from .eventfile import dump_events, load_events
from .events import (
    ONGOING,
    Event,
    EventGraph,
    Region,
    TimeMachine,
    Trace,
    build_chronology,
    eventize,
    is_complete,
    operational_sequence,
    simulate,
)
from .lexicon import Lexicon, VendlerCategory, VerbEntry, instantiate, lookup, signature
from .render import RenderOptions, render_chronology, render_events, render_schema
from .tense import Tense, apply_tense
from .vendler import classify_vendler

__version__ = "0.1.0"
