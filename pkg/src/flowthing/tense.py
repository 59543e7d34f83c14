"""Tense and aspect as time-machine configurations over an eventized region."""

from __future__ import annotations

import enum

from .core import (
    ADJACENCY,
    CREATE,
    PROCESS,
    RECEIVE,
    RELEASE,
    TRANSFER,
    FMError,
    Flow,
    Machine,
    Schema,
    Sphere,
    StageRef,
    ensure_valid,
)
from .events import ONGOING, Event, EventGraph, Region, TimeMachine, build_chronology, eventize, is_complete


class Tense(str, enum.Enum):
    SIMPLE_PRESENT = "SimplePresent"
    SIMPLE_PAST = "SimplePast"
    SIMPLE_FUTURE = "SimpleFuture"
    PRESENT_PROGRESSIVE = "PresentProgressive"
    PAST_PROGRESSIVE = "PastProgressive"
    FUTURE_PROGRESSIVE = "FutureProgressive"
    PRESENT_PERFECT = "PresentPerfect"
    PAST_PERFECT = "PastPerfect"
    FUTURE_PERFECT = "FuturePerfect"

    def __str__(self) -> str:
        return self.value

    @property
    def placement(self) -> str:
        return self.value.replace("Simple", "").replace("Progressive", "").replace("Perfect", "").lower()

    @property
    def progressive(self) -> bool:
        return self.value.endswith("Progressive")

    @property
    def perfect(self) -> bool:
        return self.value.endswith("Perfect")


WHOLE = "event"
NOW = "now"
UNIT = "unit"
INNER = "inner"
HAVE_LABEL = "Have"

_LIFECYCLE = (CREATE, RECEIVE, PROCESS, RELEASE, TRANSFER)


def _whole_time(tense: Tense) -> TimeMachine:
    placement = tense.placement
    if placement == "future":
        return TimeMachine.future()
    if placement == "past" and not tense.progressive:
        return TimeMachine.past()
    # present, and past progressive: the whole event is still at Process
    return TimeMachine.now()


def _default_agent(schema: Schema, region: Region) -> str:
    machines = sorted({s.machine for s in region.stages})
    if not machines:
        raise FMError("E_REGION", "region has no stages")
    return schema.ancestors(schema.machine(machines[0]).sphere)[-1]


def _chain_flows(machine: Machine) -> list[Flow]:
    present = [s for s in _LIFECYCLE if s in machine.stages]
    flows = []
    for a, b in zip(present, present[1:]):
        if (a, b) in ADJACENCY:
            flows.append(
                Flow(f"{machine.id}_{a.value[:2].lower()}{b.value[:2].lower()}", StageRef(machine.id, a), StageRef(machine.id, b))
            )
    return flows


def _materialize(schema: Schema, events: list[Event], parents: dict[str, str], have_parent: str | None) -> Schema:
    """Add a sphere per event holding its event machine and time machine."""
    spheres = list(schema.spheres)
    machines = list(schema.machines)
    flows = list(schema.flows)
    have_id = None
    if have_parent is not None:
        have_id = f"{have_parent}_have"
        spheres.append(Sphere(have_id, HAVE_LABEL, have_parent))
    for event in events:
        sphere_id = f"ev_{event.id}"
        if event.id == INNER and have_id is not None:
            parent = have_id
        elif event.id in parents:
            parent = f"ev_{parents[event.id]}"
        else:
            parent = None
        spheres.append(Sphere(sphere_id, event.label or event.id, parent))
        own = Machine(f"{sphere_id}_event", "event", sphere_id, event.event_stages)
        machines.append(own)
        flows.extend(_chain_flows(own))
        if event.time.stages_present:
            clock = Machine(f"{sphere_id}_time", "time", sphere_id, event.time.stages_present)
            machines.append(clock)
            flows.extend(_chain_flows(clock))
    result = Schema(tuple(spheres), tuple(machines), tuple(flows), schema.triggers)
    ensure_valid(result)
    return result


def apply_tense(schema: Schema, region: Region | None, tense: Tense | str, agent: str | None = None) -> EventGraph:
    """Build the event structure a tense gives to ``region``.

    Event ids are fixed: ``event`` is the whole event, ``now`` the speech-time
    marker, ``unit`` the repeated progressive sub-event, and ``inner`` the
    owned past event of a perfect form. The returned graph's ``schema`` adds
    one sphere per event (event machine plus time machine); perfect forms
    place the inner event's sphere in a "Have" sphere under ``agent``.
    """
    tense = Tense(tense)
    ensure_valid(schema)
    if region is None:
        region = Region.whole(schema)
    whole = eventize(schema, region, _whole_time(tense), event_id=WHOLE, label=str(tense))
    events = [whole]
    edges: list[tuple[str, str]] = []
    parents: dict[str, str] = {}

    placement = tense.placement
    if placement == "future":
        events.append(eventize(schema, region, TimeMachine.now(), event_id=NOW, label="Now"))
        edges.append((NOW, WHOLE))
    elif placement == "past" and tense.progressive:
        events.append(eventize(schema, region, TimeMachine.now(), event_id=NOW, label="Now"))
        edges.append((WHOLE, NOW))

    if tense.progressive:
        events.append(eventize(schema, region, TimeMachine.past(), ONGOING, event_id=UNIT, label="unit"))
        parents[UNIT] = WHOLE

    have_parent = None
    if tense.perfect:
        events.append(eventize(schema, region, TimeMachine.past(), event_id=INNER, label="owned event"))
        parents[INNER] = WHOLE
        have_parent = agent if agent is not None else _default_agent(schema, region)
        if schema.sphere(have_parent) is None:
            raise FMError("E_REGION", f"unknown agent sphere {have_parent!r}")

    extended = _materialize(schema, events, parents, have_parent)
    return build_chronology(events, edges, parents, extended)


def whole_event(graph: EventGraph) -> Event:
    return graph.event(WHOLE)


def tense_complete(graph: EventGraph, tense: Tense | str) -> bool:
    """Completion as the tense marks it: the inner event for present/future perfect."""
    tense = Tense(tense)
    if tense in (Tense.PRESENT_PERFECT, Tense.FUTURE_PERFECT):
        return is_complete(graph.event(INNER))
    return is_complete(graph.event(WHOLE))
