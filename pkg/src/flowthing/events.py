"""Events laid over a static schema, their chronology, and deterministic simulation."""

from __future__ import annotations

import heapq
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

from .core import (
    CREATE,
    PROCESS,
    RELEASE,
    TRANSFER,
    FMError,
    Schema,
    StageKind,
    StageRef,
    ensure_valid,
    stage_set,
)

ONGOING = "unbounded-ongoing"
Repetition = Union[int, str, None]


def event_key(event_id: str):
    """Natural ordering for event ids, so ``"2"`` sorts before ``"10"``."""
    parts = re.split(r"(\d+)", event_id)
    return [int(p) if i % 2 else p for i, p in enumerate(parts)]


@dataclass(frozen=True)
class TimeMachine:
    stages_present: tuple[StageKind, ...] = (PROCESS,)
    traversed: tuple[StageKind, ...] = ()

    def __post_init__(self):
        present = stage_set(self.stages_present)
        traversed = stage_set(self.traversed)
        object.__setattr__(self, "stages_present", present)
        object.__setattr__(self, "traversed", traversed)
        if not set(traversed) <= set(present):
            raise ValueError("traversed time stages must be present on the time machine")
        if TRANSFER in traversed and RELEASE not in traversed:
            raise ValueError("time cannot be transferred before it is released")

    @classmethod
    def past(cls) -> TimeMachine:
        return cls((PROCESS, RELEASE, TRANSFER), (PROCESS, RELEASE, TRANSFER))

    @classmethod
    def now(cls) -> TimeMachine:
        return cls((PROCESS,), (PROCESS,))

    @classmethod
    def future(cls) -> TimeMachine:
        return cls((PROCESS,), ())


@dataclass(frozen=True)
class Region:
    stages: frozenset[StageRef] = frozenset()
    flows: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "stages", frozenset(self.stages))
        object.__setattr__(self, "flows", frozenset(self.flows))

    def __bool__(self) -> bool:
        return bool(self.stages or self.flows)

    def __le__(self, other: Region) -> bool:
        return self.stages <= other.stages and self.flows <= other.flows

    @classmethod
    def closed(cls, schema: Schema, flows: Iterable[str] = (), stages: Iterable[StageRef] = ()) -> Region:
        """Region holding ``flows`` plus every stage those flows touch."""
        flows = frozenset(flows)
        members = set(stages)
        for flow_id in flows:
            flow = schema.flow(flow_id)
            if flow is None:
                raise FMError("E_REGION", f"unknown flow {flow_id!r}")
            members.update((flow.source, flow.target))
        return cls(frozenset(members), flows)

    @classmethod
    def whole(cls, schema: Schema) -> Region:
        return cls(frozenset(schema.stage_refs()), frozenset(f.id for f in schema.flows))


@dataclass(frozen=True)
class Event:
    id: str
    region: Region
    time: TimeMachine = field(default_factory=TimeMachine)
    event_stages: tuple[StageKind, ...] = (PROCESS,)
    repetition: Repetition = None
    label: str = ""
    duration: str = ""

    @property
    def repeated(self) -> bool:
        return self.repetition is not None


def _check_repetition(repetition: Repetition) -> Repetition:
    if repetition is None or repetition == ONGOING:
        return repetition
    if isinstance(repetition, bool) or not isinstance(repetition, int) or repetition < 1:
        raise FMError("E_REPEAT", f"repetition must be a positive count or {ONGOING!r}")
    return repetition


def check_region(schema: Schema, region: Region) -> None:
    if not region:
        raise FMError("E_REGION", "region is empty")
    for stage_ref in sorted(region.stages):
        if not schema.has_stage(stage_ref):
            raise FMError("E_REGION", f"region names unknown stage {stage_ref}")
    for flow_id in sorted(region.flows):
        flow = schema.flow(flow_id)
        if flow is None:
            raise FMError("E_REGION", f"region names unknown flow {flow_id!r}")
        if flow.source not in region.stages or flow.target not in region.stages:
            raise FMError("E_REGION", f"flow {flow_id!r} has an endpoint outside the region")


def eventize(
    schema: Schema,
    region: Region,
    time: TimeMachine | None = None,
    repetition: Repetition = None,
    *,
    event_id: str = "event",
    event_stages: Iterable[StageKind] = (PROCESS,),
    label: str = "",
    duration: str = "",
) -> Event:
    ensure_valid(schema)
    check_region(schema, region)
    stages = set(stage_set(event_stages))
    stages.add(PROCESS)
    return Event(
        event_id,
        region,
        time if time is not None else TimeMachine(),
        stage_set(stages),
        _check_repetition(repetition),
        label,
        duration,
    )


def is_complete(event: Event) -> bool:
    return RELEASE in event.time.traversed and TRANSFER in event.time.traversed


@dataclass(frozen=True)
class EventGraph:
    events: tuple[Event, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    sub_event_of: tuple[tuple[str, str], ...] = ()
    schema: Schema | None = None

    def event(self, event_id: str) -> Event:
        for e in self.events:
            if e.id == event_id:
                return e
        raise FMError("E_NOEVENT", f"no event {event_id!r}")

    @property
    def parent_of(self) -> dict[str, str]:
        return dict(self.sub_event_of)

    def children_of(self, event_id: str) -> list[str]:
        return sorted((c for c, p in self.sub_event_of if p == event_id), key=event_key)

    def successors(self, event_id: str) -> list[str]:
        return sorted((b for a, b in self.edges if a == event_id), key=event_key)

    def ancestors(self, event_id: str) -> list[str]:
        parents = self.parent_of
        chain = []
        while event_id in parents:
            event_id = parents[event_id]
            chain.append(event_id)
        return chain

    def reachable_from(self, event_id: str) -> set[str]:
        seen, stack = set(), [event_id]
        while stack:
            for nxt in self.successors(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen


def _find_cycle(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str] | None:
    adj: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, [])
    color = dict.fromkeys(adj, 0)
    for root in sorted(adj, key=event_key):
        if color[root]:
            continue
        stack = [(root, iter(sorted(adj[root], key=event_key)))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(adj[nxt], key=event_key))))
    return None


def build_chronology(
    events: Iterable[Event],
    edges: Iterable[tuple[str, str]] = (),
    sub_event_of: dict[str, str] | Iterable[tuple[str, str]] = (),
    schema: Schema | None = None,
) -> EventGraph:
    events = tuple(sorted(events, key=lambda e: event_key(e.id)))
    ids = [e.id for e in events]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1}, key=event_key)
        raise FMError("E_DUP_ID", f"duplicate event ids {dup}")
    known = set(ids)
    edges = tuple(sorted(set(map(tuple, edges)), key=lambda ab: (event_key(ab[0]), event_key(ab[1]))))
    if isinstance(sub_event_of, dict):
        sub_event_of = sub_event_of.items()
    subs = tuple(sorted(set(map(tuple, sub_event_of)), key=lambda cp: event_key(cp[0])))
    for a, b in (*edges, *subs):
        for x in (a, b):
            if x not in known:
                raise FMError("E_NOEVENT", f"chronology names unknown event {x!r}")
    if len({c for c, _ in subs}) != len(subs):
        raise FMError("E_SUBREGION", "an event has more than one parent")

    cycle = _find_cycle(ids, edges)
    if cycle:
        raise FMError("E_CYCLE", "chronology cycle " + " -> ".join(cycle))
    cycle = _find_cycle(ids, subs)
    if cycle:
        raise FMError("E_CYCLE", "sub-event cycle " + " -> ".join(cycle))

    by_id = {e.id: e for e in events}
    for child, parent in subs:
        if not by_id[child].region <= by_id[parent].region:
            raise FMError("E_SUBREGION", f"event {child!r} escapes the region of {parent!r}")
    return EventGraph(events, edges, subs, schema)


def topological_order(ids: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm; among ready events the smallest id goes first."""
    ids = list(ids)
    indegree = dict.fromkeys(ids, 0)
    adj: dict[str, list[str]] = {i: [] for i in ids}
    for a, b in edges:
        adj[a].append(b)
        indegree[b] += 1
    ready = [(event_key(i), i) for i in ids if indegree[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, node = heapq.heappop(ready)
        order.append(node)
        for nxt in adj[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, (event_key(nxt), nxt))
    if len(order) != len(ids):
        raise FMError("E_CYCLE", "chronology is not acyclic")
    return order


@dataclass(frozen=True)
class Step:
    event: str
    rep: int
    stage: StageRef

    def __str__(self) -> str:
        return f"{self.event}\t{self.rep}\t{self.stage.machine}\t{self.stage.stage.value}"


@dataclass(frozen=True)
class Trace:
    steps: tuple[Step, ...] = ()
    temporal_order: tuple[str, ...] = ()
    incomplete: bool = False

    def occurrences(self, event_id: str) -> int:
        return len({s.rep for s in self.steps if s.event == event_id})

    def dumps(self) -> str:
        lines = ["#order" + "".join("\t" + e for e in self.temporal_order)]
        if self.incomplete:
            lines.append("#incomplete")
        lines.extend(str(step) for step in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Trace:
        order: tuple[str, ...] = ()
        incomplete = False
        steps = []
        for line in text.splitlines():
            if not line:
                continue
            fields = line.split("\t")
            if fields[0] == "#order":
                order = tuple(fields[1:])
            elif fields[0] == "#incomplete":
                incomplete = True
            elif len(fields) == 4:
                steps.append(Step(fields[0], int(fields[1]), StageRef(fields[2], StageKind(fields[3]))))
            else:
                raise FMError("E_TRACE", f"malformed trace line {line!r}")
        return cls(tuple(steps), order, incomplete)


def _stage_key(stage_ref: StageRef):
    return (stage_ref.machine, stage_ref.stage.rank)


def check_graph(graph: EventGraph, schema: Schema) -> None:
    for event in graph.events:
        try:
            check_region(schema, event.region)
        except FMError as exc:
            raise FMError("E_GRAPH", f"event {event.id!r}: {exc.message}") from None


def walk(schema: Schema, region: Region) -> list[StageRef]:
    """One occurrence of a region: depth-first over region flows, firing triggers.

    Sources are region stages with no inbound region flow and not reached by a
    trigger from inside the region. Triggered walks run after the walk that
    fired them; each trigger fires at most once per occurrence.
    """
    succ: dict[StageRef, list[StageRef]] = {s: [] for s in region.stages}
    inbound: set[StageRef] = set()
    for flow_id in region.flows:
        flow = schema.flow(flow_id)
        succ[flow.source].append(flow.target)
        inbound.add(flow.target)
    for targets in succ.values():
        targets.sort(key=_stage_key)

    fired_by: dict[StageRef, list] = {}
    for trigger in sorted(schema.triggers):
        fired_by.setdefault(trigger.source, []).append(trigger)
        if trigger.source in region.stages and trigger.target in region.stages:
            inbound.add(trigger.target)

    machine_succ: dict[StageRef, list[StageRef]] = {}
    for flow in schema.flows:
        if flow.source.machine == flow.target.machine:
            machine_succ.setdefault(flow.source, []).append(flow.target)
    for targets in machine_succ.values():
        targets.sort(key=_stage_key)

    steps: list[StageRef] = []
    visited: set[StageRef] = set()
    fired: set[str] = set()
    queue: deque[StageRef] = deque()

    def dfs(start: StageRef) -> None:
        inside = start in region.stages
        stack = [start]
        while stack:
            node = stack.pop()
            if node in visited:
                continue
            visited.add(node)
            steps.append(node)
            for trigger in fired_by.get(node, ()):
                if trigger.id not in fired:
                    fired.add(trigger.id)
                    queue.append(trigger.target)
            nexts = succ.get(node, ()) if inside else machine_succ.get(node, ())
            stack.extend(reversed([n for n in nexts if n not in visited]))

    def drain() -> None:
        while queue:
            dfs(queue.popleft())

    for source in sorted((s for s in region.stages if s not in inbound), key=_stage_key):
        dfs(source)
        drain()
    # stages only reachable around a cycle
    for stage_ref in sorted(region.stages, key=_stage_key):
        if stage_ref not in visited:
            dfs(stage_ref)
            drain()
    return steps


def simulate(graph: EventGraph, schema: Schema, rep_bound: int = 3) -> Trace:
    if isinstance(rep_bound, bool) or not isinstance(rep_bound, int) or rep_bound < 1:
        raise FMError("E_REPEAT", "rep_bound must be a positive integer")
    check_graph(graph, schema)
    by_id = {e.id: e for e in graph.events}
    order = topological_order(by_id, graph.edges)
    steps: list[Step] = []
    incomplete = False
    for event_id in order:
        event = by_id[event_id]
        if event.repetition is None:
            count = 1
        elif event.repetition == ONGOING:
            count = rep_bound
            incomplete = True
        else:
            count = min(event.repetition, rep_bound)
        path = walk(schema, event.region)
        for rep in range(count):
            steps.extend(Step(event_id, rep, stage_ref) for stage_ref in path)
    return Trace(tuple(steps), tuple(order), incomplete)


def operational_sequence(trace: Trace, event_id: str) -> list[StageRef]:
    if event_id not in trace.temporal_order:
        raise FMError("E_NOEVENT", f"event {event_id!r} does not occur in the trace")
    return [s.stage for s in trace.steps if s.event == event_id and s.rep == 0]


def has_create(event: Event) -> bool:
    return any(s.stage is CREATE for s in event.region.stages)
