"""DOT output for schemas, event overlays, and chronologies.

Visual code: spheres are clusters, each (machine, stage) pair is a node,
flows are solid edges and triggers dashed ones. Event overlays become bold
labeled clusters holding an event node, tied to the region's stages by bold
boundary edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import FMError, Schema, StageRef, canonicalize
from .events import ONGOING, Event, EventGraph, check_region, event_key


@dataclass(frozen=True)
class RenderOptions:
    show_ids: bool = False
    overlay_events: tuple[str, ...] = field(default=())
    rankdir: str = "LR"

    def __post_init__(self):
        if self.rankdir not in ("LR", "TB"):
            raise ValueError("rankdir must be 'LR' or 'TB'")
        object.__setattr__(self, "overlay_events", tuple(self.overlay_events))


def q(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "")
    return f'"{escaped}"'


def node_id(stage_ref: StageRef) -> str:
    return q(f"{stage_ref.machine}.{stage_ref.stage.value}")


def _schema_body(schema: Schema, opts: RenderOptions) -> list[str]:
    lines: list[str] = []

    def emit(sphere, depth):
        pad = "  " * depth
        lines.append(f"{pad}subgraph {q('cluster_' + sphere.id)} {{")
        lines.append(f"{pad}  label={q(sphere.label)};")
        for machine in schema.machines_in(sphere.id):
            for stage in machine.stages:
                label = f"{machine.thing}\n{stage.value}"
                if opts.show_ids:
                    label = f"{machine.id}\n{label}"
                lines.append(f"{pad}  {node_id(StageRef(machine.id, stage))} [label={q(label)}];")
        for child in schema.children(sphere.id):
            emit(child, depth + 1)
        lines.append(f"{pad}}}")

    for root in schema.children(None):
        emit(root, 1)
    for flow in schema.flows:
        attrs = "style=solid"
        if opts.show_ids:
            attrs += f", label={q(flow.id)}"
        lines.append(f"  {node_id(flow.source)} -> {node_id(flow.target)} [{attrs}];")
    for trigger in schema.triggers:
        attrs = "style=dashed"
        if opts.show_ids:
            attrs += f", label={q(trigger.id)}"
        lines.append(f"  {node_id(trigger.source)} -> {node_id(trigger.target)} [{attrs}];")
    return lines


def _digraph(name: str, rankdir: str, body: list[str]) -> str:
    lines = [f"digraph {q(name)} {{"]
    if body:
        lines.append(f"  rankdir={rankdir};")
        lines.append('  node [shape=box, fontname="Helvetica"];')
    lines.extend(body)
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_schema(schema: Schema, opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions()
    schema = canonicalize(schema)
    return _digraph("schema", opts.rankdir, _schema_body(schema, opts))


def render_events(schema: Schema, events: Iterable[Event], opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions()
    schema = canonicalize(schema)
    by_id = {e.id: e for e in events}
    overlays = []
    for event_id in opts.overlay_events:
        if event_id not in by_id:
            raise FMError("E_REGION", f"overlay names unknown event {event_id!r}")
        check_region(schema, by_id[event_id].region)
        overlays.append(by_id[event_id])
    body = _schema_body(schema, opts)
    for event in overlays:
        anchor = q(f"event:{event.id}")
        title = f"Event {event.id}" + (f": {event.label}" if event.label else "")
        body.append(f"  subgraph {q('cluster_event_' + event.id)} {{")
        body.append(f"    label={q(title)}; style=bold;")
        body.append(f"    {anchor} [shape=ellipse, style=bold, label={q(title)}];")
        body.append("  }")
        for stage_ref in sorted(event.region.stages):
            body.append(f"  {anchor} -> {node_id(stage_ref)} [style=bold, arrowhead=none];")
    return _digraph("schema", opts.rankdir, body)


def _repeat_marker(event: Event) -> str:
    if event.repetition == ONGOING:
        return "repeat \u21bb ongoing"
    return f"repeat \u21bb x{event.repetition}"


def render_chronology(graph: EventGraph, opts: RenderOptions | None = None) -> str:
    """One node per event, one edge per chronology edge.

    Sub-events sit in a cluster of their parent; repeated events get a marker
    label and a double-headed self loop.
    """
    opts = opts or RenderOptions()
    by_id = {e.id: e for e in graph.events}
    body: list[str] = []

    def emit(event_id: str, depth: int) -> None:
        event = by_id[event_id]
        pad = "  " * depth
        label = f"Event {event.id}"
        if event.label:
            label += f"\n{event.label}"
        if event.duration:
            label += f"\n({event.duration})"
        attrs = []
        if event.repeated:
            label += "\n" + _repeat_marker(event)
            attrs.append("peripheries=2")
        line = f"{pad}{q(event.id)} [label={q(label)}"
        line += "".join(", " + a for a in attrs) + "];"
        children = graph.children_of(event_id)
        if children:
            body.append(f"{pad}subgraph {q('cluster_' + event.id)} {{")
            body.append(f"{pad}  style=dotted; label={q('Event ' + event.id)};")
            body.append("  " + line)
            for child in children:
                emit(child, depth + 1)
            body.append(f"{pad}}}")
        else:
            body.append(line)

    parents = graph.parent_of
    for event in sorted(graph.events, key=lambda e: event_key(e.id)):
        if event.id not in parents:
            emit(event.id, 1)
    for a, b in graph.edges:
        body.append(f"  {q(a)} -> {q(b)};")
    for event in sorted(graph.events, key=lambda e: event_key(e.id)):
        if event.repeated:
            body.append(f"  {q(event.id)} -> {q(event.id)} [dir=both, style=bold, class=repeat];")
    return _digraph("chronology", opts.rankdir, body)
