"""Text format for event overlays and chronologies (``.events`` files).

::

    events {
      event 1 "I shot an arrow into the air" {
        flows [a1 a2]                 # region flows; their endpoints are added
        stages [I_arrow.Process]      # extra region stages
        time [Process Release Transfer] traversed [Process Release Transfer]
        machine [Process]             # the event's own stages
        repeat ongoing                # or: repeat 3
        within 0                      # parent event
        duration "half an hour"
      }
      edge 1 -> 2;
    }
"""

from __future__ import annotations

from .core import FMError, Schema, StageRef
from .dsl import ParseError, _Abort, _Bail, _Parser, quote
from .events import ONGOING, Event, EventGraph, Region, TimeMachine, build_chronology, event_key, eventize


class _EventParser(_Parser):
    def ref_list(self) -> list[StageRef]:
        self.expect("[")
        refs = []
        while not self.at("]"):
            if self.tok.kind == "eof":
                self.error("']'")
            refs.append(self.stage_ref())
        self.advance()
        return refs

    def ident_list(self) -> list[str]:
        self.expect("[")
        names = []
        while not self.at("]"):
            if self.tok.kind == "eof":
                self.error("']'")
            names.append(self.ident("flow id"))
        self.advance()
        return names

    def parse_events(self) -> tuple[list[dict], list[tuple[str, str]]]:
        entries: list[dict] = []
        edges: list[tuple[str, str]] = []
        try:
            self.expect("events")
            self.expect("{")
        except _Abort:
            raise _Bail from None
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.errors.append(ParseError(self.tok.span, "'}'", "end of input"))
                raise _Bail
            try:
                if self.at("event"):
                    entries.append(self.event_block())
                elif self.at("edge"):
                    self.advance()
                    a = self.event_id()
                    self.expect("->")
                    b = self.event_id()
                    self.expect(";")
                    edges.append((a, b))
                else:
                    self.error("'event', 'edge' or '}'")
            except _Abort:
                self.recover(0)
        self.advance()
        if self.tok.kind != "eof":
            self.errors.append(ParseError(self.tok.span, "end of input", self.tok.text))
        return entries, edges

    def event_block(self) -> dict:
        self.expect("event")
        entry = {
            "id": self.event_id(),
            "label": "",
            "flows": [],
            "stages": [],
            "present": None,
            "traversed": [],
            "machine": [],
            "repeat": None,
            "within": None,
            "duration": "",
        }
        if self.tok.kind == "string":
            entry["label"] = self.string()
        self.expect("{")
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("'}'")
            key = self.ident("event attribute")
            if key == "flows":
                entry["flows"] = self.ident_list()
            elif key == "stages":
                entry["stages"] = self.ref_list()
            elif key == "time":
                entry["present"] = self.stage_list()
                if self.at("traversed"):
                    self.advance()
                    entry["traversed"] = self.stage_list()
            elif key == "machine":
                entry["machine"] = self.stage_list()
            elif key == "repeat":
                if self.at("ongoing"):
                    self.advance()
                    entry["repeat"] = ONGOING
                else:
                    entry["repeat"] = self.integer()
            elif key == "within":
                entry["within"] = self.event_id()
            elif key == "duration":
                entry["duration"] = self.string()
            else:
                self.error("flows, stages, time, machine, repeat, within or duration", self.tokens[self.pos - 1])
        self.advance()
        return entry


def load_events(text: str | bytes, schema: Schema) -> EventGraph:
    """Parse an events file against ``schema`` into a checked EventGraph."""
    parser = _EventParser(text)
    entries, edges = parser.run(parser.parse_events)
    events = []
    parents = []
    for entry in entries:
        region = Region.closed(schema, entry["flows"], entry["stages"])
        present = entry["present"] if entry["present"] is not None else entry["traversed"] or ()
        try:
            time = TimeMachine(tuple(present), tuple(entry["traversed"]))
        except ValueError as exc:
            raise FMError("E_TIME", f"event {entry['id']!r}: {exc}") from None
        events.append(
            eventize(
                schema,
                region,
                time,
                entry["repeat"],
                event_id=entry["id"],
                event_stages=entry["machine"],
                label=entry["label"],
                duration=entry["duration"],
            )
        )
        if entry["within"] is not None:
            parents.append((entry["id"], entry["within"]))
    return build_chronology(events, edges, parents, schema)


def _stages(stages) -> str:
    return "[" + " ".join(s.value for s in stages) + "]"


def dump_events(graph: EventGraph) -> str:
    """Print a graph in the events file format; the output reloads to an equal graph."""
    parents = graph.parent_of
    lines = ["events {"]
    for event in sorted(graph.events, key=lambda e: event_key(e.id)):
        head = f"  event {event.id}"
        if event.label:
            head += f" {quote(event.label)}"
        lines.append(head + " {")
        if event.region.flows:
            lines.append("    flows [" + " ".join(sorted(event.region.flows)) + "]")
        if event.region.stages:
            lines.append("    stages [" + " ".join(str(s) for s in sorted(event.region.stages)) + "]")
        time = f"    time {_stages(event.time.stages_present)}"
        if event.time.traversed:
            time += f" traversed {_stages(event.time.traversed)}"
        lines.append(time)
        lines.append(f"    machine {_stages(event.event_stages)}")
        if event.repetition == ONGOING:
            lines.append("    repeat ongoing")
        elif event.repetition is not None:
            lines.append(f"    repeat {event.repetition}")
        if event.id in parents:
            lines.append(f"    within {parents[event.id]}")
        if event.duration:
            lines.append(f"    duration {quote(event.duration)}")
        lines.append("  }")
    for a, b in graph.edges:
        lines.append(f"  edge {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
