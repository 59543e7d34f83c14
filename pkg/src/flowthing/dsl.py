"""Textual FM notation: parsing, canonical printing, and JSON interchange.

Grammar (``#`` starts a comment)::

    schema {
      sphere I "I" {
        machine I_book thing "book" stages [Release Transfer]
      }
      flow f1: I_book.Release -> I_book.Transfer;
      trigger t1: I_book.Release ~> I_book.Transfer;
    }

Parsing is purely syntactic; run :func:`flowthing.core.validate` afterwards.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator

from .core import (
    FMError,
    Flow,
    Machine,
    Schema,
    Sphere,
    StageKind,
    StageRef,
    Trigger,
    canonicalize,
)

MAX_ERRORS = 10
MAX_DEPTH = 200
SCHEMA_VERSION = "1"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>->|~>|[{}\[\]:;.,])
    """,
    re.VERBOSE,
)
_STAGE_NAMES = {kind.value for kind in StageKind}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    expected: str
    found: str

    def __str__(self) -> str:
        return (
            f"{self.span.line}:{self.span.column}: expected {self.expected}, "
            f"found {self.found!r}"
        )


class DSLSyntaxError(FMError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("E_PARSE", "; ".join(str(e) for e in errors))


@dataclass(frozen=True)
class Token:
    kind: str  # ident, number, string, punct, eof
    text: str
    span: SourceSpan


class _Bail(Exception):
    pass


class _Abort(Exception):
    """Skip the current statement."""


def _decode(text: str | bytes) -> str:
    if isinstance(text, str):
        return text
    try:
        return text.decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = text[: exc.start].decode("utf-8")
        line = prefix.count("\n") + 1
        column = len(prefix) - (prefix.rfind("\n") + 1) + 1
        err = ParseError(SourceSpan(line, column, 1), "UTF-8 text", repr(text[exc.start : exc.start + 1]))
        raise DSLSyntaxError([err]) from None


def tokenize(text: str, errors: list[ParseError]) -> list[Token]:
    return list(iter_tokens(text, errors))


def iter_tokens(text: str, errors: list[ParseError]) -> Iterator[Token]:
    """Lazy tokenizer; raises _Bail once ``errors`` reaches the cap."""
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(line, pos - line_start + 1, 1)
            ch = text[pos]
            expected = "closing '\"'" if ch == '"' else "a token"
            errors.append(ParseError(span, expected, ch))
            if len(errors) >= MAX_ERRORS:
                raise _Bail
            if ch == '"':
                # unterminated label: resume after the line
                nl = text.find("\n", pos)
                pos = n if nl < 0 else nl
            else:
                pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            yield Token(kind, value, SourceSpan(line, pos - line_start + 1, len(value)))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    yield Token("eof", "", SourceSpan(line, pos - line_start + 1, 0))


class _Parser:
    def __init__(self, text: str | bytes):
        self.errors: list[ParseError] = []
        self.text = _decode(text)
        self._pending = iter_tokens(self.text, self.errors)
        self.tokens: list[Token] = []
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        # tokens are pulled on demand so a bailed parse stops lexing too
        while len(self.tokens) <= self.pos:
            self.tokens.append(next(self._pending))
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, expected: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text if tok.kind != "eof" else "end of input"
        self.errors.append(ParseError(tok.span, expected, found))
        if len(self.errors) >= MAX_ERRORS:
            raise _Bail
        raise _Abort

    def at(self, text: str) -> bool:
        tok = self.tok
        return tok.kind in ("punct", "ident") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"'{text}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            self.error(what)
        return self.advance().text

    def event_id(self) -> str:
        if self.tok.kind not in ("ident", "number"):
            self.error("event id")
        return self.advance().text

    def integer(self) -> int:
        if self.tok.kind != "number":
            self.error("number")
        return int(self.advance().text)

    def string(self) -> str:
        tok = self.tok
        if tok.kind != "string":
            self.error("string label")
        try:
            value = json.loads(tok.text, strict=False)
        except ValueError:
            self.error("valid string escape")
        self.advance()
        return value

    def stage(self) -> StageKind:
        tok = self.tok
        if tok.kind != "ident" or tok.text not in _STAGE_NAMES:
            self.error("stage kind (Create, Process, Receive, Release, Transfer)")
        self.advance()
        return StageKind(tok.text)

    def stage_list(self) -> list[StageKind]:
        self.expect("[")
        stages = []
        while not self.at("]"):
            if self.tok.kind == "eof":
                self.error("']'")
            stages.append(self.stage())
        self.advance()
        return stages

    def stage_ref(self) -> StageRef:
        machine = self.ident("machine id")
        self.expect(".")
        return StageRef(machine, self.stage())

    def recover(self, depth: int) -> None:
        """Skip to the next statement boundary at the current nesting depth."""
        start = self.pos
        level = 0
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind == "punct":
                if tok.text == ";" and level == 0:
                    self.advance()
                    return
                if tok.text in "{[":
                    level += 1
                elif tok.text == "]" and level == 0:
                    # closes the list the error occurred in
                    pass
                elif tok.text in "}]":
                    if level == 0:
                        if self.pos == start:
                            self.advance()
                        return
                    level -= 1
                    if level == 0 and tok.text == "}":
                        self.advance()
                        return
            elif level == 0 and tok.kind == "ident" and self.pos != start and tok.text in (
                "sphere",
                "machine",
                "flow",
                "trigger",
                "event",
                "edge",
            ):
                return
            self.advance()

    # schema grammar

    def parse_schema(self) -> Schema:
        spheres: list[Sphere] = []
        machines: list[Machine] = []
        flows: list[Flow] = []
        triggers: list[Trigger] = []
        try:
            self.expect("schema")
            self.expect("{")
        except _Abort:
            raise _Bail from None
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.errors.append(ParseError(self.tok.span, "'}'", "end of input"))
                raise _Bail
            try:
                if self.at("sphere"):
                    self.sphere_block(None, spheres, machines, 1)
                elif self.at("flow"):
                    self.advance()
                    flow_id = self.ident("flow id")
                    self.expect(":")
                    source = self.stage_ref()
                    self.expect("->")
                    target = self.stage_ref()
                    self.expect(";")
                    flows.append(Flow(flow_id, source, target))
                elif self.at("trigger"):
                    self.advance()
                    trigger_id = self.ident("trigger id")
                    self.expect(":")
                    source = self.stage_ref()
                    self.expect("~>")
                    target = self.stage_ref()
                    self.expect(";")
                    triggers.append(Trigger(trigger_id, source, target))
                else:
                    self.error("'sphere', 'flow', 'trigger' or '}'")
            except _Abort:
                self.recover(0)
        self.advance()
        if self.tok.kind != "eof":
            self.errors.append(ParseError(self.tok.span, "end of input", self.tok.text))
        return Schema(tuple(spheres), tuple(machines), tuple(flows), tuple(triggers))

    def sphere_block(self, parent, spheres, machines, depth) -> None:
        if depth > MAX_DEPTH:
            self.error(f"sphere nesting at most {MAX_DEPTH} deep")
        self.expect("sphere")
        sphere_id = self.ident("sphere id")
        label = self.string()
        self.expect("{")
        spheres.append(Sphere(sphere_id, label, parent))
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("'}'")
            try:
                if self.at("sphere"):
                    self.sphere_block(sphere_id, spheres, machines, depth + 1)
                elif self.at("machine"):
                    self.advance()
                    machine_id = self.ident("machine id")
                    self.expect("thing")
                    thing = self.string()
                    self.expect("stages")
                    stages = self.stage_list()
                    machines.append(Machine(machine_id, thing, sphere_id, tuple(stages)))
                else:
                    self.error("'sphere', 'machine' or '}'")
            except _Abort:
                if self.tok.kind == "eof":
                    raise
                self.recover(depth)
        self.advance()

    def run(self, rule):
        result = None
        try:
            result = rule()
        except _Bail:
            pass
        if self.errors:
            raise DSLSyntaxError(self.errors[:MAX_ERRORS])
        return result


def parse(text: str | bytes) -> Schema:
    """Parse FM text into an unvalidated Schema.

    Raises DSLSyntaxError carrying at most ten ParseErrors.
    """
    parser = _Parser(text)
    return parser.run(parser.parse_schema)


def quote(label: str) -> str:
    return json.dumps(label, ensure_ascii=False)


def print_schema(schema: Schema) -> str:
    schema = canonicalize(schema)
    if not (schema.spheres or schema.flows or schema.triggers):
        return "schema {}\n"
    lines = ["schema {"]

    def emit_sphere(sphere: Sphere, indent: int) -> None:
        pad = "  " * indent
        machines = schema.machines_in(sphere.id)
        children = schema.children(sphere.id)
        if not machines and not children:
            lines.append(f"{pad}sphere {sphere.id} {quote(sphere.label)} {{}}")
            return
        lines.append(f"{pad}sphere {sphere.id} {quote(sphere.label)} {{")
        for m in machines:
            stages = " ".join(s.value for s in m.stages)
            lines.append(f"{pad}  machine {m.id} thing {quote(m.thing)} stages [{stages}]")
        for child in children:
            emit_sphere(child, indent + 1)
        lines.append(f"{pad}}}")

    for root in schema.children(None):
        emit_sphere(root, 1)
    for f in schema.flows:
        lines.append(f"  flow {f.id}: {f.source} -> {f.target};")
    for t in schema.triggers:
        lines.append(f"  trigger {t.id}: {t.source} ~> {t.target};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# JSON interchange


def _ref_json(r: StageRef) -> dict:
    return {"machine": r.machine, "stage": r.stage.value}


def to_json(schema: Schema) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "spheres": [
            {"id": s.id, "label": s.label, "parent": s.parent} for s in schema.spheres
        ],
        "machines": [
            {
                "id": m.id,
                "thing": m.thing,
                "sphere": m.sphere,
                "stages": [s.value for s in m.stages],
            }
            for m in schema.machines
        ],
        "flows": [
            {"id": f.id, "from": _ref_json(f.source), "to": _ref_json(f.target)}
            for f in schema.flows
        ],
        "triggers": [
            {"id": t.id, "from": _ref_json(t.source), "to": _ref_json(t.target)}
            for t in schema.triggers
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def from_json(text: str | bytes) -> Schema:
    try:
        doc = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise FMError("E_JSON", str(exc)) from None
    if not isinstance(doc, dict):
        raise FMError("E_JSON", "top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise FMError("E_VERSION", f"unsupported schema_version {version!r}")

    def ref_of(obj) -> StageRef:
        return StageRef(_str(obj["machine"]), StageKind(obj["stage"]))

    try:
        spheres = [
            Sphere(_str(s["id"]), _str(s["label"]), None if s.get("parent") is None else _str(s["parent"]))
            for s in doc["spheres"]
        ]
        machines = [
            Machine(_str(m["id"]), _str(m["thing"]), _str(m["sphere"]), tuple(StageKind(x) for x in m["stages"]))
            for m in doc["machines"]
        ]
        flows = [Flow(_str(f["id"]), ref_of(f["from"]), ref_of(f["to"])) for f in doc["flows"]]
        triggers = [
            Trigger(_str(t["id"]), ref_of(t["from"]), ref_of(t["to"])) for t in doc["triggers"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise FMError("E_JSON", f"malformed schema document: {exc}") from None
    return Schema(tuple(spheres), tuple(machines), tuple(flows), tuple(triggers))


def _str(value) -> str:
    if not isinstance(value, str):
        raise TypeError(f"expected string, got {type(value).__name__}")
    return value


def load_schema(path) -> Schema:
    """Read a ``.fm`` or ``.fm.json`` file."""
    from pathlib import Path

    path = Path(path)
    data = path.read_bytes()
    if path.name.endswith(".json"):
        return from_json(data)
    return parse(data)
