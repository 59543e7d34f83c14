"""Static flowthing schema: spheres, machines, flows, triggers, and their checks."""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FMError(Exception):
    """Raised by library operations; ``code`` is a stable machine-readable tag."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message


@functools.total_ordering
class StageKind(enum.Enum):
    CREATE = "Create"
    RECEIVE = "Receive"
    PROCESS = "Process"
    RELEASE = "Release"
    TRANSFER = "Transfer"

    @property
    def rank(self) -> int:
        return _STAGE_RANK[self]

    def __lt__(self, other):
        if not isinstance(other, StageKind):
            return NotImplemented
        return self.rank < other.rank

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> StageKind:
        try:
            return cls(name)
        except ValueError:
            raise FMError("E_STAGE", f"unknown stage kind {name!r}") from None


_STAGE_RANK = {kind: i for i, kind in enumerate(StageKind)}

CREATE = StageKind.CREATE
RECEIVE = StageKind.RECEIVE
PROCESS = StageKind.PROCESS
RELEASE = StageKind.RELEASE
TRANSFER = StageKind.TRANSFER

# Legal intra-machine flow pairs.
ADJACENCY = frozenset(
    {
        (TRANSFER, RECEIVE),
        (RECEIVE, PROCESS),
        (RECEIVE, RELEASE),
        (PROCESS, RELEASE),
        (CREATE, PROCESS),
        (CREATE, RELEASE),
        (RELEASE, TRANSFER),
    }
)


def adjacency_allowed(source: StageKind, target: StageKind, same_machine: bool) -> bool:
    if same_machine:
        return (source, target) in ADJACENCY
    return source is TRANSFER and target is TRANSFER


def stage_set(stages: Iterable[StageKind | str]) -> tuple[StageKind, ...]:
    kinds = {s if isinstance(s, StageKind) else StageKind.parse(s) for s in stages}
    return tuple(sorted(kinds))


class StageRef(NamedTuple):
    machine: str
    stage: StageKind

    def __str__(self) -> str:
        return f"{self.machine}.{self.stage.value}"


def ref(text_or_machine: str, stage: StageKind | str | None = None) -> StageRef:
    """Build a StageRef from ``"machine.Stage"`` or from two parts."""
    if stage is None:
        machine, _, stage = text_or_machine.rpartition(".")
    else:
        machine = text_or_machine
    if not isinstance(stage, StageKind):
        stage = StageKind.parse(stage)
    return StageRef(machine, stage)


@dataclass(frozen=True, order=True)
class Sphere:
    id: str
    label: str
    parent: str | None = None


@dataclass(frozen=True, order=True)
class Machine:
    id: str
    thing: str
    sphere: str
    stages: tuple[StageKind, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stages", stage_set(self.stages))


@dataclass(frozen=True, order=True)
class Flow:
    id: str
    source: StageRef
    target: StageRef


@dataclass(frozen=True, order=True)
class Trigger:
    id: str
    source: StageRef
    target: StageRef


@dataclass(frozen=True, order=True)
class Diagnostic:
    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}\t{self.location}\t{self.message}"


@dataclass(frozen=True, eq=False)
class Schema:
    """A static FM description.

    Collections keep the order they were given in; equality treats them as
    multisets, so two schemas listing the same elements differently are equal.
    """

    spheres: tuple[Sphere, ...] = ()
    machines: tuple[Machine, ...] = ()
    flows: tuple[Flow, ...] = ()
    triggers: tuple[Trigger, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("spheres", "machines", "flows", "triggers"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def _key(self):
        return (
            tuple(sorted(self.spheres, key=_sphere_key)),
            tuple(sorted(self.machines)),
            tuple(sorted(self.flows)),
            tuple(sorted(self.triggers)),
        )

    def __eq__(self, other):
        if not isinstance(other, Schema):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _lookup(self):
        if self._index is None:
            index = {
                "sphere": {s.id: s for s in reversed(self.spheres)},
                "machine": {m.id: m for m in reversed(self.machines)},
                "flow": {f.id: f for f in reversed(self.flows)},
                "trigger": {t.id: t for t in reversed(self.triggers)},
            }
            object.__setattr__(self, "_index", index)
        return self._index

    def sphere(self, sphere_id: str) -> Sphere | None:
        return self._lookup()["sphere"].get(sphere_id)

    def machine(self, machine_id: str) -> Machine | None:
        return self._lookup()["machine"].get(machine_id)

    def flow(self, flow_id: str) -> Flow | None:
        return self._lookup()["flow"].get(flow_id)

    def children(self, sphere_id: str | None) -> list[Sphere]:
        return sorted(s for s in self.spheres if s.parent == sphere_id)

    def machines_in(self, sphere_id: str) -> list[Machine]:
        return sorted(m for m in self.machines if m.sphere == sphere_id)

    def has_stage(self, stage_ref: StageRef) -> bool:
        machine = self.machine(stage_ref.machine)
        return machine is not None and stage_ref.stage in machine.stages

    def stage_refs(self) -> list[StageRef]:
        return sorted(StageRef(m.id, s) for m in self.machines for s in m.stages)

    def ancestors(self, sphere_id: str) -> list[str]:
        """Sphere ids from ``sphere_id`` up to its root (cycle-safe)."""
        chain, seen = [], set()
        current = sphere_id
        while current is not None and current not in seen:
            seen.add(current)
            chain.append(current)
            sphere = self.sphere(current)
            current = sphere.parent if sphere else None
        return chain


def _sphere_key(sphere: Sphere):
    return (sphere.id, sphere.label, sphere.parent or "")


def build(spheres=(), machines=(), flows=(), triggers=()) -> Schema:
    return Schema(tuple(spheres), tuple(machines), tuple(flows), tuple(triggers))


def validate(schema: Schema) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    seen: dict[str, int] = {}
    for element in (*schema.spheres, *schema.machines, *schema.flows, *schema.triggers):
        seen[element.id] = seen.get(element.id, 0) + 1
    for element_id, count in seen.items():
        if count > 1:
            diags.append(Diagnostic("E_DUP_ID", element_id, f"id declared {count} times"))

    for sphere in schema.spheres:
        if sphere.parent is not None and schema.sphere(sphere.parent) is None:
            diags.append(Diagnostic("E_REF", sphere.id, f"unknown parent sphere {sphere.parent!r}"))
    diags.extend(_sphere_cycles(schema))

    for machine in schema.machines:
        if schema.sphere(machine.sphere) is None:
            diags.append(Diagnostic("E_REF", machine.id, f"unknown sphere {machine.sphere!r}"))
        if not machine.stages:
            diags.append(Diagnostic("E_REF", machine.id, "machine has no stages"))

    for flow in schema.flows:
        missing = [r for r in (flow.source, flow.target) if not schema.has_stage(r)]
        if missing:
            diags.append(
                Diagnostic("E_REF", flow.id, "unknown stage " + ", ".join(map(str, missing)))
            )
            continue
        same = flow.source.machine == flow.target.machine
        if adjacency_allowed(flow.source.stage, flow.target.stage, same):
            continue
        code = "E_ADJ" if same else "E_XFER"
        diags.append(Diagnostic(code, flow.id, f"illegal flow {flow.source} -> {flow.target}"))

    for trigger in schema.triggers:
        missing = [r for r in (trigger.source, trigger.target) if not schema.has_stage(r)]
        if missing:
            diags.append(
                Diagnostic("E_REF", trigger.id, "unknown stage " + ", ".join(map(str, missing)))
            )
        elif trigger.source == trigger.target:
            diags.append(Diagnostic("E_ADJ", trigger.id, "trigger loops on one stage"))

    return sorted(set(diags))


def _sphere_cycles(schema: Schema) -> list[Diagnostic]:
    parent = {s.id: s.parent for s in schema.spheres}
    reported: set[frozenset] = set()
    diags = []
    for start in sorted(parent):
        path, node = [], start
        while node is not None and node in parent and node not in path:
            path.append(node)
            node = parent[node]
        if node is not None and node in path:
            cycle = frozenset(path[path.index(node):])
            if cycle not in reported:
                reported.add(cycle)
                members = sorted(cycle)
                diags.append(
                    Diagnostic("E_SPHERE_CYCLE", members[0], "sphere cycle " + " -> ".join(members))
                )
    return diags


def ensure_valid(schema: Schema) -> None:
    diags = validate(schema)
    if diags:
        raise FMError("E_INVALID", "; ".join(str(d) for d in diags[:5]))


def canonicalize(schema: Schema) -> Schema:
    """Return the schema with every collection sorted by id.

    Ids are kept as declared; two schemas with the same elements in different
    orders canonicalize to identical values.
    """
    ensure_valid(schema)
    return Schema(
        tuple(sorted(schema.spheres, key=_sphere_key)),
        tuple(sorted(schema.machines)),
        tuple(sorted(schema.flows)),
        tuple(sorted(schema.triggers)),
    )


def is_canonical(schema: Schema) -> bool:
    return (
        list(schema.spheres) == sorted(schema.spheres, key=_sphere_key)
        and list(schema.machines) == sorted(schema.machines)
        and list(schema.flows) == sorted(schema.flows)
        and list(schema.triggers) == sorted(schema.triggers)
    )
