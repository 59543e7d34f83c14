"""Shared fixtures data, random generators, and brute-force oracles for the tests.

Nothing here imports the simulation or validation internals it is used to
check; the oracles are written from the rules directly.
"""

from __future__ import annotations

import itertools
import random
import re
from importlib import resources
from pathlib import Path

from flowthing.core import Flow, Machine, Schema, Sphere, StageKind, StageRef, Trigger
from flowthing.events import Event, Region

CORPUS = Path(str(resources.files("flowthing").joinpath("corpus")))

# One file per figure; 13 has three variants, 18 and 20 three each.
GOLDEN_STEMS = [
    "fig04_put",
    "fig05_remove",
    "fig07_send",
    "fig08_push",
    "fig09_lend",
    "fig10_learn",
    "fig11_hold",
    "fig12_hide",
    "fig13a_warn",
    "fig13b_warn_to",
    "fig13c_warn_against",
    "fig14_poem",
    "fig18a_walk_present",
    "fig18b_walk_past",
    "fig18c_walk_future",
    "fig19_walk_progressive",
    "fig20a_wash_present_perfect",
    "fig20b_wash_past_perfect",
    "fig20c_wash_future_perfect",
    "fig24_email",
    "fig25_push_cart",
    "fig26_draw_circle",
]

ALL_STEMS = sorted(p.stem for p in CORPUS.glob("*.fm"))

C, RC, P, RL, T = (
    StageKind.CREATE,
    StageKind.RECEIVE,
    StageKind.PROCESS,
    StageKind.RELEASE,
    StageKind.TRANSFER,
)

# Written out by hand rather than imported, so the validator is checked
# against an independent copy of the rule.
LEGAL_SAME_MACHINE = {
    ("Transfer", "Receive"),
    ("Receive", "Process"),
    ("Receive", "Release"),
    ("Process", "Release"),
    ("Create", "Process"),
    ("Create", "Release"),
    ("Release", "Transfer"),
}


def corpus_text(stem: str, suffix: str = ".fm") -> str:
    return (CORPUS / f"{stem}{suffix}").read_text(encoding="utf-8")


def natural_key(event_id: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", event_id)]


# --- oracles -----------------------------------------------------------------


def least_linear_extension(ids, edges):
    """Lexicographically least topological order, by trying permutations in order."""
    ordered = sorted(ids, key=natural_key)
    for perm in itertools.permutations(ordered):
        pos = {node: i for i, node in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in edges):
            return list(perm)
    return None


def hamiltonian_chain(nodes, edges):
    """The unique ordering of ``nodes`` in which consecutive pairs are edges, if any."""
    found = []
    for perm in itertools.permutations(sorted(nodes)):
        if all((a, b) in edges for a, b in zip(perm, perm[1:])):
            found.append(perm)
    return found


# --- random generators -------------------------------------------------------


def random_dag(rng: random.Random, max_nodes: int = 8):
    n = rng.randint(1, max_nodes)
    pool = [str(i) for i in range(1, 13)] + ["a", "b", "x2", "x10"]
    ids = rng.sample(pool, n)
    hidden = ids[:]
    rng.shuffle(hidden)
    density = rng.random()
    edges = {
        (hidden[i], hidden[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density * 0.6
    }
    return ids, sorted(edges)


def random_label(rng: random.Random) -> str:
    alphabet = 'abcXYZ 019_-"\\{}[];:#.$\u00e9\u4e2d\u21bb\t'
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))


def random_schema(rng: random.Random, max_spheres: int = 4, max_machines: int = 5) -> Schema:
    """A well-formed schema with random nesting, flows, and triggers."""
    spheres = []
    for i in range(rng.randint(1, max_spheres)):
        parent = rng.choice([None] + [s.id for s in spheres])
        spheres.append(Sphere(f"s{i}", random_label(rng), parent))
    machines = []
    for i in range(rng.randint(1, max_machines)):
        kinds = [k for k in StageKind if rng.random() < 0.6] or [rng.choice(list(StageKind))]
        machines.append(Machine(f"m{i}", random_label(rng), rng.choice(spheres).id, tuple(kinds)))
    flows = []
    for m in machines:
        for a, b in LEGAL_SAME_MACHINE:
            if StageKind(a) in m.stages and StageKind(b) in m.stages and rng.random() < 0.5:
                flows.append(Flow(f"f{len(flows)}", StageRef(m.id, StageKind(a)), StageRef(m.id, StageKind(b))))
    carriers = [m for m in machines if T in m.stages]
    for a, b in itertools.permutations(carriers, 2):
        if rng.random() < 0.3:
            flows.append(Flow(f"f{len(flows)}", StageRef(a.id, T), StageRef(b.id, T)))
    refs = [StageRef(m.id, k) for m in machines for k in m.stages]
    triggers = []
    for _ in range(rng.randint(0, 3)):
        a, b = rng.choice(refs), rng.choice(refs)
        if a != b:
            triggers.append(Trigger(f"t{len(triggers)}", a, b))
    elements = [spheres, machines, flows, triggers]
    for group in elements:
        rng.shuffle(group)
    return Schema(*(tuple(g) for g in elements))


# --- renaming ------------------------------------------------------------------


def rename_model(schema: Schema, events, edges, subs, rng: random.Random):
    """Consistently rename every id and relabel every label."""
    used = set()

    def fresh(prefix):
        while True:
            name = prefix + "".join(rng.choice("abcdefghijklmnopqrstuvwxyz0123456789_") for _ in range(6))
            if name not in used:
                used.add(name)
                return name

    ids = {}
    for element in (*schema.spheres, *schema.machines, *schema.flows, *schema.triggers):
        ids[element.id] = fresh("n")
    ev = {e.id: fresh("e") for e in events}

    def r(stage_ref):
        return StageRef(ids[stage_ref.machine], stage_ref.stage)

    new_schema = Schema(
        tuple(Sphere(ids[s.id], random_label(rng), ids[s.parent] if s.parent else None) for s in schema.spheres),
        tuple(Machine(ids[m.id], random_label(rng), ids[m.sphere], m.stages) for m in schema.machines),
        tuple(Flow(ids[f.id], r(f.source), r(f.target)) for f in schema.flows),
        tuple(Trigger(ids[t.id], r(t.source), r(t.target)) for t in schema.triggers),
    )
    new_events = [
        Event(
            ev[e.id],
            Region(frozenset(map(r, e.region.stages)), frozenset(ids[f] for f in e.region.flows)),
            e.time,
            e.event_stages,
            e.repetition,
            random_label(rng),
            random_label(rng) if e.duration else "",
        )
        for e in events
    ]
    new_edges = [(ev[a], ev[b]) for a, b in edges]
    new_subs = [(ev[c], ev[p]) for c, p in subs]
    return new_schema, new_events, new_edges, new_subs
