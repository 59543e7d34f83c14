"""Verb lexicon and Levin-class templates compiled into FM schemas."""

from __future__ import annotations

import csv
import enum
import functools
import os
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .core import FMError, Schema, StageKind, canonicalize, validate
from .dsl import parse, quote
from .events import Region, build_chronology, eventize, simulate

LEXICON_ENV = "FM_LEXICON"

DYNAMIC_STATIVE = ("Activity", "Process", "Sensation", "Momentary", "Cognition", "Perception", "Relational")


class VendlerCategory(str, enum.Enum):
    ACTIVITY = "Activity"
    ACCOMPLISHMENT = "Accomplishment"
    ACHIEVEMENT = "Achievement"
    STATE = "State"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class VerbEntry:
    verb: str
    verb_class: str | None
    dynamic_stative: str
    vendler_default: VendlerCategory | None
    example: tuple[tuple[str, str], ...] = ()

    @property
    def name(self) -> str | None:
        return self.verb_class

    @property
    def example_binding(self) -> dict[str, str]:
        return dict(self.example)


@dataclass(frozen=True)
class VerbTemplate:
    verb_class: str
    variant: str
    roles: tuple[str, ...]
    signature: tuple[StageKind, ...]
    text: str
    grammatical: bool = True

    @functools.cached_property
    def theme_machines(self) -> frozenset[str]:
        """Machines carrying the theme, read from the raw template."""
        raw = parse(self.text)
        return frozenset(m.id for m in raw.machines if m.thing == "${theme}")


def _data_path(name: str):
    return resources.files("flowthing").joinpath("data", name)


def _read_tsv(source) -> list[dict[str, str]]:
    with source.open("r", encoding="utf-8", newline="") as fh:
        return [row for row in csv.DictReader(fh, delimiter="\t") if row.get("verb", row.get("class"))]


def _parse_binding(text: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for item in filter(None, (text or "").split(";")):
        key, _, value = item.partition("=")
        pairs.append((key.strip(), value.strip()))
    return tuple(pairs)


def _optional(value: str | None) -> str | None:
    value = (value or "").strip()
    return None if value in ("", "-") else value


class Lexicon:
    """Verb entries plus the class templates they compile to."""

    def __init__(self, entries: Mapping[str, VerbEntry], templates: Mapping[tuple[str, str], VerbTemplate]):
        self.entries = dict(entries)
        self.templates = dict(templates)

    @classmethod
    def load(cls, path: str | os.PathLike | None = None) -> Lexicon:
        if path is None:
            path = os.environ.get(LEXICON_ENV) or None
        source = Path(path) if path is not None else _data_path("lexicon.tsv")
        try:
            rows = _read_tsv(source)
        except OSError as exc:
            raise FMError("E_IO", f"cannot read lexicon {source}: {exc}") from None
        entries = {}
        for row in rows:
            verb = row["verb"].strip()
            tag = row["dynamic_stative"].strip()
            if tag not in DYNAMIC_STATIVE:
                raise FMError("E_LEXICON", f"{verb!r}: unknown dynamic/stative tag {tag!r}")
            vendler = _optional(row.get("vendler_default"))
            entries[verb] = VerbEntry(
                verb,
                _optional(row["class"]),
                tag,
                VendlerCategory(vendler) if vendler else None,
                _parse_binding(row.get("example", "")),
            )
        return cls(entries, _load_templates())

    def lookup(self, verb: str) -> VerbEntry:
        entry = self.entries.get(verb.strip().lower())
        if entry is None:
            raise FMError("E_UNKNOWN_VERB", f"{verb!r} is not in the lexicon")
        return entry

    def template(self, verb_class: str, variant: str = "default") -> VerbTemplate:
        try:
            return self.templates[(verb_class, variant)]
        except KeyError:
            raise FMError("E_UNKNOWN_CLASS", f"no template for {verb_class}/{variant}") from None

    @property
    def classes(self) -> list[str]:
        return sorted({c for c, _ in self.templates})


@functools.lru_cache(maxsize=None)
def _load_templates() -> dict[tuple[str, str], VerbTemplate]:
    templates = {}
    for row in _read_tsv(_data_path("classes.tsv")):
        text = _data_path("templates").joinpath(row["template"]).read_text(encoding="utf-8")
        key = (row["class"], row["variant"])
        templates[key] = VerbTemplate(
            row["class"],
            row["variant"],
            tuple(r.strip() for r in row["roles"].split(",")),
            tuple(StageKind(s.strip()) for s in row["signature"].split(",")),
            text,
            row["grammatical"].strip() == "yes",
        )
    return templates


@functools.lru_cache(maxsize=None)
def default_lexicon() -> Lexicon:
    return Lexicon.load(_data_path("lexicon.tsv"))


def lookup(verb: str, lexicon: Lexicon | None = None) -> VerbEntry:
    return (lexicon or default_lexicon()).lookup(verb)


def signature(verb_class: str, variant: str = "default", lexicon: Lexicon | None = None) -> list[StageKind]:
    return list((lexicon or default_lexicon()).template(verb_class, variant).signature)


def instantiate(
    verb_class: str,
    binding: Mapping[str, str],
    variant: str = "default",
    lexicon: Lexicon | None = None,
) -> Schema:
    template = (lexicon or default_lexicon()).template(verb_class, variant)
    missing = [r for r in template.roles if r not in binding]
    extra = sorted(set(binding) - set(template.roles))
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing " + ", ".join(missing))
        if extra:
            parts.append("unexpected " + ", ".join(extra))
        raise FMError("E_BINDING", f"{verb_class}: " + "; ".join(parts))
    # placeholders sit inside quoted labels
    escaped = {role: quote(str(label))[1:-1] for role, label in binding.items()}
    schema = parse(string.Template(template.text).substitute(escaped))
    diags = validate(schema)
    if diags:
        raise FMError("E_TEMPLATE", f"{verb_class}/{variant} template is ill-formed: {diags[0]}")
    return canonicalize(schema)


def theme_walk(schema: Schema, theme_machines) -> list[StageKind]:
    """Stages the theme passes through when the whole schema runs as one event."""
    event = eventize(schema, Region.whole(schema))
    trace = simulate(build_chronology([event]), schema, rep_bound=1)
    return [s.stage.stage for s in trace.steps if s.stage.machine in theme_machines]
