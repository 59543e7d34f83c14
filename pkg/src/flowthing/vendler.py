"""Structural Activity/Accomplishment classification of event graphs."""

from __future__ import annotations

from .events import EventGraph, has_create, is_complete
from .lexicon import VendlerCategory


def terminal_point(graph: EventGraph, repeated_id: str) -> str | None:
    """The event that closes a repetition, if any.

    A repetition has a set terminal point when a completed event that creates
    something either encloses it (the repetition accumulates into that
    creation) or follows it in the chronology (it repeats until the creation).
    """
    candidates = set(graph.ancestors(repeated_id)) | graph.reachable_from(repeated_id)
    for event in graph.events:
        if event.id in candidates and not event.repeated and has_create(event) and is_complete(event):
            return event.id
    return None


def classify_vendler(graph: EventGraph) -> VendlerCategory | None:
    """Accomplishment, Activity, or None when neither rule applies.

    Achievements and States have no structural test and are never returned.
    """
    repeated = [e.id for e in graph.events if e.repeated]
    if not repeated:
        return None
    if any(terminal_point(graph, event_id) for event_id in repeated):
        return VendlerCategory.ACCOMPLISHMENT
    return VendlerCategory.ACTIVITY
