import pydot
import pytest

from flowthing import FMError, RenderOptions, Schema, load_events, parse, render_chronology, render_schema
from flowthing.render import render_events
from helpers import ALL_STEMS, CORPUS, corpus_text


def parsed(dot):
    graphs = pydot.graph_from_dot_data(dot)
    assert graphs and len(graphs) == 1
    return graphs[0]


def test_empty_schema():
    assert render_schema(Schema()) == 'digraph "schema" {\n}\n'
    parsed(render_schema(Schema()))


def test_options():
    schema = parse(corpus_text("fig04_put"))
    dot = render_schema(schema, RenderOptions(show_ids=True, rankdir="TB"))
    assert "rankdir=TB;" in dot
    assert 'label="agent_theme\\nbook\\nRelease"' in dot
    assert 'label="f1"' in dot
    with pytest.raises(ValueError):
        RenderOptions(rankdir="RL")


def test_quoting_is_safe():
    schema = parse('schema { sphere s "a \\"b\\" \\\\ {x}" { machine m thing "q\\"" stages [Create] } }')
    graph = parsed(render_schema(schema))
    assert graph.get_subgraphs()[0].get_name() == '"cluster_s"'


EVENT_STEMS = [s for s in ALL_STEMS if (CORPUS / f"{s}.events").exists()]


@pytest.mark.parametrize("stem", EVENT_STEMS)
def test_overlays_and_chronology_parse(stem):
    schema = parse(corpus_text(stem))
    graph = load_events(corpus_text(stem, ".events"), schema)
    ids = tuple(e.id for e in graph.events)
    dot = render_events(schema, graph.events, RenderOptions(overlay_events=ids))
    assert dot == render_events(schema, graph.events, RenderOptions(overlay_events=ids))
    g = parsed(dot)
    clusters = [s.get_name() for s in g.get_subgraphs()]
    for i in ids:
        assert f'"cluster_event_{i}"' in clusters
    chron = render_chronology(graph)
    assert chron == render_chronology(graph)
    parsed(chron)
    repeated = [e for e in graph.events if e.repeated]
    assert chron.count("dir=both") == len(repeated)


def test_unknown_overlay():
    schema = parse(corpus_text("fig05_remove"))
    graph = load_events(corpus_text("fig05_remove", ".events"), schema)
    with pytest.raises(FMError) as err:
        render_events(schema, graph.events, RenderOptions(overlay_events=("9",)))
    assert err.value.code == "E_REGION"


def test_chronology_nests_sub_events():
    schema = parse(corpus_text("fig19_walk_progressive"))
    graph = load_events(corpus_text("fig19_walk_progressive", ".events"), schema)
    g = parsed(render_chronology(graph))
    (cluster,) = g.get_subgraphs()
    assert cluster.get_name() == '"cluster_event"'
    assert {n.get_name() for n in cluster.get_nodes()} >= {'"event"', '"unit"'}
