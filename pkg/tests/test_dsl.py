import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowthing import DSLSyntaxError, FMError, Schema, from_json, parse, print_schema, to_json
from flowthing.dsl import MAX_DEPTH, load_schema
from helpers import CORPUS, random_schema

SMALL = """
# comment
schema {
  sphere a "Alpha \\"A\\"" {
    machine m thing "book" stages [Release Transfer]
    sphere b "Beta" { machine n thing "book" stages [Transfer Receive] }
  }
  flow f1: m.Release -> m.Transfer;   flow f2: m.Transfer -> n.Transfer;
  trigger t: n.Receive ~> m.Release;
}
"""


def test_parse_small():
    schema = parse(SMALL)
    assert schema.sphere("a").label == 'Alpha "A"'
    assert schema.sphere("b").parent == "a"
    assert {f.id for f in schema.flows} == {"f1", "f2"}
    assert schema.triggers[0].source.machine == "n"
    assert parse(SMALL.encode()) == schema


def test_empty_schema():
    assert print_schema(Schema()) == "schema {}\n"
    assert parse("schema {}") == Schema()


def errors_of(text):
    with pytest.raises(DSLSyntaxError) as err:
        parse(text)
    assert err.value.code == "E_PARSE"
    return err.value.errors


def test_error_positions():
    (e,) = errors_of("schema {\n  sphere a \"A\" {\n    machine m thing \"x\" stages [Jump]\n  }\n}")
    assert (e.span.line, e.span.column) == (3, 33)
    assert e.found == "Jump"
    errs = errors_of('schema { sphere a "open\n }')
    assert "closing" in errs[0].expected


def test_error_cap_and_recovery():
    text = "schema {\n" + "flow ;\n" * 40 + "}"
    assert len(errors_of(text)) == 10
    errs = errors_of('schema { flow f1 m.Create -> m.Process; sphere a "A" { } flow f2: m.X -> m.Y; }')
    assert len(errs) == 2


def test_bad_utf8_and_depth():
    (e,) = errors_of(b"schema {\n \xff }")
    assert (e.span.line, e.expected) == (2, "UTF-8 text")
    deep = "schema {" + 'sphere s "x" {' * (MAX_DEPTH + 5) + "}" * (MAX_DEPTH + 6)
    errs = errors_of(deep)
    assert errs and all(isinstance(x.span.line, int) for x in errs)


def test_json_errors():
    with pytest.raises(FMError) as err:
        from_json("{nope")
    assert err.value.code == "E_JSON"
    doc = json.loads(to_json(parse(SMALL)))
    doc["schema_version"] = "99"
    with pytest.raises(FMError) as err:
        from_json(json.dumps(doc))
    assert err.value.code == "E_VERSION"


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_random_round_trip(seed):
    schema = random_schema(random.Random(seed))
    text = print_schema(schema)
    again = parse(text)
    assert again == schema
    assert print_schema(again) == text
    assert from_json(to_json(schema)) == schema


def test_load_schema_json_and_text(tmp_path):
    schema = load_schema(CORPUS / "fig04_put.fm")
    path = tmp_path / "put.fm.json"
    path.write_text(to_json(schema))
    assert load_schema(path) == schema


def test_unclosed_stage_list():
    errs = errors_of('schema { sphere I "I" { machine book thing "book" stages [Release Transfer')
    assert errs[0].expected == "']'"
    assert errs[0].found == "end of input"
