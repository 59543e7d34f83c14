import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowthing import FMError, Flow, Machine, Schema, Sphere, StageKind, Trigger, canonicalize, ref, validate
from flowthing.core import adjacency_allowed, is_canonical
from helpers import LEGAL_SAME_MACHINE, random_schema


def codes(schema):
    return [d.code for d in validate(schema)]


def test_stage_order_and_parse():
    assert sorted(StageKind, reverse=True)[0] is StageKind.TRANSFER
    assert [k.value for k in sorted(StageKind)] == ["Create", "Receive", "Process", "Release", "Transfer"]
    with pytest.raises(FMError) as err:
        StageKind.parse("Explode")
    assert err.value.code == "E_STAGE"
    assert str(ref("a.b.Create")) == "a.b.Create"


@pytest.mark.parametrize("a,b", list(itertools.product(StageKind, repeat=2)))
def test_adjacency_matches_table(a, b):
    assert adjacency_allowed(a, b, True) == ((a.value, b.value) in LEGAL_SAME_MACHINE)
    assert adjacency_allowed(a, b, False) == (a is b is StageKind.TRANSFER)


def _base(**extra):
    spheres = [Sphere("s", "S"), Sphere("u", "U")]
    machines = [Machine("m", "x", "s", ("Create", "Release", "Transfer", "Receive")), Machine("n", "x", "u", ("Transfer", "Receive"))]
    return Schema(tuple(spheres + extra.get("spheres", [])), tuple(machines + extra.get("machines", [])),
                  tuple(extra.get("flows", [])), tuple(extra.get("triggers", [])))


def test_each_error_code():
    assert codes(_base()) == []
    assert codes(_base(flows=[Flow("f", ref("m.Transfer"), ref("m.Create"))])) == ["E_ADJ"]
    assert codes(_base(flows=[Flow("f", ref("m.Release"), ref("n.Transfer"))])) == ["E_XFER"]
    assert codes(_base(flows=[Flow("f", ref("m.Process"), ref("m.Release"))])) == ["E_REF"]
    assert codes(_base(machines=[Machine("z", "x", "nowhere", ("Create",))])) == ["E_REF"]
    assert codes(_base(machines=[Machine("z", "x", "s", ())])) == ["E_REF"]
    assert codes(_base(triggers=[Trigger("t", ref("m.Create"), ref("q.Create"))])) == ["E_REF"]
    assert codes(_base(triggers=[Trigger("t", ref("m.Create"), ref("m.Create"))])) == ["E_ADJ"]
    assert codes(_base(machines=[Machine("s", "x", "s", ("Create",))])) == ["E_DUP_ID"]
    cyc = _base(spheres=[Sphere("a", "A", "b"), Sphere("b", "B", "a")])
    assert codes(cyc) == ["E_SPHERE_CYCLE"]


def test_diagnostics_sorted_and_deduplicated():
    schema = _base(
        flows=[Flow("z", ref("m.Transfer"), ref("m.Create")), Flow("a", ref("m.Release"), ref("n.Transfer"))],
        machines=[Machine("s", "x", "s", ("Create",))],
    )
    diags = validate(schema)
    assert diags == sorted(diags)
    assert [d.code for d in diags] == ["E_ADJ", "E_DUP_ID", "E_XFER"]
    assert str(diags[0]).split("\t")[:2] == ["E_ADJ", "z"]


def test_canonicalize_rejects_invalid():
    with pytest.raises(FMError) as err:
        canonicalize(_base(flows=[Flow("f", ref("m.Transfer"), ref("m.Create"))]))
    assert err.value.code == "E_INVALID"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_random_schemas_are_valid_and_canonical(seed):
    rng = random.Random(seed)
    schema = random_schema(rng)
    assert validate(schema) == []
    canon = canonicalize(schema)
    assert is_canonical(canon)
    assert canon == schema and hash(canon) == hash(schema)
    assert canonicalize(canon) == canon
    assert tuple(canonicalize(canon).machines) == canon.machines


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(list(StageKind)), st.sampled_from(list(StageKind)), st.booleans())
def test_validator_agrees_with_table(seed, a, b, same):
    rng = random.Random(seed)
    schema = random_schema(rng)
    machines = list(schema.machines)
    src = Machine("zz_src", "x", schema.spheres[0].id, tuple(StageKind))
    dst = src if same else Machine("zz_dst", "x", schema.spheres[0].id, tuple(StageKind))
    extra = {src, dst}
    flow = Flow("zz_flow", ref(src.id, a), ref(dst.id, b))
    mutated = Schema(schema.spheres, tuple(machines) + tuple(sorted(extra)), schema.flows + (flow,), schema.triggers)
    if same:
        expected = [] if (a.value, b.value) in LEGAL_SAME_MACHINE else ["E_ADJ"]
    else:
        expected = [] if a is b is StageKind.TRANSFER else ["E_XFER"]
    assert codes(mutated) == expected
