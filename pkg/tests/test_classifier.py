import math
import random

import pytest
from hypothesis import given, strategies as st

from permuta.census import BUILTIN, load_entries
from permuta.classifier import (UnrecognizedDescriptor, cross_validate, forbidden_class_membership,
                                group_isomorphism, oracle_classify, pipeline_classify, recognize)
from permuta.groups import FiniteGroup, all_subgroups
from permuta.zoo import D, NoSuchParameter, construct, parse_descriptor

CENSUS = [e.descriptor for e in load_entries(BUILTIN)]


def shuffled(g, seed=0):
    """The same group with its elements renamed at random (identity kept first)."""
    rnd = random.Random(seed)
    perm = list(range(1, g.order))
    rnd.shuffle(perm)
    perm = [0] + perm if g.identity == 0 else list(range(g.order))
    inv = {p: i for i, p in enumerate(perm)}
    table = [[perm[g.table[inv[a]][inv[b]]] for b in range(g.order)] for a in range(g.order)]
    return FiniteGroup(table, g.name + "'")


def flags(text):
    r = oracle_classify(parse_descriptor(text))
    return r.planar, r.toroidal, r.projective


@pytest.mark.parametrize("text,expected", [
    ("cyclic:64", (False, True, True)),
    ("cyclic:256", (False, True, False)),
    ("semidirect:q=5,p=2,a=2,t=1", (False, True, False)),
    ("quaternion:3", (True, False, False)),
    ("sym:4", (False, False, False)),
    ("cyclic:30", (False, True, True)),
    ("ppq:p=5,q=3", (False, True, False)),
    ("alt:5", (False, False, False)),
])
def test_oracle_surface_flags(text, expected):
    assert flags(text) == expected


def test_oracle_forbidden_lists():
    assert forbidden_class_membership(D("Symmetric", 3))["k15"]
    assert forbidden_class_membership(D("Alternating", 4))["p5"]
    m = forbidden_class_membership(parse_descriptor("semidirect:q=5,p=2,a=2,t=2"))
    assert m["k33"] and not m["c6"]


def test_opaque_has_no_oracle():
    with pytest.raises(UnrecognizedDescriptor):
        oracle_classify(D("Opaque"))


@pytest.mark.parametrize("text", CENSUS)
def test_projective_implies_toroidal(text):
    r = oracle_classify(parse_descriptor(text))
    assert not r.projective or r.toroidal
    assert not (r.planar and r.toroidal)


@pytest.mark.parametrize("text", CENSUS)
def test_forbidden_lists_nest(text):
    m = forbidden_class_membership(parse_descriptor(text))
    assert not m["p5"] or (m["c6"] and m["p6"])
    assert not m["c6"] or m["k33"]


@pytest.mark.parametrize("text", CENSUS)
def test_recognition_of_shuffled_tables(text):
    d = parse_descriptor(text)
    g = shuffled(construct(d), seed=len(text))
    r = recognize(g)
    if r.family == "Opaque":
        assert "non-solvable" in r.source
        return
    assert group_isomorphism(g, construct(r)) is not None
    assert oracle_classify(r).flags() == oracle_classify(d).flags()


def test_named_recognitions():
    assert recognize(shuffled(construct(D("Modular", 2, 3)))).text() == "modular:2,3"
    assert recognize(construct(parse_descriptor("semidirect:q=3,p=2,a=2,t=1"))).text() == \
        "semidirect:q=3,p=2,a=2,t=1"
    a5 = recognize(construct(D("Alternating", 5)))
    assert a5.family == "Opaque" and "non-solvable" in a5.source


@given(st.lists(st.integers(2, 16), min_size=1, max_size=3).filter(lambda ns: 4 <= math.prod(ns) <= 128))
def test_abelian_surface_rule(ns):
    text = f"cyclic:{ns[0]}" if len(ns) == 1 else "direct:" + ",".join(map(str, ns))
    g = construct(parse_descriptor(text))
    r = len(all_subgroups(g).proper)
    if r == 0:
        return
    rec = pipeline_classify(g)
    assert rec.toroidal == (r in (5, 6, 7))
    assert rec.projective == (r in (5, 6))
    assert oracle_classify(recognize(g)).toroidal == rec.toroidal


def test_cross_validation_small_cases():
    rep = cross_validate(construct(parse_descriptor("semidirect:q=3,p=2,a=2,t=1")))
    assert {"toroidal", "projective", "planar"} <= set(rep.agreements)
    rep = cross_validate(construct(parse_descriptor("ppq:p=5,q=3")))
    assert rep.ok and rep.pipeline.toroidal and not rep.pipeline.projective


def test_vacuous_family_raises_in_oracle():
    with pytest.raises(NoSuchParameter):
        oracle_classify(parse_descriptor("ppq:p=3,q=2"))


def test_negative_fixture_agrees():
    rep = cross_validate(construct(parse_descriptor("dihedral:6")))
    assert rep.ok and not rep.pipeline.toroidal
