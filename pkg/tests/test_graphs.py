import math

import networkx as nx
import pytest
from hypothesis import given, strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from permuta.graphs import (FORBIDDEN, Complete, CompleteBipartite, Copies, Cycle, Empty, Graph,
                            Join, NoProperSubgroups, Path, Union, build, find_isomorphism,
                            forbidden_profile, from_graph6, has_subgraph, invariant_hash,
                            is_isomorphic, pattern, permutability_graph, to_dot, to_graph6)
from permuta.groups import all_subgroups, is_normal, quotient
from permuta.zoo import construct, parse_descriptor


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, c in zip(pairs, chosen) if c])


def relabel(g, perm):
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


def gamma(text):
    return permutability_graph(construct(parse_descriptor(text)))


def test_k4_graph6():
    assert to_graph6(build(Complete(4))) == "C~"


@given(graphs(max_n=70))
def test_graph6_matches_networkx(g):
    ours = to_graph6(g)
    theirs = nx.to_graph6_bytes(g.to_networkx(), header=False).decode().strip()
    assert ours == theirs
    assert sorted(from_graph6(ours).edges()) == sorted(g.edges())


@pytest.mark.parametrize("expr,n,m", [
    (Join(Complete(3), Empty(3)), 6, 12),
    (Join(Complete(2), Copies(3, CompleteBipartite(1, 3))), 14, 1 + 9 + 2 * 12),
    (Join(Complete(1), Union(Complete(3), Empty(4))), 8, 3 + 7),
    (Cycle(6), 6, 6),
    (Path(5), 6, 5),
])
def test_build_counts(expr, n, m):
    g = build(expr)
    assert (g.n, g.m) == (n, m)


@given(graphs(), st.randoms())
def test_isomorphism_recovers_relabelling(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    iso = find_isomorphism(g, h)
    assert iso is not None
    assert all(h.has_edge(iso[u], iso[v]) for u, v in g.edges())
    assert invariant_hash(g) == invariant_hash(h)


@given(graphs(max_n=7), graphs(max_n=7))
def test_isomorphism_agrees_with_networkx(g, h):
    assert is_isomorphic(g, h) == nx.is_isomorphic(g.to_networkx(), h.to_networkx())


@given(graphs(max_n=9), st.sampled_from(FORBIDDEN + ("k8", "a1")))
def test_subgraph_search_agrees_with_networkx(g, name):
    pat = pattern(name)
    m = has_subgraph(g, pat)
    expected = GraphMatcher(g.to_networkx(), pat.to_networkx()).subgraph_is_monomorphic()
    assert (m is not None) == expected
    if m is not None:
        assert len(set(m.values())) == pat.n
        assert all(g.has_edge(m[u], m[v]) for u, v in pat.edges())


def test_pattern_sizes():
    assert pattern("p5").n == 6 and pattern("p6").n == 7
    assert forbidden_profile(build(Complete(4)))["p5"] is True
    assert forbidden_profile(build(Complete(6)))["c6"] is False


def test_small_permutability_graphs():
    assert is_isomorphic(gamma("quaternion:3"), build(Complete(4)))
    assert is_isomorphic(gamma("sym:3"), build(CompleteBipartite(1, 3)))
    assert forbidden_profile(gamma("sym:3"))["k15"] is True


def test_prime_order_has_no_graph():
    with pytest.raises(NoProperSubgroups):
        gamma("cyclic:7")


def test_dot_labels():
    text = to_dot(gamma("sym:3"))
    assert text.count("label=") == 4 and "(1 2 3)" in text


@given(st.lists(st.integers(2, 9), min_size=1, max_size=3).filter(lambda ns: math.prod(ns) <= 128))
def test_abelian_graph_is_complete(ns):
    text = f"cyclic:{ns[0]}" if len(ns) == 1 else "direct:" + ",".join(map(str, ns))
    g = construct(parse_descriptor(text))
    r = len(all_subgroups(g).proper)
    if r == 0:
        return
    gr = permutability_graph(g)
    assert gr.n == r and gr.m == r * (r - 1) // 2


@pytest.mark.parametrize("text", ["sym:4", "alt:4", "dihedral:6", "ppq:p=5,q=3", "quaternion:4"])
def test_normal_subgroups_dominate(text):
    g = construct(parse_descriptor(text))
    lat = all_subgroups(g)
    gr = permutability_graph(g, lat)
    for i, h in enumerate(lat.proper):
        if is_normal(g, h):
            assert gr.degree(i) == gr.n - 1


QUOTIENT_CASES = [
    ("quaternion:3", 2), ("sym:4", 4), ("dihedral:6", 2), ("cyclic:64", 2),
    ("product:cyclic:3*alt:4", 3), ("ppc4:l=0", 9), ("dihedral:9", 3),
]


def quotient_pairs(text, order):
    g = construct(parse_descriptor(text))
    for n in all_subgroups(g).proper:
        if n.order == order and is_normal(g, n):
            yield g, n


@pytest.mark.parametrize("text,order", QUOTIENT_CASES)
def test_quotient_graph_is_subgraph(text, order):
    pairs = list(quotient_pairs(text, order))
    assert pairs
    for g, n in pairs:
        q, proj = quotient(g, n)
        qsubs = all_subgroups(q).proper
        if not qsubs:
            continue
        gsubs = all_subgroups(g).proper
        index = {h.members: i for i, h in enumerate(gsubs)}
        gq, gg = permutability_graph(q), permutability_graph(g)
        image = {}
        for i, hq in enumerate(qsubs):
            full = sum(1 << x for x in range(g.order) if hq.members >> proj[x] & 1)
            image[i] = index[full]
        assert len(set(image.values())) == gq.n
        assert all(gg.has_edge(image[u], image[v]) for u, v in gq.edges())


def test_q8_quotient_is_triangle():
    g = construct(parse_descriptor("quaternion:3"))
    (center,) = [h for h in all_subgroups(g).proper if h.order == 2]
    q, _ = quotient(g, center)
    assert is_isomorphic(permutability_graph(q), build(Complete(3)))
