import json
import random

import pytest

from corpora import closure_components, closure_reach, random_graph_corpus
from dwlab.errors import InputError, ParseError
from dwlab.graph import DiGraph, Role, components, decode, encode, reach


def path_graph(names):
    return DiGraph.from_edges(names, [(i, i + 1) for i in range(len(names) - 1)])


def test_reach_single_vertex_reflexive():
    g = DiGraph.from_edges(1, [])
    assert reach(g, {0}) == {0}


def test_reach_removal_cuts_path():
    g = path_graph(["a", "b", "c"])
    assert reach(g, {0}, {1}) == {0}


def test_reach_cycle_transitive_closure():
    g = DiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    expected = closure_reach(g, [1], [])
    assert reach(g, {1}) == expected == {0, 1, 2}


def test_reach_sources_inside_removed_are_ignored():
    g = path_graph("ab")
    assert reach(g, {0, 1}, {0}) == {1}


def test_reach_unknown_vertex_rejected():
    g = path_graph("ab")
    with pytest.raises(InputError):
        reach(g, {5}, set())


def test_reach_monotone_in_removed():
    rng = random.Random(11)
    for g in random_graph_corpus(23, 60, 6):
        n = g.n
        rem2 = {v for v in range(n) if rng.random() < 0.4}
        rem1 = {v for v in rem2 if rng.random() < 0.6}
        src = {v for v in range(n) if rng.random() < 0.4}
        assert reach(g, src, rem2) <= reach(g, src, rem1)


def test_components_cycle_and_path():
    cyc = DiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert components(cyc) == [frozenset({0, 1, 2})]
    pth = path_graph("abc")
    assert components(pth) == [frozenset({0}), frozenset({1}), frozenset({2})]


def test_components_match_closure_oracle_and_partition():
    for g in random_graph_corpus(5, 80, 6):
        rem = set(range(0, g.n, 3))
        got = components(g, rem)
        assert got == closure_components(g, rem)
        union = set().union(*got) if got else set()
        assert union == set(range(g.n)) - rem
        assert sum(len(c) for c in got) == len(union)


def test_components_of_acyclic_are_singletons():
    for g in random_graph_corpus(9, 40, 6):
        dag_edges = [(u, v) for (u, v) in g.edges() if u < v]
        dag = DiGraph.from_edges(g.n, dag_edges)
        assert all(len(c) == 1 for c in components(dag))


def test_no_self_loops_or_bad_edges():
    with pytest.raises(InputError):
        DiGraph.from_edges(2, [(0, 0)])
    with pytest.raises(InputError):
        DiGraph.from_edges(2, [(0, 5)])


def test_json_roundtrip_empty_and_tiny():
    g = DiGraph.from_edges(0, [])
    obj = json.loads(encode(g).decode())
    assert obj == {"vertices": [], "edges": []}
    assert decode(encode(g)) == g

    two = DiGraph.from_edges(["a", "b"], [(0, 1), (1, 0)])
    assert decode(encode(two)) == two
    assert encode(two, "edgelist").decode().strip().splitlines()[-2:] == ["0 1", "1 0"]


def test_json_roundtrip_with_roles():
    roles = {0: Role(level=5, part="M", index=0), 1: Role(level=0, part="F-clause", clause=1, literal=0)}
    g = DiGraph.from_edges(["x", "y"], [(0, 1)], roles)
    back = decode(encode(g))
    assert back == g
    assert back.roles[1].clause == 1


def test_json_roundtrip_random_corpus():
    rng = random.Random(4242)
    for g in random_graph_corpus(4242, 1000, 20):
        roled = DiGraph.from_edges(
            list(g.names),
            g.edges(),
            {v: Role(level=rng.randint(0, 9), part=rng.choice("MDAB")) for v in range(g.n) if rng.random() < 0.3},
        )
        assert decode(encode(roled)) == roled


def test_gadget_roundtrip_preserves_roles():
    from dwlab.gadgets import gen_gnst

    g = gen_gnst(5).graph
    assert decode(encode(g)) == g


def test_decode_errors_carry_position():
    with pytest.raises(ParseError) as e:
        decode(b'{"vertices": [}')
    assert e.value.offset is not None
    with pytest.raises(ParseError):
        decode(b'{"vertices": []}')
    with pytest.raises(ParseError):
        decode(json.dumps({"vertices": [{"id": 1, "name": "x"}], "edges": []}).encode())
    with pytest.raises(InputError):
        decode(b"...", format="edgelist")


def test_dot_export_mentions_all_vertices():
    from dwlab.gadgets import gen_gnst

    g = gen_gnst(5).graph
    dot = encode(g, "dot").decode()
    assert dot.startswith("digraph")
    for v in range(g.n):
        assert f'label="{g.names[v]}"' in dot
