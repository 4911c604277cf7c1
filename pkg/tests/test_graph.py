import itertools

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from causal_understanding.conditions import base_diagram, catalog, catalog_keys
from causal_understanding.graph import (
    CycleIntroduced,
    Diagram,
    Edge,
    EdgeKind,
    InvalidDiagram,
    Node,
    SelfLoop,
    UnknownNode,
    VariableRole as R,
    add_edge,
    find_cycle,
    from_dict,
    from_json,
    new_diagram,
    realization_label,
    realizations,
    to_dict,
    to_dot,
    to_json,
    validate,
)
from strategies import diagrams

AMB, DIR, COR = EdgeKind.AMBIGUOUS, EdgeKind.DIRECTED, EdgeKind.CORRELATIONAL


def orientation_count(d: Diagram) -> int:
    """Independent count: try every bitmask and ask networkx about cycles."""
    amb = [e for e in d.edges if e.kind is AMB]
    fixed = [(e.source, e.target) for e in d.edges if e.kind is DIR]
    total = 0
    for mask in range(2 ** len(amb)):
        g = nx.DiGraph(fixed)
        g.add_nodes_from(d.ids)
        for k, e in enumerate(amb):
            g.add_edge(*((e.source, e.target) if mask >> k & 1 else (e.target, e.source)))
        total += nx.is_directed_acyclic_graph(g)
    return total


def triangle() -> Diagram:
    d = new_diagram(["A", "B", "C"])
    return d.with_edges(add=[Edge("A", "B", AMB), Edge("B", "C", AMB), Edge("C", "A", AMB)])


def test_undirected_edges_are_unordered():
    assert Edge("B", "A", AMB) == Edge("A", "B", AMB)
    assert Edge("B", "A", COR) == Edge("A", "B", COR)
    assert Edge("B", "A") != Edge("A", "B")


def test_single_ambiguous_edge_has_two_realizations():
    d = new_diagram(["A", "B"]).with_edges(add=[Edge("A", "B", AMB)])
    assert len(realizations(d)) == 2


def test_ambiguous_triangle_has_six_realizations():
    rs = realizations(triangle())
    assert len(rs) == 6 == orientation_count(triangle())
    assert all(r.is_realized and not validate(r) for r in rs)


def test_base_triangle_fragment():
    human = {"YH", "YhatH", "ZH"}
    d = base_diagram()
    frag = Diagram(frozenset(n for n in d.nodes if n.id in human),
                   frozenset(e for e in d.edges if set(e.endpoints) <= human))
    assert len(realizations(frag)) == 6


def test_full_discovery_hidden_diagram_also_orients_the_input_link():
    d = catalog("fig3g")
    assert len(d.edges_of(AMB)) == 4
    assert len(realizations(d)) == orientation_count(d) == 12


def test_realization_labels_are_distinct():
    d = catalog("fig3g")
    labels = {realization_label(d, r) for r in realizations(d)}
    assert len(labels) == 12


def test_add_edge_rejects_cycles_self_loops_and_unknown_nodes():
    d = new_diagram(["A", "B"])
    d = add_edge(d, Edge("A", "B"))
    with pytest.raises(CycleIntroduced):
        add_edge(d, Edge("B", "A"))
    with pytest.raises(SelfLoop):
        add_edge(d, Edge("A", "A"))
    with pytest.raises(UnknownNode):
        add_edge(d, Edge("A", "Q"))


def test_x_y_link_is_stored_ambiguous_with_controller():
    edges = [e for e in catalog("fig2").edges if set(e.endpoints) == {"X", "Y"}]
    assert len(edges) == 1 and edges[0].kind is AMB and edges[0].controller == "f"


def test_duplicate_role_detected():
    with pytest.raises(Exception):
        new_diagram([R.INPUT, Node("X2", R.INPUT)])
    d = Diagram(frozenset({Node("X", R.INPUT), Node("X2", R.INPUT)}))
    assert [v.kind for v in validate(d)] == ["DuplicateRole"]


def test_bad_equivalence_detected():
    d = new_diagram([R.INPUT, R.TASK_LABEL]).with_equivalence("X", "Y")
    assert [v.kind for v in validate(d)] == ["BadEquivalence"]


def test_find_cycle_reports_a_real_cycle():
    edges = [Edge("A", "B"), Edge("B", "C"), Edge("C", "A"), Edge("C", "D")]
    cyc = find_cycle(edges)
    assert sorted(cyc) == ["A", "B", "C"]
    pairs = set(zip(cyc, cyc[1:] + cyc[:1]))
    assert pairs <= {(e.source, e.target) for e in edges}
    assert find_cycle([Edge("A", "B")]) is None


def test_realizations_refuse_invalid_diagram():
    d = Diagram(frozenset({Node("A", R.GENERIC)}), frozenset({Edge("A", "Q")}))
    with pytest.raises(InvalidDiagram):
        realizations(d)


@given(diagrams(max_nodes=6, kinds=(DIR, AMB, COR), max_ambiguous=6))
def test_realization_count_matches_bitmask_oracle(d):
    rs = realizations(d)
    k = len(d.edges_of(AMB))
    assert len(rs) == orientation_count(d)
    assert len(rs) <= 2 ** k
    assert all(r.is_realized and not validate(r) for r in rs)
    assert all(len(r.edges_of(COR)) == len(d.edges_of(COR)) for r in rs)


@pytest.mark.parametrize("key", catalog_keys())
def test_json_round_trip_catalog(key):
    d = catalog(key)
    assert from_json(to_json(d)) == d
    assert from_dict(to_dict(d)) == d


@given(diagrams(max_nodes=7, kinds=(DIR, AMB, COR)))
def test_json_round_trip_random(d):
    assert from_json(to_json(d)) == d


def test_from_json_rejects_bad_documents():
    with pytest.raises(InvalidDiagram):
        from_json("{not json")
    with pytest.raises(InvalidDiagram):
        from_dict({"nodes": [{"id": "A"}]})
    with pytest.raises(InvalidDiagram):
        from_dict({"nodes": [{"id": "A", "role": "GENERIC"}],
                   "edges": [{"from": "A", "to": "A", "kind": "directed"}]})


def test_dot_styles_and_merged_nodes():
    dot = to_dot(catalog("fig3d"))
    assert 'style=dashed, dir=both' in dot  # the Y <-> Ŷ correlation
    assert "Y ≡ Y^H" in dot and "Ŷ ≡ Ŷ^H" in dot
    assert '"YH"' not in dot
    assert "<TD>f</TD>" in dot and "<TD>g</TD>" in dot
    dot2 = to_dot(catalog("fig2"))
    assert 'style=dashed, dir=none' in dot2


def test_dot_escapes_controller_tags():
    d = new_diagram(["A", "B"]).with_edges(add=[Edge("A", "B", DIR, "a<b")])
    assert "a&lt;b" in to_dot(d)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12))
def test_find_cycle_agrees_with_networkx(pairs):
    edges = [Edge(f"N{a}", f"N{b}") for a, b in pairs if a != b]
    g = nx.DiGraph([(e.source, e.target) for e in edges])
    assert (find_cycle(edges) is None) == nx.is_directed_acyclic_graph(g)
