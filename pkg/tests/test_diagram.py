from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxn2.diagram import (
    BOLD,
    CoxeterDiagram,
    DiagramError,
    DiagramSyntaxError,
    Dotted,
    canonical_diagram,
    canonical_form,
    connected_components,
    format_diagram,
    is_adjacent,
    parse_diagram,
    subdiagram,
    to_graphviz,
)

from conftest import path

LABELS = [3, 4, 5, 6, 7, BOLD, Dotted(Fraction(3, 2))]


@st.composite
def diagrams(draw, max_nodes=8):
    k = draw(st.integers(1, max_nodes))
    nodes = [f"v{i}" for i in range(k)]
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            if draw(st.integers(0, 3)) == 0:
                edges.append((nodes[i], nodes[j], draw(st.sampled_from(LABELS))))
    return CoxeterDiagram(nodes, edges)


def test_parse_plain_edge():
    d = parse_diagram("nodes: 2\nedge 1 2 3")
    assert d.order == 2 and d.label("1", "2") == 3


def test_parse_bold_and_dotted():
    d = parse_diagram("nodes: a b c\nedge a b inf\nedge b c dotted 5/4\nmark a base\n")
    assert d.label("a", "b") == BOLD
    assert d.label("b", "c") == Dotted(Fraction(5, 4))
    assert d.marks == {"a": "base"}


@pytest.mark.parametrize("text", [
    "nodes: 2\nedge 1 2 2",
    "nodes: 2\nedge 1 2 1",
    "nodes: 2\nedge 1 2 dotted 1/1",
    "nodes: 2\nedge 1 2 dotted 1/2",
    "nodes: 2\nedge 1 2 3\nedge 2 1 4",
    "nodes: 2\nedge 1 3 3",
    "nodes: 2\nedge 1 1 3",
    "nodes: 2\nbogus 1 2",
    "edge 1 2 3",
])
def test_parse_errors(text):
    with pytest.raises(DiagramError):
        parse_diagram(text)


def test_syntax_error_position():
    with pytest.raises(DiagramSyntaxError) as exc:
        parse_diagram("nodes: 2\n# fine\nedge 1 2 x3")
    assert exc.value.line == 3
    assert exc.value.column >= 1


def test_round_trip_after_canonical_order():
    d = path(3, 4, 5)
    c = canonical_diagram(d)
    text = format_diagram(c)
    assert format_diagram(parse_diagram(text)) == text
    assert canonical_form(parse_diagram(text)) == canonical_form(d)


def test_subdiagram_examples():
    d = path(3, 3, names=["a", "b", "c"])
    s = subdiagram(d, ["a", "b"])
    assert s.order == 2 and s.label("a", "b") == 3
    assert subdiagram(d, d.nodes) == d
    assert subdiagram(d, []).order == 0
    with pytest.raises(DiagramError):
        subdiagram(d, ["z"])


def test_components_examples():
    assert len(connected_components(CoxeterDiagram(["1", "2"]))) == 2
    assert len(connected_components(path(BOLD))) == 1


def test_adjacency_examples():
    d = path(3, 3, names=["a", "b", "c"])
    assert not is_adjacent(d, {"a"}, {"c"})
    assert is_adjacent(d, {"a"}, {"b"})
    assert not is_adjacent(d, set(), {"b"})
    with pytest.raises(DiagramError):
        is_adjacent(d, {"a", "b"}, {"b"})


def test_canonical_examples():
    assert canonical_form(path(3)) != canonical_form(path(4))
    assert canonical_form(path(3, 4)) == canonical_form(path(4, 3))


def test_marks_only_matter_on_request():
    d = path(3, 3)
    a = d.with_marks({"1": "base"})
    b = d.with_marks({"2": "base"})
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(a, use_marks=True) != canonical_form(b, use_marks=True)


def test_graphviz_styles():
    dot = to_graphviz(CoxeterDiagram(["1", "2", "3"], [("1", "2", BOLD), ("2", "3", 3)]))
    lines = [ln for ln in dot.splitlines() if "--" in ln]
    assert len(lines) == 2 and lines[0] != lines[1].replace('"3"', '"1"')
    assert any("penwidth" in ln for ln in lines)


@settings(max_examples=150, deadline=None)
@given(diagrams(), st.randoms(use_true_random=False))
def test_canonical_form_permutation_invariant(d, rnd):
    order = list(d.nodes)
    rnd.shuffle(order)
    renamed = d.permuted(order).relabel({v: f"w{i}" for i, v in enumerate(order)})
    assert canonical_form(renamed) == canonical_form(d)


@settings(max_examples=100, deadline=None)
@given(diagrams())
def test_canonical_form_distinguishes_relabelled_edge(d):
    edges = d.edges
    if not edges:
        return
    (u, v), m = sorted(edges.items(), key=lambda kv: kv[0])[0]
    other = 3 if m != 3 else 4
    d2 = d.with_label(u, v, other)
    # same multiset of labels is necessary for isomorphism
    assert canonical_form(d2) != canonical_form(d)


@settings(max_examples=100, deadline=None)
@given(diagrams(), st.data())
def test_subdiagram_monotone(d, data):
    A = data.draw(st.lists(st.sampled_from(d.nodes), unique=True))
    B = data.draw(st.lists(st.sampled_from(A), unique=True)) if A else []
    assert subdiagram(subdiagram(d, A), B) == subdiagram(d, B)


@settings(max_examples=100, deadline=None)
@given(diagrams())
def test_components_partition(d):
    comps = connected_components(d)
    seen = [v for c in comps for v in c.nodes]
    assert sorted(seen) == sorted(d.nodes)
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            assert not is_adjacent(d, comps[i].nodes, comps[j].nodes)


@settings(max_examples=100, deadline=None)
@given(diagrams())
def test_format_parse_round_trip(d):
    assert parse_diagram(format_diagram(d)) == d
