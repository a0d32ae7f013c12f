from __future__ import annotations

import json
from itertools import product

import numpy as np
import pytest

from coxn2.classify import CapTooSmall, classify_indices, connected_affine
from coxn2.diagram import BOLD, CoxeterDiagram, canonical_form, format_diagram, parse_diagram
from coxn2.enumerate import (
    FREE_LABEL,
    _glue,
    apex_attachments,
    emit_tables,
    lanner_halves,
    product_candidates,
    product_conditions,
    pyramid_apexes,
    search_pyramids,
    verify_polytope_diagram,
)
from coxn2.exact import Signature, diagram_signature

from conftest import path, triangle

CROSS = [(i, j) for j in range(3, 6) for i in range(3)]


def _base(h1, h2):
    N = 6
    M = [[2] * N for _ in range(N)]
    for i in range(N):
        M[i][i] = 1
    for h, off in ((h1, 0), (h2, 3)):
        for i in range(3):
            for j in range(3):
                if i != j:
                    M[off + i][off + j] = h.matrix[i][j]
    return M


def _brute_force(h1, h2, labels):
    """All admissible cross labelings, via one lookup table per vertex link."""
    M = _base(h1, h2)
    L = len(labels)
    ok = np.ones((L,) * len(CROSS), dtype=bool)
    for v1 in range(3):
        for v2 in range(3, 6):
            X = [x for x in range(6) if x not in (v1, v2)]
            edges = [e for e in CROSS if e[0] in X and e[1] in X]
            table = np.zeros((L,) * len(edges), dtype=bool)
            for idx in product(range(L), repeat=len(edges)):
                for (i, j), k in zip(edges, idx):
                    M[i][j] = M[j][i] = labels[k]
                table[idx] = classify_indices(M, X) is not None
            for i, j in edges:
                M[i][j] = M[j][i] = 2
            shape = [L if e in edges else 1 for e in CROSS]
            ok &= table.reshape(shape)
    return {tuple(labels[k] for k in idx) for idx in zip(*np.nonzero(ok))}


def _cross(M):
    return tuple(M[i][j] for i, j in CROSS)


@pytest.mark.parametrize("pair", [((3, 3, 4), (3, 3, 4)), ((2, 3, 7), (3, 3, 4)), ((2, 4, 5), (3, 4, 4)),
                                  ((3, 3, 3), (2, 4, 6))])
def test_pruning_matches_brute_force(pair):
    # (3,3,3) and (2,4,6) are affine; the filter must still agree on them
    h1, h2 = triangle(*pair[0]), triangle(*pair[1])
    labels = (2, 3, 4, 5, BOLD)
    pruned = {_cross(M) for M in product_candidates(h1, h2, labels, prune=True)}
    assert pruned == _brute_force(h1, h2, labels)


def test_pruning_matches_unpruned_small():
    h1, h2 = triangle(3, 3, 4), triangle(2, 3, 7)
    labels = (2, 3, BOLD)
    a = {_cross(M) for M in product_candidates(h1, h2, labels, prune=True)}
    b = {_cross(M) for M in product_candidates(h1, h2, labels, prune=False)}
    assert a == b


@pytest.mark.parametrize("m", range(8, 16))
def test_free_label_is_uniform(m):
    labels = (2, 3, 4, 5, 6, BOLD)
    other = triangle(3, 3, 4)
    ref = {_cross(M) for M in product_candidates(triangle(2, 3, FREE_LABEL), other, labels)}
    got = {_cross(M) for M in product_candidates(triangle(2, 3, m), other, labels)}
    assert ref == got


def test_lanner_halves():
    hs = lanner_halves()
    assert [h.order for h in hs].count(4) == 9 and [h.order for h in hs].count(5) == 5
    assert all(m == BOLD or m <= FREE_LABEL for h in hs for m in h.edges.values())


def test_product_swap_symmetry():
    labels = (2, 3, 4, BOLD)
    h1, h2 = triangle(3, 3, 4), triangle(2, 4, 5)
    ab = {canonical_form(CoxeterDiagram.from_matrix(M)) for M in product_candidates(h1, h2, labels)}
    ba = {canonical_form(CoxeterDiagram.from_matrix(M)) for M in product_candidates(h2, h1, labels)}
    assert ab == ba and ab


def test_product_result(products):
    recs = products.diagrams()
    assert len(recs) == 1
    rec = recs[0]
    assert rec.diagram.order == 6 and list(products.dimensions) == [4]
    assert rec.det.is_zero() and rec.signature == Signature(4, 1, 1)
    assert [len(h) for h in rec.halves] == [3, 3]
    assert not any(isinstance(m, float) or m == BOLD for m in rec.diagram.edges.values())


def test_product_families(products):
    fams = [f for n in products.families for f in products.families[n]]
    assert fams
    for f in fams:
        assert f.parabolic_links > 0
        assert f.root_report.exact_zero_labels == []
        ok, parab = product_conditions(f.family.base.matrix, f.half)
        assert ok and parab == f.parabolic_links
        # every family member with large concrete labels still satisfies the link conditions
        d = f.family.concretize({s: 11 for s in f.family.symbols})
        assert product_conditions(d.matrix, f.half) == (True, parab)
    keys = [f.key for f in fams]
    assert len(keys) == len(set(keys))


def test_verify_product(products):
    d = products.diagrams()[0].diagram
    rep = verify_polytope_diagram(d, 4)
    assert rep["pass"] and rep["type"] == "product"
    h1, h2 = products.diagrams()[0].halves
    u, v = next((u, v) for u in h1 for v in h2 if d.label(u, v) == 2)
    bad = verify_polytope_diagram(d.with_label(u, v, 3), 4)
    assert not bad["pass"]
    failed = {c["check"] for c in bad["checks"] if not c["pass"]}
    assert failed & {"signature", "det_zero", "vertex_links"}


def test_verify_elliptic_fails():
    rep = verify_polytope_diagram(path(3, 3, 3, 3, 3), 4)
    assert not rep["pass"]
    assert not next(c for c in rep["checks"] if c["check"] == "signature")["pass"]


def test_verify_pyramids(pyramids):
    for n in pyramids.dimensions:
        for rec in pyramids.dimensions[n]:
            rep = verify_polytope_diagram(rec.diagram, n)
            assert rep["pass"] and rep["type"] == "pyramid", (n, format_diagram(rec.diagram))


def test_pyramid_spectrum(pyramids):
    nonempty = {n for n, recs in pyramids.dimensions.items() if recs}
    assert nonempty == set(range(3, 14)) | {17}
    assert len(pyramids.dimensions[17]) == 1


def test_pyramid_invariants(pyramids):
    for n, recs in pyramids.dimensions.items():
        keys = [r.key for r in recs]
        assert keys == sorted(set(keys))
        for rec in recs:
            d = rec.diagram
            base = [u for u, m in d.marks.items() if m == "base"]
            assert pyramid_apexes(d) == base
            assert d.order == n + 2
            assert rec.det.is_zero() and rec.signature == Signature(n, 1, 1)
            assert diagram_signature(d) == rec.signature
            assert all(k in ("elliptic", "parabolic") for _, _, k in rec.census)
            assert all(m != BOLD and m <= 6 for (u, v), m in d.edges.items() if base[0] in (u, v))


def test_pyramid_families(pyramids):
    vals = [set(v) for f in pyramids.families[3] for v in f.values.values()]
    assert {2, 3, 4, 5, 6} in vals
    for n, fams in pyramids.families.items():
        # boxes may overlap but together cover exactly the emitted diagrams
        members = {k for f in fams for k in f.members}
        assert members == {r.key for r in pyramids.dimensions[n]}


def test_pyramid_swap_symmetry():
    S1, S2 = connected_affine(2)[0], connected_affine(3)[0]
    for L1 in apex_attachments(S1)[:3]:
        for L2 in apex_attachments(S2)[:3]:
            a = CoxeterDiagram.from_matrix(_glue(L1, L2))
            b = CoxeterDiagram.from_matrix(_glue(L2, L1))
            assert canonical_form(a) == canonical_form(b)


def test_pyramid_cap_sentinel():
    with pytest.raises(CapTooSmall):
        search_pyramids(3, 3, label_cap=4, workers=1)


def test_bad_arguments():
    with pytest.raises(ValueError):
        search_pyramids(3, 18)
    from coxn2.enumerate import search_products
    with pytest.raises(ValueError):
        search_products(label_cap=6)


def test_emit_json(pyramids, products):
    data = json.loads(emit_tables(pyramids, "json"))
    assert data["schema"] == 1
    assert len(data["dimensions"]["17"]["diagrams"]) == 1
    assert all(data["dimensions"][str(n)]["diagrams"] == [] for n in (14, 15, 16))
    pdata = json.loads(emit_tables(products, "json"))
    assert len(pdata["dimensions"]["4"]["diagrams"]) == 1


def _text_blocks(text):
    blocks, cur = [], []
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            if cur:
                blocks.append("\n".join(cur))
                cur = []
            continue
        cur.append(line)
    if cur:
        blocks.append("\n".join(cur))
    return blocks


def test_emit_text_round_trip(pyramids, products):
    for res in (pyramids, products):
        blocks = _text_blocks(emit_tables(res, "text"))
        recs = res.diagrams()
        assert len(blocks) == len(recs)
        for text, rec in zip(blocks, recs):
            assert canonical_form(parse_diagram(text), use_marks=True) == canonical_form(rec.diagram, use_marks=True)


def test_emit_graph_and_errors():
    bold = CoxeterDiagram(list("123"), [("1", "2", BOLD), ("2", "3", 3), ("1", "3", 3)])
    plain = CoxeterDiagram(list("123"), [("1", "2", 3), ("2", "3", 3), ("1", "3", 3)])
    from coxn2.enumerate import ClassificationResult, DiagramRecord

    def render(d):
        res = ClassificationResult("test", {}, {1: [DiagramRecord(d, canonical_form(d))]})
        return emit_tables(res, "graph")

    assert render(bold) != render(plain)
    with pytest.raises(ValueError):
        emit_tables(ClassificationResult("test", {}), "yaml")


def test_determinism_across_workers():
    a = emit_tables(search_pyramids(3, 6, workers=1), "json")
    b = emit_tables(search_pyramids(3, 6, workers=2), "json")
    assert a == b



def test_largest_base_label_per_dimension(pyramids):
    # largest parameter value printed with the published pyramid tables
    expected = {3: 6, 4: 5, 5: 4, 6: 4, 7: 3, 8: 3, 9: 3, 10: 4}
    for n, mx in expected.items():
        got = max(m for rec in pyramids.dimensions[n] for (u, v), m in rec.diagram.edges.items()
                  if "base" in (rec.diagram.marks.get(u), rec.diagram.marks.get(v)))
        assert got == mx, n


def test_dimension_10_is_one_two_parameter_picture(pyramids):
    # apex labels (k, l) on the two nodes of the rank-1 part, k in 2..4, l in 3..4, up to swapping the pair
    pairs = set()
    for rec in pyramids.dimensions[10]:
        d = rec.diagram
        base = next(u for u, m in d.marks.items() if m == "base")
        bold = next(e for e, m in d.edges.items() if m == BOLD)
        pairs.add(tuple(sorted(d.label(u, base) for u in bold)))
    assert pairs == {tuple(sorted((k, l))) for k in (2, 3, 4) for l in (3, 4)}
