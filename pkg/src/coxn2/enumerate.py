"""Exhaustive searches for Coxeter diagrams of n-polytopes with n+2 facets.

Two combinatorial types are possible: a product of two simplices and a
pyramid over such a product.

* Products: the diagram is a disjoint union of two Lannér diagrams L1, L2
  whose cross edges are chosen so that every vertex link
  ``D minus {v1, v2}`` (v1 in L1, v2 in L2) is elliptic or parabolic.  Only
  non-compact solutions (some link parabolic) with determinant 0 count.
* Pyramids: the diagram is S1 + S2 + v where S1, S2 are non-adjacent
  connected affine diagrams and each ``Si + v`` is quasi-Lannér with ``Si``
  as its only parabolic subdiagram; every link ``D minus {v1, v2}``
  (v1 in S1, v2 in S2) must be elliptic or parabolic.

Both searches are pure functions over work items; results are merged,
deduplicated by canonical key and sorted, so the output does not depend on
the number of worker processes.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .classify import (
    DEFAULT_LABEL_CAP,
    ELLIPTIC,
    CapTooSmall,
    admissible_indices,
    classify_indices,
    connected_affine,
    enumerate_lanner,
    extend_by_node,
    has_unique_parabolic_at,
    is_elliptic_indices,
    _search_lanner,
)
from .diagram import (
    BOLD,
    NO_EDGE,
    CoxeterDiagram,
    Dotted,
    canonical_form,
    component_indices,
    format_diagram,
    label_token,
    to_graphviz,
)
from .exact import (
    ParamFamily,
    Signature,
    diagram_determinant,
    diagram_signature,
    param_det_polynomial,
    param_root_labels,
)
from .gale import coxeter_admissible, gale_from_multiplicities, GaleError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Inside a Lannér triangle, a label >= 7 behaves identically for every
# elliptic/parabolic test (a component with such an edge is elliptic iff it
# is that single edge), so 7 stands for "any m >= 7" during the search.
FREE_LABEL = 7

MAX_QL_ORDER = 10
PYRAMID_DIM_LIMIT = 2 * MAX_QL_ORDER - 3  # |S1| + |S2| + 1 = n + 2 with |Si| <= 9

EVIDENCE_NOTE = ("determinant signs of parametric families are certified for every label up to "
                 "the scan cap and at the bold-edge limit; beyond the cap this is evidence-grade")


class InvariantViolation(AssertionError):
    """A certified property failed on search output."""


def default_workers() -> int:
    env = os.environ.get("COXETER_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"COXETER_THREADS must be an integer, got {env!r}") from None
    return 1


def _run_items(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (8 * workers))))


# -- records -------------------------------------------------------------------


@dataclass
class DiagramRecord:
    diagram: CoxeterDiagram
    key: bytes
    det: object = None
    signature: Signature | None = None
    census: list = field(default_factory=list)  # (v1, v2, "elliptic"|"parabolic")
    halves: tuple = ()

    def to_json(self) -> dict:
        d = self.diagram
        out = {
            "canonical_key": self.key.hex(),
            "nodes": list(d.nodes),
            "edges": [[u, v, label_token(m)] for (u, v), m in d.edges.items()],
            "marks": dict(d.marks),
            "text": format_diagram(d),
        }
        if self.halves:
            out["halves"] = [list(h) for h in self.halves]
        if self.det is not None:
            out["det"] = self.det.to_json()
        if self.signature is not None:
            out["signature"] = self.signature.to_json()
        out["vertex_links"] = [[a, b, kind] for a, b, kind in self.census]
        return out


@dataclass
class FamilyRecord:
    """A parametric family; ``values`` lists allowed labels per symbol (None = unbounded)."""

    family: ParamFamily
    key: bytes
    values: dict
    parabolic_links: int = 0
    det_polynomial: object = None
    root_report: object = None
    members: list = field(default_factory=list)
    half: int = 0  # size of the first half (product families)

    def to_json(self) -> dict:
        f = self.family
        out = {
            "canonical_key": self.key.hex(),
            "text": format_diagram(f.base),
            "symbols": {s: list(e) for s, e in f.symbols.items()},
            "values": {s: (v if v is not None else {"min": f.lower.get(s, 2), "max": None})
                       for s, v in self.values.items()},
            "constraint": f.constraint_text(),
        }
        if self.parabolic_links:
            out["parabolic_links"] = self.parabolic_links
        if self.det_polynomial is not None:
            out["det_polynomial"] = str(self.det_polynomial)
        if self.root_report is not None:
            out["det_roots"] = self.root_report.to_json()
        if self.members:
            out["members"] = [k.hex() for k in self.members]
        return out


@dataclass
class ClassificationResult:
    search: str
    params: dict
    dimensions: dict = field(default_factory=dict)  # n -> list[DiagramRecord]
    families: dict = field(default_factory=dict)  # n -> list[FamilyRecord]
    notes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def diagrams(self, n: int | None = None) -> list[DiagramRecord]:
        if n is not None:
            return self.dimensions.get(n, [])
        return [r for n in sorted(self.dimensions) for r in self.dimensions[n]]

    def to_json(self) -> dict:
        dims = {}
        for n in sorted(set(self.dimensions) | set(self.families)):
            dims[str(n)] = {
                "diagrams": [r.to_json() for r in self.dimensions.get(n, [])],
                "families": [f.to_json() for f in self.families.get(n, [])],
            }
        return {
            "schema": SCHEMA_VERSION,
            "search": self.search,
            "params": self.params,
            "dimensions": dims,
            "notes": self.notes,
            "stats": self.stats,
        }


def _census(M, first: Sequence[int], second: Sequence[int], nodes) -> list:
    out = []
    allidx = range(len(M))
    for a in first:
        for b in second:
            rest = [i for i in allidx if i != a and i != b]
            kind = classify_indices(M, rest)
            out.append((nodes[a], nodes[b], {ELLIPTIC: "elliptic", "P": "parabolic", None: "bad"}[kind]))
    return out


# -- products of two simplices ------------------------------------------------------


def lanner_halves(label_cap: int = DEFAULT_LABEL_CAP) -> list[CoxeterDiagram]:
    """Lannér diagrams of orders 3..5; triangle labels >= 7 collapsed to FREE_LABEL."""
    tri = _search_lanner(3, FREE_LABEL, False).diagrams
    return tri + enumerate_lanner(4, label_cap).diagrams + enumerate_lanner(5, label_cap).diagrams


def _cross_labels(label_cap: int) -> tuple:
    return tuple(range(2, label_cap + 1)) + (BOLD,)


def _product_plan(a: int, b: int):
    """Cross-edge order and, per edge, the maximal determined link subsets to test."""
    L1 = list(range(a))
    L2 = list(range(a, a + b))
    steps = []
    for j in L2:
        for i in L1:
            v1s = [x for x in L1 if x < i] + ([None] if i < a - 1 else [])
            v2s = [y for y in L2 if y < j] + ([None] if j < a + b - 1 else [])
            sets = []
            for v1 in v1s:
                for v2 in v2s:
                    X = tuple(x for x in L1 if x <= i and x != v1) + tuple(y for y in L2 if y <= j and y != v2)
                    sets.append(X)
            steps.append(((i, j), sets))
    links = [(v1, v2, tuple(x for x in range(a + b) if x != v1 and x != v2)) for v1 in L1 for v2 in L2]
    return steps, links


def product_candidates(h1: CoxeterDiagram, h2: CoxeterDiagram, labels: Sequence, prune: bool = True,
                       stats: dict | None = None) -> list[list[list]]:
    """Cross labelings of h1 + h2 whose vertex links are all elliptic or parabolic.

    With ``prune`` the admissibility of every determined link subdiagram is
    tested after each assignment; without it only completed labelings are
    tested.  Both return the same set.
    """
    a, b = h1.order, h2.order
    N = a + b
    M = [[NO_EDGE] * N for _ in range(N)]
    for i in range(N):
        M[i][i] = 1
    for i in range(a):
        for j in range(a):
            if i != j:
                M[i][j] = h1.matrix[i][j]
    for i in range(b):
        for j in range(b):
            if i != j:
                M[a + i][a + j] = h2.matrix[i][j]
    steps, links = _product_plan(a, b)
    memo: dict = {}
    out = []
    st = stats if stats is not None else {}
    visited = pruned = completed = 0

    def ok(X):
        key = (X, tuple(M[x][y] for x in X for y in X if x < a <= y))
        r = memo.get(key)
        if r is None:
            r = memo[key] = admissible_indices(M, X)
        return r

    T = len(steps)

    def rec(t):
        nonlocal visited, pruned, completed
        if t == T:
            completed += 1
            if all(classify_indices(M, X) is not None for _, _, X in links):
                out.append([row[:] for row in M])
            return
        (i, j), sets = steps[t]
        for m in labels:
            visited += 1
            M[i][j] = M[j][i] = m
            if prune and not all(ok(X) for X in sets):
                pruned += 1
                continue
            rec(t + 1)
        M[i][j] = M[j][i] = NO_EDGE

    rec(0)
    st["visited"] = st.get("visited", 0) + visited
    st["pruned"] = st.get("pruned", 0) + pruned
    st["completed"] = st.get("completed", 0) + completed
    return out


def _product_item(item):
    m1, m2, labels = item
    h1 = CoxeterDiagram.from_matrix(m1)
    h2 = CoxeterDiagram.from_matrix(m2)
    stats: dict = {}
    found = product_candidates(h1, h2, labels, True, stats)
    return [(M, h1.order) for M in found], stats


def _links_of_product(M, a):
    N = len(M)
    return [(v1, v2, [x for x in range(N) if x != v1 and x != v2]) for v1 in range(a) for v2 in range(a, N)]


def product_conditions(M, a: int) -> tuple[bool, int]:
    """(halves Lannér and all links elliptic/parabolic, number of parabolic links)."""
    N = len(M)
    for half in (list(range(a)), list(range(a, N))):
        if len(component_indices(M, half)) != 1 or classify_indices(M, half) is not None:
            return False, 0
        if not all(is_elliptic_indices(M, [x for x in half if x != v]) for v in half):
            return False, 0
    parab = 0
    for _, _, X in _links_of_product(M, a):
        k = classify_indices(M, X)
        if k is None:
            return False, 0
        parab += k == "P"
    return True, parab


def _product_record(M, a, nodes=None) -> DiagramRecord:
    d = CoxeterDiagram.from_matrix(M, nodes)
    N = len(M)
    census = _census(M, range(a), range(a, N), d.nodes)
    return DiagramRecord(d, canonical_form(d), census=census,
                         halves=(tuple(d.nodes[:a]), tuple(d.nodes[a:])))


def _free_edges(M, a) -> list[tuple[int, int]]:
    N = len(M)
    return [(i, j) for i in range(N) for j in range(i + 1, N)
            if M[i][j] == FREE_LABEL and ((i < a) == (j < a))]


def _with(M, assign: dict):
    out = [row[:] for row in M]
    for (i, j), m in assign.items():
        out[i][j] = out[j][i] = m
    return out


def _passes(M, a) -> bool:
    ok, parab = product_conditions(M, a)
    return ok and parab > 0


def _product_family(M, a) -> tuple[dict, list]:
    """Label sets per FREE edge and the concrete members with labels < FREE_LABEL.

    Each symbol's range is [t, inf) where t is the smallest label such that all
    members in the rectangle of labels [t_s, FREE_LABEL] pass.
    """
    free = _free_edges(M, a)
    thresholds = {}
    for e in free:
        t = FREE_LABEL
        for m in range(FREE_LABEL - 1, 1, -1):
            if not _passes(_with(M, {e: m}), a):
                break
            t = m
        thresholds[e] = t
    grids = [range(thresholds[e], FREE_LABEL + 1) for e in free]
    members = []

    def walk(k, assign):
        if k == len(free):
            members.append(dict(assign))
            return
        for m in grids[k]:
            assign[free[k]] = m
            walk(k + 1, assign)
        del assign[free[k]]

    walk(0, {})
    if not all(_passes(_with(M, asg), a) for asg in members):
        thresholds = {e: FREE_LABEL for e in free}
        members = [{e: FREE_LABEL for e in free}]
    concrete = [_with(M, asg) for asg in members if any(m < FREE_LABEL for m in asg.values())]
    return thresholds, concrete


_SYMBOL_NAMES = ("m", "l")


def _make_product_family(M, a, thresholds: dict) -> tuple[ParamFamily, dict]:
    d = CoxeterDiagram.from_matrix(M)
    order = list(thresholds)
    symbols = {}
    lower = {}
    for s, e in zip(_SYMBOL_NAMES, order):
        symbols[s] = (d.nodes[e[0]], d.nodes[e[1]])
        lower[s] = thresholds[e]
    text = ", ".join(f"{s} >= {lower[s]}" for s in symbols)
    return ParamFamily(d, symbols, lower, {}, text), {s: None for s in symbols}


def search_products(label_cap: int = DEFAULT_LABEL_CAP, scan_cap: int = 1000,
                    workers: int | None = None) -> ClassificationResult:
    """All non-compact Coxeter diagrams of products of two simplices (halves of order >= 3)."""
    if label_cap < FREE_LABEL:
        raise ValueError(f"label_cap must be at least {FREE_LABEL}")
    if scan_cap < label_cap:
        raise ValueError("scan_cap must be at least label_cap")
    workers = default_workers() if workers is None else workers
    t0 = time.perf_counter()
    halves = lanner_halves(label_cap)
    labels = _cross_labels(label_cap)
    items = [(halves[i].matrix, halves[j].matrix, labels)
             for i in range(len(halves)) for j in range(i, len(halves))]
    raw = _run_items(_product_item, items, workers)
    stats = {"lanner_halves": len(halves), "half_pairs": len(items)}
    cands = {}
    for found, st in raw:
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
        for M, a in found:
            d = CoxeterDiagram.from_matrix(M)
            key = canonical_form(d)
            if key not in cands:
                cands[key] = (M, a)
    stats["admissible"] = len(cands)
    compact = 0
    free_cands, concrete = {}, {}
    for key in sorted(cands):
        M, a = cands[key]
        ok, parab = product_conditions(M, a)
        if not ok:
            raise InvariantViolation("search emitted a labeling violating the link conditions")
        if any(isinstance(x, Dotted) for row in M for x in row):
            raise InvariantViolation("dotted edge in product search space")
        if parab == 0:
            compact += 1
            continue
        if _free_edges(M, a):
            free_cands[key] = (M, a, parab)
        else:
            concrete[key] = (M, a, parab)
    stats["compact_discarded"] = compact
    stats["noncompact"] = len(free_cands) + len(concrete)

    families = []
    absorbed = set()
    for key in sorted(free_cands):
        M, a, parab = free_cands[key]
        if len(_free_edges(M, a)) > 2:
            raise InvariantViolation("non-compact family with more than two free labels")
        thresholds, members = _product_family(M, a)
        fam, values = _make_product_family(M, a, thresholds)
        mkeys = []
        for mm in members:
            mk = canonical_form(CoxeterDiagram.from_matrix(mm))
            mkeys.append(mk)
            absorbed.add(mk)
        families.append(FamilyRecord(fam, key, values, parab, members=sorted(mkeys), half=a))
    stats["families"] = len(families)
    stats["absorbed_members"] = len(absorbed & set(concrete))

    for key in sorted(concrete):
        M, a, parab = concrete[key]
        if key in absorbed:
            continue
        for i in range(a):
            for j in range(a, len(M)):
                if M[i][j] != BOLD and M[i][j] >= label_cap:
                    raise CapTooSmall(f"accepted cross label {M[i][j]} reaches the label cap {label_cap}")

    result = ClassificationResult("products", {"label_cap": label_cap, "scan_cap": scan_cap})
    dets_checked = 0
    for key in sorted(concrete):
        if key in absorbed:
            continue
        M, a, parab = concrete[key]
        rec = _product_record(M, a)
        det = diagram_determinant(rec.diagram)
        dets_checked += 1
        if not det.is_zero():
            continue
        _certify_product(rec, det, result)
    stats["concrete_determinants"] = dets_checked

    for fam in families:
        fam.det_polynomial = param_det_polynomial(fam.family)
        s_min = {s: max(3, lo) for s, lo in fam.family.lower.items()}
        fam.root_report = param_root_labels(fam.det_polynomial, s_min, scan_cap)
        # label 2 members (edge removed) are outside the scan; check them directly
        for s, lo in fam.family.lower.items():
            if lo == 2:
                other = {t: FREE_LABEL for t in fam.family.symbols if t != s}
                d2 = fam.family.concretize({s: 2, **other})
                if diagram_determinant(d2).is_zero():
                    fam.root_report.exact_zero_labels.append({s: 2})
        for z in fam.root_report.exact_zero_labels:
            vals = z if isinstance(z, dict) else dict(zip(fam.family.symbols, z if isinstance(z, list) else [z]))
            d = fam.family.concretize(vals)
            rec = _product_record([list(r) for r in d.matrix], fam.half)
            _certify_product(rec, diagram_determinant(rec.diagram), result)
        n = fam.family.base.order - 2
        result.families.setdefault(n, []).append(fam)
    for n in result.dimensions:
        result.dimensions[n].sort(key=lambda r: r.key)
    result.notes = [
        "halves are Lannér diagrams of order 3 to 5; cross labels range over 2..label_cap and bold",
        f"{compact} compact candidates (all vertex links elliptic) were discarded: out of scope",
        EVIDENCE_NOTE,
    ]
    stats["seconds"] = None
    result.stats = {k: v for k, v in sorted(stats.items()) if v is not None}
    log.info("product search: %s in %.1fs", result.stats, time.perf_counter() - t0)
    return result


def _certify_product(rec: DiagramRecord, det, result: ClassificationResult) -> None:
    d = rec.diagram
    n = d.order - 2
    sig = diagram_signature(d)
    if not det.is_zero():
        raise InvariantViolation("certifying a diagram with nonzero determinant")
    rec.det = det
    rec.signature = sig
    if sig != Signature(n, 1, 1):
        log.info("det 0 candidate with signature %s rejected", sig)
        return
    if any(k == "bad" for _, _, k in rec.census):
        raise InvariantViolation("bad vertex link in accepted product")
    bucket = result.dimensions.setdefault(n, [])
    if all(r.key != rec.key for r in bucket):
        bucket.append(rec)


# -- pyramids over products of two simplices -------------------------------------


def _dedup_marked(mats, apex: int) -> list:
    out = {}
    for M in mats:
        d = CoxeterDiagram.from_matrix(M)
        d = d.with_marks({d.nodes[apex]: "base"})
        key = canonical_form(d, use_marks=True)
        if key not in out:
            out[key] = M
    return [out[k] for k in sorted(out)]


def apex_attachments(S: CoxeterDiagram, label_cap: int = DEFAULT_LABEL_CAP) -> list[list[list]]:
    """Tables of S + v (v last) where S is the only parabolic subdiagram.

    v is joined by plain labels 2..label_cap; every proper subdiagram through
    v must be elliptic, which is tested on each prefix.
    """
    k = S.order
    found = []
    for M in extend_by_node(S.matrix, tuple(range(2, label_cap + 1)), is_elliptic_indices):
        d = CoxeterDiagram.from_matrix(M)
        if has_unique_parabolic_at(d, d.nodes[k]):
            found.append(M)
    return _dedup_marked(found, k)


def _glue(L1, L2) -> list[list]:
    """S1 nodes, then S2 nodes, then the shared apex v."""
    o1, o2 = len(L1) - 1, len(L2) - 1
    N = o1 + o2 + 1
    v = N - 1
    M = [[NO_EDGE] * N for _ in range(N)]
    for i in range(N):
        M[i][i] = 1
    for i in range(o1 + 1):
        for j in range(o1 + 1):
            if i != j:
                x = v if i == o1 else i
                y = v if j == o1 else j
                M[x][y] = L1[i][j]
    for i in range(o2 + 1):
        for j in range(o2 + 1):
            if i != j:
                x = v if i == o2 else o1 + i
                y = v if j == o2 else o1 + j
                M[x][y] = L2[i][j]
    return M


def _pyramid_item(item):
    n, o1, o2, att1, att2 = item
    stats = {"pairs": 0, "link_rejected": 0, "det_nonzero": 0, "sig_rejected": 0}
    out = []
    for i, L1 in enumerate(att1):
        for j, L2 in enumerate(att2):
            if o1 == o2 and j < i:
                continue
            stats["pairs"] += 1
            M = _glue(L1, L2)
            N = len(M)
            ok = True
            for v1 in range(o1):
                for v2 in range(o1, o1 + o2):
                    rest = [x for x in range(N) if x != v1 and x != v2]
                    if classify_indices(M, rest) is None:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                stats["link_rejected"] += 1
                continue
            d = CoxeterDiagram.from_matrix(M)
            det = diagram_determinant(d)
            if not det.is_zero():
                # a node whose removal leaves two parabolic components forces det 0
                raise InvariantViolation(f"pyramid candidate with nonzero determinant: {d!r}")
            sig = diagram_signature(d)
            if sig != Signature(n, 1, 1):
                if sig != Signature(n - 1, 1, 2):
                    raise InvariantViolation(f"unexpected signature {sig} for pyramid candidate")
                stats["sig_rejected"] += 1
                continue
            out.append(M)
    return out, stats


def _pyramid_record(M, o1: int) -> DiagramRecord:
    N = len(M)
    d = CoxeterDiagram.from_matrix(M)
    d = d.with_marks({d.nodes[N - 1]: "base"})
    census = _census(M, range(o1), range(o1, N - 1), d.nodes)
    det = diagram_determinant(d)
    sig = diagram_signature(d)
    return DiagramRecord(d, canonical_form(d), det, sig, census,
                         (tuple(d.nodes[:o1]) + (d.nodes[-1],), tuple(d.nodes[o1:N - 1]) + (d.nodes[-1],)))


def pyramid_apexes(d: CoxeterDiagram) -> list[str]:
    """Nodes v with d minus v a union of exactly two connected parabolic diagrams."""
    M = d.matrix
    out = []
    for v in range(d.order):
        rest = [x for x in range(d.order) if x != v]
        comps = component_indices(M, rest)
        if len(comps) == 2 and all(classify_indices(M, c) == "P" for c in comps):
            out.append(d.nodes[v])
    return out


def search_pyramids(n_min: int = 3, n_max: int = 17, label_cap: int = DEFAULT_LABEL_CAP,
                    workers: int | None = None) -> ClassificationResult:
    """All Coxeter diagrams of finite-volume pyramids over products of two simplices."""
    if not 3 <= n_min <= n_max <= PYRAMID_DIM_LIMIT:
        raise ValueError(f"dimension range must satisfy 3 <= n_min <= n_max <= {PYRAMID_DIM_LIMIT}")
    workers = default_workers() if workers is None else workers
    t0 = time.perf_counter()
    # S_i has rank <= 8 (order <= 9) because S_i + v is quasi-Lannér of order <= MAX_QL_ORDER.
    max_s = MAX_QL_ORDER - 1
    att = {}
    for o in range(2, max_s + 1):
        rows = []
        for S in connected_affine(o, label_cap):
            rows.extend(apex_attachments(S, label_cap))
        att[o] = [tuple(tuple(r) for r in M) for M in rows]
    items = []
    for n in range(n_min, n_max + 1):
        total = n + 1  # |S1| + |S2|
        for o1 in range(2, max_s + 1):
            o2 = total - o1
            if o2 < o1 or o2 > max_s:
                continue
            items.append((n, o1, o2, att[o1], att[o2]))
    raw = _run_items(_pyramid_item, items, workers)
    result = ClassificationResult("pyramids", {"n_min": n_min, "n_max": n_max, "label_cap": label_cap})
    stats = {"attachments": {str(o): len(att[o]) for o in sorted(att)}}
    seen = {n: {} for n in range(n_min, n_max + 1)}
    for (n, o1, o2, _, _), (found, st) in zip(items, raw):
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
        for M in found:
            rec = _pyramid_record(M, o1)
            seen[n].setdefault(rec.key, rec)
    for n in range(n_min, n_max + 1):
        recs = [seen[n][k] for k in sorted(seen[n])]
        for rec in recs:
            _certify_pyramid(rec, n, label_cap)
        result.dimensions[n] = recs
        result.families[n] = pyramid_families(recs)
    stats["accepted"] = {str(n): len(result.dimensions[n]) for n in sorted(result.dimensions)}
    result.stats = stats
    result.notes = [
        "apex edges are plain labels 2..label_cap; accepted diagrams never reach the cap",
        f"quasi-Lannér diagrams have at most {MAX_QL_ORDER} nodes, so pyramids exist only for "
        f"n <= {PYRAMID_DIM_LIMIT}",
        "families group diagrams differing only in labels of edges at the base node",
    ]
    if n_max >= 14 and n_min <= 16:
        empty = [n for n in range(max(14, n_min), min(16, n_max) + 1) if result.dimensions[n]]
        if empty:
            raise InvariantViolation(f"unexpected pyramids in dimensions {empty}")
    log.info("pyramid search: %s in %.1fs", stats["accepted"], time.perf_counter() - t0)
    return result


def _certify_pyramid(rec: DiagramRecord, n: int, label_cap: int) -> None:
    d = rec.diagram
    M = d.matrix
    if d.order != n + 2:
        raise InvariantViolation("node count differs from n + 2")
    if not rec.det.is_zero() or rec.signature != Signature(n, 1, 1):
        raise InvariantViolation(f"certificate failure for {d!r}")
    v = d.order - 1
    rest = list(range(v))
    comps = component_indices(M, rest)
    if len(comps) != 2 or any(classify_indices(M, c) != "P" for c in comps):
        raise InvariantViolation("apex removal does not leave two parabolic components")
    if sum(len(c) - 1 for c in comps) != n - 1:
        raise InvariantViolation("parabolic ranks do not sum to n - 1")
    if any(k == "bad" for _, _, k in rec.census):
        raise InvariantViolation("bad vertex link")
    for u in range(v):
        m = M[u][v]
        if m != NO_EDGE and m >= label_cap:
            raise CapTooSmall(f"apex label {m} reaches the label cap {label_cap}")


def pyramid_families(recs: list[DiagramRecord]) -> list[FamilyRecord]:
    """Greedy grouping into boxes: one or two base-node edges vary over value sets."""
    by_key = {r.key: r for r in recs}
    uncovered = set(by_key)
    fams = []

    def variant(d: CoxeterDiagram, assign: dict):
        for (u, v), m in assign.items():
            d = d.with_label(u, v, m)
        return canonical_form(d)

    def box_for(rec):
        d = rec.diagram
        base = d.nodes[-1]
        others = d.nodes[:-1]
        labels = range(2, 7)
        best = ({}, [rec.key])
        sets = {}
        for u in others:
            vals = [m for m in labels if variant(d, {(u, base): m}) in by_key]
            if len(vals) > 1:
                sets[u] = vals
        for u, vals in sets.items():
            keys = [variant(d, {(u, base): m}) for m in vals]
            if len(set(keys)) == len(keys) and len(keys) > len(best[1]):
                best = ({u: vals}, keys)
        us = sorted(sets)
        for i in range(len(us)):
            for j in range(i + 1, len(us)):
                u1, u2 = us[i], us[j]
                keys = [variant(d, {(u1, base): a, (u2, base): b}) for a in sets[u1] for b in sets[u2]]
                if all(k in by_key for k in keys) and len(set(keys)) == len(keys) and len(keys) > len(best[1]):
                    best = ({u1: sets[u1], u2: sets[u2]}, keys)
        return best

    while uncovered:
        options = []
        for k in sorted(uncovered):
            params, keys = box_for(by_key[k])
            fresh = [x for x in keys if x in uncovered]
            options.append((-len(fresh), k, params, keys))
        options.sort(key=lambda t: (t[0], t[1]))
        _, k, params, keys = options[0]
        if not params:
            for x in sorted(uncovered):
                fams.append(_single_family(by_key[x]))
            break
        rec = by_key[k]
        d = rec.diagram
        base = d.nodes[-1]
        names = ("k", "l")
        symbols = {}
        values = {}
        for name, (u, vals) in zip(names, sorted(params.items())):
            symbols[name] = (u, base)
            values[name] = list(vals)
        # a representative with a plain edge on each symbol
        rep = d
        for name, (u, w) in symbols.items():
            rep = rep.with_label(u, w, max(values[name]))
        fam = ParamFamily(rep, symbols, {s: min(v) for s, v in values.items()},
                          {s: max(v) for s, v in values.items()},
                          "; ".join(f"{s} = {','.join(map(str, v))}" for s, v in values.items()))
        fams.append(FamilyRecord(fam, canonical_form(rep, use_marks=True), values, members=sorted(keys)))
        uncovered -= set(keys)
    fams.sort(key=lambda f: f.members[0])
    return fams


def _single_family(rec: DiagramRecord) -> FamilyRecord:
    fam = ParamFamily(rec.diagram, {}, {}, {}, "single diagram")
    return FamilyRecord(fam, rec.key, {}, members=[rec.key])


# -- verification -----------------------------------------------------------------


def _product_split(d: CoxeterDiagram) -> tuple | None:
    M = d.matrix
    N = d.order
    for a in range(3, N - 2):
        for first in combinations(range(N), a):
            if 0 not in first:
                continue
            second = [x for x in range(N) if x not in first]
            good = True
            for half in (list(first), second):
                if len(component_indices(M, half)) != 1 or classify_indices(M, half) is not None:
                    good = False
                    break
                if not all(is_elliptic_indices(M, [x for x in half if x != v]) for v in half):
                    good = False
                    break
            if good:
                return list(first), second
    return None


def verify_polytope_diagram(d: CoxeterDiagram, n: int) -> dict:
    """Check that d is the diagram of a finite-volume n-polytope with n+2 facets."""
    checks = []

    def add(name, ok, detail, condition):
        checks.append({"check": name, "pass": bool(ok), "detail": detail, "condition": condition})

    M = d.matrix
    add("facet_count", d.order == n + 2, f"{d.order} nodes for n = {n}", "an n-polytope with n+2 facets")
    has_dotted = any(isinstance(m, Dotted) for m in d.edges.values())
    sig = diagram_signature(d)
    add("signature", sig == Signature(n, 1, 1), f"signature {list(sig)}",
        "Gram matrix of signature (n, 1, 1)")
    det = diagram_determinant(d)
    add("det_vs_corank", det.is_zero() == (sig.corank >= 1), f"det ~ {det.approx(12)}, corank {sig.corank}",
        "determinant vanishes exactly when the corank is positive")

    kind = None
    census = []
    gale = None
    apexes = pyramid_apexes(d) if not has_dotted else []
    if apexes:
        kind = "pyramid"
        v = d.index(apexes[0])
        rest = [x for x in range(d.order) if x != v]
        S1, S2 = component_indices(M, rest)
        census = _census(M, S1, S2, d.nodes)
        ok_l = all(has_unique_parabolic_at(
            CoxeterDiagram.from_matrix([[M[x][y] for y in S + [v]] for x in S + [v]]), str(len(S) + 1))
            for S in (S1, S2))
        add("quasi_lanner_halves", ok_l, f"base node {apexes[0]}",
            "each parabolic part plus the base node is quasi-Lannér with that part as its only "
            "parabolic subdiagram")
        add("apex_unique", len(apexes) == 1, f"candidate base nodes {apexes}",
            "exactly one node splits the diagram into two parabolic parts")
        try:
            gale = gale_from_multiplicities(len(S1), 1, len(S2))
        except GaleError:
            gale = None
        add("parabolic_rank", len(S1) + len(S2) - 2 == n - 1, f"ranks {len(S1) - 1} + {len(S2) - 1}",
            "parabolic parts have ranks summing to n - 1")
    else:
        split = _product_split(d) if not has_dotted and d.order <= 12 else None
        if split is not None:
            kind = "product"
            L1, L2 = split
            census = _census(M, L1, L2, d.nodes)
            add("lanner_halves", True, f"halves {[d.nodes[x] for x in L1]} / {[d.nodes[x] for x in L2]}",
                "the diagram is a disjoint union of two Lannér diagrams")
            add("det_zero", det.is_zero(), f"det ~ {det.approx(12)}",
                "more than n+1 facets forces a vanishing determinant")
            try:
                gale = gale_from_multiplicities(len(L1), 0, len(L2))
            except GaleError:
                gale = None
    add("decomposition", kind is not None, kind or "neither a product nor a pyramid decomposition",
        "facets split as a product of two simplices or a pyramid over one")
    add("gale", gale is not None and coxeter_admissible(gale) and gale.n == n,
        gale.to_json() if gale else None, "a valid one-dimensional Gale diagram with q in {0, 1}")
    bad = [c for c in census if c[2] == "bad"]
    add("vertex_links", kind is not None and not bad,
        {"elliptic": sum(c[2] == "elliptic" for c in census),
         "parabolic": sum(c[2] == "parabolic" for c in census), "bad": [list(c[:2]) for c in bad]},
        "every vertex link is elliptic or parabolic")
    return {
        "dimension": n,
        "type": kind,
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "signature": sig.to_json(),
        "det": det.to_json(),
        "vertex_links": [list(c) for c in census],
    }


# -- output -------------------------------------------------------------------------


FORMATS = ("json", "text", "graph")


def emit_tables(result: ClassificationResult, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(result.to_json(), indent=1, sort_keys=False) + "\n"
    if fmt == "text":
        out = [f"# {result.search} search, parameters {json.dumps(result.params, sort_keys=True)}"]
        for n in sorted(set(result.dimensions) | set(result.families)):
            recs = result.dimensions.get(n, [])
            out.append(f"# dimension {n}: {len(recs)} diagram(s)")
            for i, rec in enumerate(recs, 1):
                out.append(f"# diagram {n}.{i} signature {list(rec.signature) if rec.signature else None}")
                out.append(format_diagram(rec.diagram).rstrip("\n"))
                out.append("")
            for i, fam in enumerate(result.families.get(n, []), 1):
                if not fam.family.symbols:
                    continue
                out.append(f"# family {n}.{i}: {fam.family.constraint_text()}")
                for s, (u, v) in fam.family.symbols.items():
                    out.append(f"# symbol {s} on edge {u}-{v}")
                if fam.root_report is not None:
                    out.append(f"# det zeros {fam.root_report.exact_zero_labels}; {fam.root_report.tail_status}")
                out.append("\n".join("# | " + line for line in format_diagram(fam.family.base).splitlines()))
                out.append("")
        return "\n".join(out) + "\n"
    if fmt == "graph":
        out = []
        for n in sorted(result.dimensions):
            for i, rec in enumerate(result.dimensions[n], 1):
                out.append(to_graphviz(rec.diagram, f"D{n}_{i}"))
        return "\n".join(out)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
