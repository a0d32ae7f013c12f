"""Coxeter diagrams: construction, subdiagrams, text format and canonical keys.

Edge labels are plain Python values:

* an ``int`` m >= 3 for a dihedral angle pi/m,
* ``BOLD`` (``math.inf``) for parallel facets,
* a :class:`Dotted` instance for diverging facets, carrying cosh of the distance.

A missing edge means label 2 (angle pi/2); label 2 is never stored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

BOLD = math.inf
NO_EDGE = 2


@dataclass(frozen=True, order=True)
class Dotted:
    weight: Fraction

    def __post_init__(self):
        w = Fraction(self.weight)
        if w <= 1:
            raise ValueError(f"dotted weight must exceed 1, got {w}")
        object.__setattr__(self, "weight", w)

    def __str__(self) -> str:
        return f"dotted {self.weight.numerator}/{self.weight.denominator}"


Label = Union[int, float, Dotted]


class DiagramError(ValueError):
    """Malformed diagram data."""


class DiagramSyntaxError(DiagramError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def check_label(m) -> Label:
    """Validate a stored label and return it in normalized form."""
    if isinstance(m, Dotted):
        return m
    if m == BOLD:
        return BOLD
    if isinstance(m, bool) or not isinstance(m, int):
        if isinstance(m, float) and m.is_integer():
            m = int(m)
        else:
            raise DiagramError(f"invalid edge label {m!r}")
    if m == 2:
        raise DiagramError("label 2 is encoded by the absence of an edge")
    if m < 2:
        raise DiagramError(f"plain label must be >= 3, got {m}")
    return m


def label_sort_key(m) -> tuple:
    """Total order on labels (including the no-edge value 2)."""
    if isinstance(m, Dotted):
        return (2, m.weight)
    if m == BOLD:
        return (1, 0)
    return (0, m)


def label_token(m) -> str:
    if isinstance(m, Dotted):
        return str(m)
    if m == BOLD:
        return "inf"
    return str(m)


class CoxeterDiagram:
    """Immutable labeled graph on the facets of a polytope.

    Internally the diagram is a Coxeter-matrix-like table ``matrix`` with
    ``matrix[i][j] == 2`` for non-adjacent nodes (diagonal entries are 1).
    """

    __slots__ = ("nodes", "matrix", "marks", "_index", "_hash")

    def __init__(self, nodes: Sequence, edges: Mapping | Iterable = (), marks: Mapping | None = None):
        nodes = tuple(str(v) for v in nodes)
        if len(set(nodes)) != len(nodes):
            raise DiagramError("node identifiers must be unique")
        index = {v: i for i, v in enumerate(nodes)}
        k = len(nodes)
        rows = [[NO_EDGE] * k for _ in range(k)]
        for i in range(k):
            rows[i][i] = 1
        items = edges.items() if isinstance(edges, Mapping) else edges
        seen = set()
        for item in items:
            if isinstance(edges, Mapping):
                (u, v), m = item
            else:
                u, v, m = item
            u, v = str(u), str(v)
            if u not in index or v not in index:
                raise DiagramError(f"unknown node in edge ({u}, {v})")
            if u == v:
                raise DiagramError(f"self-loop at node {u}")
            pair = frozenset((u, v))
            if pair in seen:
                raise DiagramError(f"duplicate edge ({u}, {v})")
            seen.add(pair)
            m = check_label(m)
            i, j = index[u], index[v]
            rows[i][j] = rows[j][i] = m
        self.nodes = nodes
        self.matrix = tuple(tuple(r) for r in rows)
        self.marks = {str(v): str(t) for v, t in (marks or {}).items()}
        for v in self.marks:
            if v not in index:
                raise DiagramError(f"mark on unknown node {v}")
        self._index = index
        self._hash = None

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], nodes: Sequence | None = None, marks=None) -> "CoxeterDiagram":
        """Build from a full label table where 2 (or 0/None) means no edge."""
        k = len(matrix)
        nodes = [str(i + 1) for i in range(k)] if nodes is None else nodes
        edges = []
        for i in range(k):
            for j in range(i + 1, k):
                m = matrix[i][j]
                if m not in (2, 0, None):
                    edges.append((nodes[i], nodes[j], m))
        return cls(nodes, edges, marks)

    # -- basic accessors -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def index(self, v) -> int:
        try:
            return self._index[str(v)]
        except KeyError:
            raise DiagramError(f"unknown node {v}") from None

    def label(self, u, v) -> Label:
        return self.matrix[self.index(u)][self.index(v)]

    @property
    def edges(self) -> dict:
        out = {}
        k = self.order
        for i in range(k):
            for j in range(i + 1, k):
                m = self.matrix[i][j]
                if m != NO_EDGE:
                    out[(self.nodes[i], self.nodes[j])] = m
        return out

    def labels(self) -> set:
        return {m for m in self.edges.values()}

    def neighbors(self, v) -> list:
        i = self.index(v)
        return [self.nodes[j] for j, m in enumerate(self.matrix[i]) if j != i and m != NO_EDGE]

    def with_marks(self, marks: Mapping) -> "CoxeterDiagram":
        return CoxeterDiagram(self.nodes, self.edges, marks)

    def with_label(self, u, v, m) -> "CoxeterDiagram":
        """Copy with the label of pair (u, v) replaced; m == 2 removes the edge."""
        edges = {frozenset(e): lab for e, lab in self.edges.items()}
        key = frozenset((str(u), str(v)))
        self.index(u), self.index(v)
        if m == NO_EDGE:
            edges.pop(key, None)
        else:
            edges[key] = m
        return CoxeterDiagram(self.nodes, [(*sorted(e, key=self.index), lab) for e, lab in edges.items()], self.marks)

    def relabel(self, mapping: Mapping) -> "CoxeterDiagram":
        new_nodes = [str(mapping[v]) for v in self.nodes]
        edges = [(mapping[u], mapping[v], m) for (u, v), m in self.edges.items()]
        marks = {mapping[v]: t for v, t in self.marks.items()}
        return CoxeterDiagram(new_nodes, edges, marks)

    def permuted(self, order: Sequence) -> "CoxeterDiagram":
        """Same diagram with nodes listed in the given order."""
        if sorted(order) != sorted(self.nodes):
            raise DiagramError("permutation must list every node once")
        return CoxeterDiagram(order, self.edges, self.marks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoxeterDiagram):
            return NotImplemented
        return self.nodes == other.nodes and self.matrix == other.matrix and self.marks == other.marks

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nodes, self.matrix, tuple(sorted(self.marks.items()))))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{u}-{v}:{label_token(m)}" for (u, v), m in self.edges.items())
        return f"CoxeterDiagram(nodes={list(self.nodes)}, edges=[{body}])"


# -- subdiagrams and components ---------------------------------------------


def subdiagram(d: CoxeterDiagram, keep: Iterable) -> CoxeterDiagram:
    """Induced subdiagram on ``keep``, listed in the order of ``d.nodes``."""
    keep = {str(v) for v in keep}
    for v in keep:
        d.index(v)
    nodes = [v for v in d.nodes if v in keep]
    edges = [(u, v, m) for (u, v), m in d.edges.items() if u in keep and v in keep]
    marks = {v: t for v, t in d.marks.items() if v in keep}
    return CoxeterDiagram(nodes, edges, marks)


def remove_nodes(d: CoxeterDiagram, drop: Iterable) -> CoxeterDiagram:
    drop = {str(v) for v in drop}
    for v in drop:
        d.index(v)
    return subdiagram(d, [v for v in d.nodes if v not in drop])


def component_indices(matrix: Sequence[Sequence], idx: Sequence[int]) -> list[list[int]]:
    """Connected components of the induced subgraph on ``idx`` (index lists)."""
    remaining = list(idx)
    pool = set(remaining)
    comps = []
    for start in remaining:
        if start not in pool:
            continue
        pool.discard(start)
        comp = [start]
        stack = [start]
        while stack:
            u = stack.pop()
            row = matrix[u]
            for w in list(pool):
                if row[w] != NO_EDGE:
                    pool.discard(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def connected_components(d: CoxeterDiagram) -> list[CoxeterDiagram]:
    comps = component_indices(d.matrix, range(d.order))
    return [subdiagram(d, [d.nodes[i] for i in c]) for c in comps]


def is_connected(d: CoxeterDiagram) -> bool:
    return d.order > 0 and len(component_indices(d.matrix, range(d.order))) == 1


def is_adjacent(d: CoxeterDiagram, a: Iterable, b: Iterable) -> bool:
    a = [d.index(v) for v in a]
    b = [d.index(v) for v in b]
    if set(a) & set(b):
        raise DiagramError("node sets must be disjoint")
    return any(d.matrix[i][j] != NO_EDGE for i in a for j in b)


# -- text format ------------------------------------------------------------

_TOKEN = re.compile(r"\S+")


def parse_diagram(text: str) -> CoxeterDiagram:
    """Parse the line-oriented diagram format.

    ``nodes: <k>`` or ``nodes: a b c``, then ``edge u v m``,
    ``edge u v inf`` or ``edge u v dotted p/q``, and ``mark u base``.
    """
    nodes = None
    edges = []
    seen = {}
    marks = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        head, col = tokens[0]
        if head == "nodes:" or head.startswith("nodes:"):
            if nodes is not None:
                raise DiagramSyntaxError("repeated nodes declaration", lineno, col)
            rest = [t for t, _ in tokens[1:]]
            if head != "nodes:":
                rest.insert(0, head[len("nodes:"):])
            if len(rest) == 1 and rest[0].isdigit():
                k = int(rest[0])
                if k < 1:
                    raise DiagramSyntaxError("a diagram needs at least one node", lineno, col)
                nodes = [str(i) for i in range(1, k + 1)]
            elif rest:
                nodes = rest
                if len(set(nodes)) != len(nodes):
                    raise DiagramSyntaxError("duplicate node identifier", lineno, col)
            else:
                raise DiagramSyntaxError("empty nodes declaration", lineno, col)
            continue
        if nodes is None:
            raise DiagramSyntaxError("nodes must be declared first", lineno, col)
        if head == "edge":
            if len(tokens) < 4:
                raise DiagramSyntaxError("expected: edge <u> <v> <label>", lineno, col)
            (u, cu), (v, cv), (lab, cl) = tokens[1], tokens[2], tokens[3]
            for name, c in ((u, cu), (v, cv)):
                if name not in nodes:
                    raise DiagramSyntaxError(f"unknown node {name!r}", lineno, c)
            if u == v:
                raise DiagramSyntaxError("self-loop", lineno, cv)
            pair = frozenset((u, v))
            if pair in seen:
                raise DiagramSyntaxError(f"duplicate edge {u} {v} (first on line {seen[pair]})", lineno, col)
            seen[pair] = lineno
            if lab == "inf":
                m = BOLD
                extra = tokens[4:]
            elif lab == "dotted":
                if len(tokens) < 5:
                    raise DiagramSyntaxError("dotted edge needs a weight p/q", lineno, cl)
                wtok, wc = tokens[4]
                try:
                    w = Fraction(wtok)
                except (ValueError, ZeroDivisionError):
                    raise DiagramSyntaxError(f"bad dotted weight {wtok!r}", lineno, wc) from None
                if w <= 1:
                    raise DiagramSyntaxError("dotted weight must exceed 1", lineno, wc)
                m = Dotted(w)
                extra = tokens[5:]
            else:
                if not re.fullmatch(r"\d+", lab):
                    raise DiagramSyntaxError(f"bad edge label {lab!r}", lineno, cl)
                m = int(lab)
                if m == 2:
                    raise DiagramSyntaxError("label 2 must be given by omitting the edge", lineno, cl)
                if m < 3:
                    raise DiagramSyntaxError("plain label must be >= 3", lineno, cl)
                extra = tokens[4:]
            if extra:
                raise DiagramSyntaxError("trailing tokens", lineno, extra[0][1])
            edges.append((u, v, m))
        elif head == "mark":
            if len(tokens) != 3:
                raise DiagramSyntaxError("expected: mark <u> <tag>", lineno, col)
            (u, cu), (tag, _) = tokens[1], tokens[2]
            if u not in nodes:
                raise DiagramSyntaxError(f"unknown node {u!r}", lineno, cu)
            marks[u] = tag
        else:
            raise DiagramSyntaxError(f"unknown directive {head!r}", lineno, col)
    if nodes is None:
        raise DiagramSyntaxError("missing nodes declaration", 1, 1)
    return CoxeterDiagram(nodes, edges, marks)


def format_diagram(d: CoxeterDiagram) -> str:
    lines = ["nodes: " + " ".join(d.nodes)]
    for (u, v), m in d.edges.items():
        lines.append(f"edge {u} {v} {label_token(m)}")
    for v in d.nodes:
        if v in d.marks:
            lines.append(f"mark {v} {d.marks[v]}")
    return "\n".join(lines) + "\n"


def to_graphviz(d: CoxeterDiagram, name: str = "G") -> str:
    """DOT description: m-2 parallel strokes for m <= 6, a label above that."""
    out = [f"graph {name} {{", "  node [shape=circle, label=\"\", width=0.15];"]
    for v in d.nodes:
        style = ", style=filled, fillcolor=black" if d.marks.get(v) == "base" else ""
        out.append(f"  \"{v}\" [xlabel=\"{v}\"{style}];")
    for (u, v), m in d.edges.items():
        if isinstance(m, Dotted):
            attrs = f"style=dashed, label=\"{m.weight}\""
        elif m == BOLD:
            attrs = "style=bold, penwidth=3"
        elif m <= 6:
            attrs = f"color=\"{':invis:'.join(['black'] * (m - 2))}\", multiplicity={m - 2}"
        else:
            attrs = f"label=\"{m}\""
        out.append(f"  \"{u}\" -- \"{v}\" [{attrs}];")
    out.append("}")
    return "\n".join(out) + "\n"


# -- canonical form ---------------------------------------------------------


def _refine(matrix, idx, colors):
    """Iterated colour refinement; returns a new colour dict (ints, 0-based)."""
    ncolors = len(set(colors.values()))
    while True:
        sig = {}
        for v in idx:
            row = matrix[v]
            neigh = sorted((label_sort_key(row[u]), colors[u]) for u in idx if u != v and row[u] != NO_EDGE)
            sig[v] = (colors[v], tuple(neigh))
        ranks = {s: r for r, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in idx}
        if len(ranks) == ncolors:
            return new
        colors, ncolors = new, len(ranks)


def _encode(matrix, order, mark_codes):
    parts = [str(len(order))]
    parts.append(",".join(mark_codes[v] for v in order))
    k = len(order)
    for a in range(k):
        row = matrix[order[a]]
        parts.append(",".join(label_token(row[order[b]]) for b in range(a + 1, k)))
    return "|".join(parts)


def _canon_connected(matrix, idx, mark_codes):
    """Canonical (code, order) for one connected component."""
    init = {v: (mark_codes[v],) for v in idx}
    ranks = {s: r for r, s in enumerate(sorted(set(init.values())))}
    colors = _refine(matrix, idx, {v: ranks[init[v]] for v in idx})
    best = [None, None]
    autos = []

    def orbit_reps(cell, prefix):
        parent = {v: v for v in cell}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in autos:
            if all(g[p] == p for p in prefix):
                for v in cell:
                    w = g[v]
                    if w in parent:
                        a, b = find(v), find(w)
                        if a != b:
                            parent[max(a, b)] = min(a, b)
        return find

    def search(colors, prefix):
        cells = {}
        for v in idx:
            cells.setdefault(colors[v], []).append(v)
        if len(cells) == len(idx):
            order = sorted(idx, key=colors.__getitem__)
            code = _encode(matrix, order, mark_codes)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, order
            elif code == best[0]:
                autos.append(dict(zip(best[1], order)))
            return
        target = min((c for c, vs in cells.items() if len(vs) > 1))
        cell = sorted(cells[target])
        done = []
        for v in cell:
            find = orbit_reps(cell, prefix)
            if any(find(v) == find(u) for u in done):
                continue
            done.append(v)
            split = {u: (2 * colors[u] + (0 if u == v else 1)) for u in idx}
            ranks = {s: r for r, s in enumerate(sorted(set(split.values())))}
            search(_refine(matrix, idx, {u: ranks[split[u]] for u in idx}), prefix + [v])

    search(colors, [])
    return best[0], best[1]


def canonical_order(d: CoxeterDiagram, use_marks: bool = False) -> list[str]:
    """Node order realising the canonical form."""
    return [d.nodes[i] for i in _canonical(d, use_marks)[1]]


def _canonical(d: CoxeterDiagram, use_marks: bool):
    matrix = d.matrix
    mark_codes = {i: (d.marks.get(v, "") if use_marks else "") for i, v in enumerate(d.nodes)}
    comps = component_indices(matrix, range(d.order))
    parts = sorted(_canon_connected(matrix, c, mark_codes) for c in comps)
    order = [v for _, o in parts for v in o]
    return _encode(matrix, order, mark_codes), order


def canonical_form(d: CoxeterDiagram, use_marks: bool = False) -> bytes:
    """Isomorphism-invariant key; equal keys iff label-preserving isomorphism."""
    return _canonical(d, use_marks)[0].encode()


def canonical_diagram(d: CoxeterDiagram, use_marks: bool = False) -> CoxeterDiagram:
    """The diagram relabelled 1..k in canonical order."""
    order = canonical_order(d, use_marks)
    mapping = {v: str(i + 1) for i, v in enumerate(order)}
    return d.permuted(order).relabel(mapping)
