"""Elliptic, parabolic, Lannér and quasi-Lannér diagrams.

Recognition is structural (connected finite and affine Coxeter diagrams are
matched by shape) with an exact spectral route used for cross-validation.
The low-level helpers work on a label table plus a list of node indices so
the searches can call them without building diagram objects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .diagram import (
    BOLD,
    NO_EDGE,
    CoxeterDiagram,
    canonical_form,
    component_indices,
    subdiagram,
)
from .exact import ParamFamily, Signature, diagram_signature

log = logging.getLogger(__name__)

ELLIPTIC = "E"
AFFINE = "A"

DEFAULT_LABEL_CAP = 12


class RecognizerDisagreement(AssertionError):
    """Structural and spectral classification differ."""


class CapTooSmall(RuntimeError):
    """An accepted diagram uses the largest label searched."""


# -- structural recognition of connected diagrams ----------------------------


def _path_type(seq: list) -> tuple | None:
    k = len(seq) + 1
    rseq = seq[::-1]
    if all(m == 3 for m in seq):
        return ELLIPTIC, f"A{k}"
    if k >= 3 and (seq[0] == 4 and all(m == 3 for m in seq[1:]) or rseq[0] == 4 and all(m == 3 for m in rseq[1:])):
        return ELLIPTIC, f"B{k}"
    if seq == [3, 4, 3]:
        return ELLIPTIC, "F4"
    if seq in ([5, 3], [3, 5]):
        return ELLIPTIC, "H3"
    if seq in ([5, 3, 3], [3, 3, 5]):
        return ELLIPTIC, "H4"
    if k >= 3 and seq[0] == 4 and seq[-1] == 4 and all(m == 3 for m in seq[1:-1]):
        return AFFINE, f"~C{k - 1}"
    if seq in ([3, 3, 4, 3], [3, 4, 3, 3]):
        return AFFINE, "~F4"
    if seq in ([3, 6], [6, 3]):
        return AFFINE, "~G2"
    return None


_BRANCH_ALL3 = {
    (1, 2, 2): (ELLIPTIC, "E6"),
    (1, 2, 3): (ELLIPTIC, "E7"),
    (1, 2, 4): (ELLIPTIC, "E8"),
    (2, 2, 2): (AFFINE, "~E6"),
    (1, 3, 3): (AFFINE, "~E7"),
    (1, 2, 5): (AFFINE, "~E8"),
}


def component_type(M: Sequence[Sequence], comp: Sequence[int]) -> tuple | None:
    """(kind, name) of a connected diagram, or None if neither finite nor affine."""
    k = len(comp)
    if k == 1:
        return ELLIPTIC, "A1"
    if k == 2:
        m = M[comp[0]][comp[1]]
        if m == BOLD:
            return AFFINE, "~A1"
        if isinstance(m, int):
            return ELLIPTIC, {3: "A2", 4: "B2", 6: "G2"}.get(m, f"I2({m})")
        return None
    adj = {v: [] for v in comp}
    ecount = 0
    fours = 0
    for a in range(k):
        u = comp[a]
        row = M[u]
        for b in range(a + 1, k):
            v = comp[b]
            m = row[v]
            if m == NO_EDGE:
                continue
            if not isinstance(m, int) or m > 6:
                return None
            ecount += 1
            if ecount >= k + 1:
                return None
            if m == 4:
                fours += 1
            adj[u].append(v)
            adj[v].append(u)
    degs = {v: len(n) for v, n in adj.items()}
    if ecount == k:
        if all(d == 2 for d in degs.values()) and all(M[u][v] == 3 for u in comp for v in adj[u]):
            return AFFINE, f"~A{k - 1}"
        return None
    maxdeg = max(degs.values())
    if maxdeg > 4:
        return None
    if maxdeg == 4:
        if k == 5 and all(M[u][v] == 3 for u in comp for v in adj[u]):
            return AFFINE, "~D4"
        return None
    branch = [v for v in comp if degs[v] == 3]
    if not branch:
        start = next(v for v in comp if degs[v] == 1)
        seq = []
        prev, cur = None, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            seq.append(M[cur][nxt[0]])
            prev, cur = cur, nxt[0]
        return _path_type(seq)
    if any(M[u][v] not in (3, 4) for u in comp for v in adj[u]) or fours > 1:
        return None
    if len(branch) == 1:
        c = branch[0]
        arms = []
        for first in adj[c]:
            labs = [M[c][first]]
            prev, cur = c, first
            while degs[cur] == 2:
                nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
                labs.append(M[cur][nxt])
                prev, cur = cur, nxt
            if degs[cur] != 1:
                return None
            arms.append(labs)
        if fours == 0:
            return _BRANCH_ALL3.get(tuple(sorted(len(a) for a in arms))) or (
                (ELLIPTIC, f"D{k}") if sorted(len(a) for a in arms)[:2] == [1, 1] else None
            )
        four_arm = next(a for a in arms if 4 in a)
        others = [a for a in arms if a is not four_arm]
        if four_arm[-1] == 4 and all(len(a) == 1 for a in others):
            return AFFINE, f"~B{k - 1}"
        return None
    if len(branch) == 2 and fours == 0:
        for b in branch:
            leaves = [w for w in adj[b] if degs[w] == 1]
            if len(leaves) != 2:
                return None
        return AFFINE, f"~D{k - 1}"
    return None


def classify_indices(M, idx: Sequence[int]) -> str | None:
    """'E' if the induced diagram is elliptic, 'P' if parabolic, else None."""
    if not idx:
        return ELLIPTIC
    kinds = set()
    for comp in component_indices(M, idx):
        t = component_type(M, comp)
        if t is None:
            return None
        kinds.add(t[0])
        if len(kinds) > 1:
            return None
    return ELLIPTIC if kinds == {ELLIPTIC} else "P"


def is_elliptic_indices(M, idx) -> bool:
    for comp in component_indices(M, idx):
        t = component_type(M, comp)
        if t is None or t[0] != ELLIPTIC:
            return False
    return True


def admissible_indices(M, idx) -> bool:
    """Every component finite or affine (hereditary)."""
    for comp in component_indices(M, idx):
        if component_type(M, comp) is None:
            return False
    return True


def component_names(d: CoxeterDiagram) -> list[str] | None:
    out = []
    for comp in component_indices(d.matrix, range(d.order)):
        t = component_type(d.matrix, comp)
        if t is None:
            return None
        out.append(t[1])
    return sorted(out)


# -- spectral recognition -----------------------------------------------------


def spectral_kind(d: CoxeterDiagram) -> str | None:
    """Exact route: 'E', 'P' or None from signatures of components."""
    if d.order == 0:
        return ELLIPTIC
    sig = diagram_signature(d)
    if sig == Signature(d.order, 0, 0):
        return ELLIPTIC
    if sig.neg:
        return None
    comps = component_indices(d.matrix, range(d.order))
    for comp in comps:
        sub = subdiagram(d, [d.nodes[i] for i in comp])
        s = diagram_signature(sub)
        if s != Signature(len(comp) - 1, 0, 1):
            return None
    return "P"


def _structural_kind(d: CoxeterDiagram) -> str | None:
    return classify_indices(d.matrix, list(range(d.order)))


def _kind(d: CoxeterDiagram, method: str) -> str | None:
    if method == "structural":
        return _structural_kind(d)
    if method == "spectral":
        return spectral_kind(d)
    if method == "both":
        a, b = _structural_kind(d), spectral_kind(d)
        if a != b:
            raise RecognizerDisagreement(f"structural={a} spectral={b} for {d!r}")
        return a
    raise ValueError(f"unknown method {method!r}")


def is_elliptic(d: CoxeterDiagram, method: str = "structural") -> bool:
    """Positive definite Gram matrix (all components finite type)."""
    return _kind(d, method) == ELLIPTIC


def is_parabolic(d: CoxeterDiagram, method: str = "structural") -> bool:
    """Nonempty, and every component is a connected affine diagram."""
    return d.order > 0 and _kind(d, method) == "P"


def parabolic_rank(d: CoxeterDiagram) -> int:
    if not is_parabolic(d):
        raise ValueError("parabolic_rank needs a parabolic diagram")
    return d.order - len(component_indices(d.matrix, range(d.order)))


# -- classes -----------------------------------------------------------------

KINDS = ("Elliptic", "Parabolic", "Lanner", "QuasiLanner", "OtherHyperbolic", "Inadmissible")


@dataclass
class DiagramClass:
    kind: str
    parabolic_subdiagrams: list = field(default_factory=list)
    bad_subdiagram: tuple | None = None

    def to_json(self) -> dict:
        out = {"class": self.kind}
        if self.parabolic_subdiagrams:
            out["parabolic_subdiagrams"] = [list(p) for p in self.parabolic_subdiagrams]
        if self.bad_subdiagram is not None:
            out["minimal_bad_subdiagram"] = list(self.bad_subdiagram)
        return out


def _codim1_kinds(M, idx):
    out = []
    for v in idx:
        rest = [u for u in idx if u != v]
        out.append((v, classify_indices(M, rest), rest))
    return out


def _minimal_bad(M, idx):
    cur = list(idx)
    while True:
        for v in cur:
            rest = [u for u in cur if u != v]
            if rest and classify_indices(M, rest) is None:
                cur = rest
                break
        else:
            return cur


def classify_diagram(d: CoxeterDiagram) -> DiagramClass:
    M = d.matrix
    idx = list(range(d.order))
    kind = classify_indices(M, idx)
    if kind == ELLIPTIC:
        return DiagramClass("Elliptic")
    if kind == "P":
        return DiagramClass("Parabolic")
    connected = len(component_indices(M, idx)) == 1
    subs = _codim1_kinds(M, idx)
    bad = tuple(d.nodes[i] for i in _minimal_bad(M, idx))
    if connected:
        if all(k == ELLIPTIC for _, k, _ in subs):
            return DiagramClass("Lanner", bad_subdiagram=bad)
        ok = True
        parab = []
        for v, k, rest in subs:
            if k is None:
                ok = False
                break
            if k == "P":
                if len(component_indices(M, rest)) != 1:
                    ok = False
                    break
                parab.append(tuple(d.nodes[i] for i in rest))
        if ok and parab:
            return DiagramClass("QuasiLanner", parabolic_subdiagrams=parab, bad_subdiagram=bad)
    sig = diagram_signature(d)
    if sig.neg == 1 and sig.pos == d.order - 1 - sig.corank:
        return DiagramClass("OtherHyperbolic", bad_subdiagram=bad)
    return DiagramClass("Inadmissible", bad_subdiagram=bad)


def filter_unique_parabolic(diagrams: Iterable[CoxeterDiagram]) -> list[tuple[CoxeterDiagram, str]]:
    """(diagram, v) pairs where d minus v is the only parabolic proper subdiagram."""
    out = []
    for d in diagrams:
        M = d.matrix
        idx = list(range(d.order))
        kinds = _codim1_kinds(M, idx)
        if any(k is None for _, k, _ in kinds):
            continue
        parab = [(v, rest) for v, k, rest in kinds if k == "P"]
        if len(parab) != 1:
            continue
        v, rest = parab[0]
        if len(component_indices(M, rest)) != 1:
            continue
        if len(component_indices(M, idx)) != 1 or classify_indices(M, idx) is not None:
            continue
        out.append((d, d.nodes[v]))
    return out


def has_unique_parabolic_at(d: CoxeterDiagram, v) -> bool:
    """d minus v connected parabolic, every other d minus u elliptic, d connected and hyperbolic."""
    M = d.matrix
    vi = d.index(v)
    idx = list(range(d.order))
    if len(component_indices(M, idx)) != 1 or classify_indices(M, idx) is not None:
        return False
    for u in idx:
        rest = [w for w in idx if w != u]
        if u == vi:
            if classify_indices(M, rest) != "P" or len(component_indices(M, rest)) != 1:
                return False
        elif not is_elliptic_indices(M, rest):
            return False
    return True


# -- catalog generation by one-node extension ---------------------------------


def _bfs_order(M, k: int) -> list[int]:
    if k == 0:
        return []
    seen = [0]
    for u in seen:
        for w in range(k):
            if w not in seen and M[u][w] != NO_EDGE:
                seen.append(w)
    seen += [w for w in range(k) if w not in seen]
    return seen


def extend_by_node(base: Sequence[Sequence], labels: Sequence, partial_ok) -> Iterable[list[list]]:
    """All ways to join a new node to ``base`` with the given labels.

    ``partial_ok(M, idx)`` is checked on every proper prefix subdiagram
    containing the new node; completed tables are yielded unchecked.
    """
    k = len(base)
    order = _bfs_order(base, k)
    M = [list(r) + [NO_EDGE] for r in base] + [[NO_EDGE] * k + [1]]
    new = k

    def rec(pos):
        if pos == k:
            yield [list(r) for r in M]
            return
        v = order[pos]
        prefix = order[: pos + 1] + [new]
        for m in labels:
            M[v][new] = M[new][v] = m
            if pos + 1 < k and not partial_ok(M, prefix):
                continue
            yield from rec(pos + 1)
        M[v][new] = M[new][v] = NO_EDGE

    yield from rec(0)


class Validator:
    """Counts structural-versus-spectral checks and raises on disagreement."""

    def __init__(self):
        self.checked = 0

    def check(self, M) -> None:
        d = CoxeterDiagram.from_matrix(M)
        a = _structural_kind(d)
        b = spectral_kind(d)
        self.checked += 1
        if a != b:
            raise RecognizerDisagreement(f"structural={a} spectral={b} for {d!r}")


def _dedup(mats) -> list[CoxeterDiagram]:
    out = {}
    for M in mats:
        d = CoxeterDiagram.from_matrix(M)
        key = canonical_form(d)
        if key not in out:
            out[key] = d
    return [out[k] for k in sorted(out)]


def _labels(cap: int, bold: bool) -> list:
    labs = list(range(2, cap + 1))
    return labs + [BOLD] if bold else labs


def _max_plain(d: CoxeterDiagram) -> int:
    return max((m for m in d.edges.values() if isinstance(m, int)), default=2)


@lru_cache(maxsize=None)
def _connected_catalog(order: int, cap: int) -> tuple[tuple, tuple]:
    """Connected elliptic and connected affine diagrams of the given order."""
    if order == 1:
        return (CoxeterDiagram(["1"]),), ()
    ell_prev, _ = _connected_catalog(order - 1, cap)
    ell, aff = [], []
    for base in ell_prev:
        for M in extend_by_node(base.matrix, _labels(cap, True), is_elliptic_indices):
            idx = list(range(order))
            if len(component_indices(M, idx)) != 1:
                continue
            kind = classify_indices(M, idx)
            if kind == ELLIPTIC:
                ell.append(M)
            elif kind == "P":
                aff.append(M)
    return tuple(_dedup(ell)), tuple(_dedup(aff))


def connected_elliptic(order: int, label_cap: int = DEFAULT_LABEL_CAP) -> list[CoxeterDiagram]:
    return list(_connected_catalog(order, label_cap)[0])


def connected_affine(order: int, label_cap: int = DEFAULT_LABEL_CAP) -> list[CoxeterDiagram]:
    """Connected affine diagrams with ``order`` nodes (rank order - 1)."""
    return list(_connected_catalog(order, label_cap)[1])


def _qualifies_lanner(M, idx) -> bool:
    return is_elliptic_indices(M, idx)


def _qualifies_ql_partial(M, idx) -> bool:
    kind = classify_indices(M, idx)
    if kind == ELLIPTIC:
        return True
    return kind == "P" and len(component_indices(M, idx)) == 1


def _triangle_family(symbols: dict, base: CoxeterDiagram, constraint: str, lower: dict) -> ParamFamily:
    return ParamFamily(base=base, symbols=symbols, lower=lower, constraint=constraint)


@dataclass
class Catalog:
    order: int
    label_cap: int
    diagrams: list
    families: list = field(default_factory=list)
    note: str = ""
    validated: int = 0


def enumerate_lanner(order: int, label_cap: int = DEFAULT_LABEL_CAP, validate: bool = False) -> Catalog:
    """Lannér diagrams of the given order, re-derived by extension search."""
    if order < 2 or order > 5:
        note = "no Lannér diagrams outside orders 2..5"
        if order >= 6:
            cat = _search_lanner(order, label_cap, validate)
            if cat.diagrams:
                raise AssertionError(f"unexpected Lannér diagram of order {order}")
            cat.note = note + f" (search with labels <= {label_cap} returned none)"
            return cat
        return Catalog(order, label_cap, [], [], note)
    if order == 2:
        return Catalog(2, label_cap, [], [],
                       "order 2: only dotted edges (diverging pairs) qualify; they carry a continuous "
                       "weight and are not enumerated")
    cat = _search_lanner(order, label_cap, validate)
    if order == 3:
        base = CoxeterDiagram(["1", "2", "3"], [("1", "2", 7), ("2", "3", 7), ("1", "3", 7)])
        cat.families.append(_triangle_family(
            {"p": ("1", "2"), "q": ("2", "3"), "r": ("1", "3")}, base,
            "1/p + 1/q + 1/r < 1 (label 2 = no edge)", {"p": 2, "q": 2, "r": 2}))
        cat.note = f"concrete triangles listed for labels <= {label_cap}"
    else:
        _sentinel(cat.diagrams, label_cap)
    return cat


def _search_lanner(order, cap, validate) -> Catalog:
    val = Validator() if validate else None
    found = []
    for base in connected_elliptic(order - 1, cap):
        for M in extend_by_node(base.matrix, _labels(cap, False), _qualifies_lanner):
            idx = list(range(order))
            if val is not None:
                val.check(M)
            if len(component_indices(M, idx)) != 1 or classify_indices(M, idx) is not None:
                continue
            if all(is_elliptic_indices(M, [u for u in idx if u != v]) for v in idx):
                found.append(M)
    cat = Catalog(order, cap, _dedup(found), [], "", val.checked if val else 0)
    _assert_hyperbolic(cat.diagrams)
    return cat


def _assert_hyperbolic(diagrams) -> None:
    for d in diagrams:
        sig = diagram_signature(d)
        if sig != Signature(d.order - 1, 1, 0):
            raise AssertionError(f"simplex diagram with signature {tuple(sig)}: {d!r}")


def _sentinel(diagrams, cap):
    for d in diagrams:
        if _max_plain(d) >= cap:
            raise CapTooSmall(f"accepted diagram uses label {cap}; rerun with a larger label cap")


def enumerate_quasi_lanner(order: int, label_cap: int = DEFAULT_LABEL_CAP, validate: bool = False) -> Catalog:
    """Connected quasi-Lannér diagrams of the given order."""
    if order < 3:
        return Catalog(order, label_cap, [], [], "quasi-Lannér diagrams have at least 3 nodes")
    val = Validator() if validate else None
    bases = connected_elliptic(order - 1, label_cap) + connected_affine(order - 1, label_cap)
    found = []
    for base in bases:
        for M in extend_by_node(base.matrix, _labels(label_cap, True), _qualifies_ql_partial):
            idx = list(range(order))
            if val is not None:
                val.check(M)
            if len(component_indices(M, idx)) != 1 or classify_indices(M, idx) is not None:
                continue
            ok = True
            parab = False
            for v in idx:
                rest = [u for u in idx if u != v]
                kind = classify_indices(M, rest)
                if kind is None or kind == "P" and len(component_indices(M, rest)) != 1:
                    ok = False
                    break
                parab = parab or kind == "P"
            if ok and parab:
                found.append(M)
    cat = Catalog(order, label_cap, _dedup(found), [], "", val.checked if val else 0)
    _assert_hyperbolic(cat.diagrams)
    if order == 3:
        b1 = CoxeterDiagram(["1", "2", "3"], [("1", "2", BOLD), ("2", "3", 7), ("1", "3", 7)])
        b2 = CoxeterDiagram(["1", "2", "3"], [("1", "2", BOLD), ("2", "3", BOLD), ("1", "3", 7)])
        cat.families = [
            ParamFamily(b1, {"p": ("2", "3"), "q": ("1", "3")}, {"p": 2, "q": 2},
                        constraint="bold edge 1-2; p, q >= 2 not both 2"),
            ParamFamily(b2, {"p": ("1", "3")}, {"p": 2}, constraint="bold edges 1-2, 2-3; p >= 2"),
        ]
        cat.note = (f"concrete triangles listed for labels <= {label_cap}; the all-bold triangle is "
                    "included concretely")
    else:
        _sentinel(cat.diagrams, label_cap)
    return cat


def cross_validate(max_order: int = 10, label_cap: int = DEFAULT_LABEL_CAP) -> int:
    """Run the spectral check on every diagram completed by the catalog searches.

    Covers the connected elliptic/affine extension steps and the Lannér and
    quasi-Lannér searches up to ``max_order`` nodes.  Returns the number of
    diagrams checked; raises RecognizerDisagreement on the first mismatch.
    """
    val = Validator()
    for order in range(2, max_order + 1):
        for base in connected_elliptic(order - 1, label_cap):
            for M in extend_by_node(base.matrix, _labels(label_cap, True), is_elliptic_indices):
                val.check(M)
    total = val.checked
    for order in range(3, max_order + 1):
        if order <= 6:
            total += _search_lanner(order, label_cap, True).validated
        total += enumerate_quasi_lanner(order, label_cap, validate=True).validated
    return total
