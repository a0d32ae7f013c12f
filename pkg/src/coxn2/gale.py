"""One-dimensional Gale diagrams of n-polytopes with n+2 facets.

A diagram is given by the multiplicities (p, q, r) of the points -1, 0, +1.
Facets are indexed 0..p+q+r-1: first the p facets at -1, then the q facets
at 0, then the r facets at +1.  A face is represented by the set of facets
containing it (the polytope itself is the empty set).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable


class GaleError(ValueError):
    pass


@dataclass(frozen=True)
class GaleDiagram1D:
    p: int
    q: int
    r: int

    @property
    def n(self) -> int:
        return self.p + self.q + self.r - 2

    @property
    def facet_count(self) -> int:
        return self.p + self.q + self.r

    def position(self, j: int) -> int:
        if not 0 <= j < self.facet_count:
            raise GaleError(f"unknown facet index {j}")
        if j < self.p:
            return -1
        if j < self.p + self.q:
            return 0
        return 1

    @property
    def minus(self) -> tuple[int, ...]:
        return tuple(range(self.p))

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(range(self.p, self.p + self.q))

    @property
    def plus(self) -> tuple[int, ...]:
        return tuple(range(self.p + self.q, self.facet_count))

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r, "n": self.n}


def gale_from_multiplicities(p: int, q: int, r: int) -> GaleDiagram1D:
    """Validate (p, q, r): every open half-line must carry weight at least two."""
    for name, x in (("p", p), ("q", q), ("r", r)):
        if not isinstance(x, int) or x < 0:
            raise GaleError(f"{name} must be a non-negative integer, got {x!r}")
    if p < 2 or r < 2:
        raise GaleError(
            f"({p},{q},{r}) is not a Gale diagram of a polytope: each open half-line "
            "must contain points of total multiplicity at least 2 (need p >= 2 and r >= 2)"
        )
    return GaleDiagram1D(p, q, r)


@dataclass(frozen=True)
class CombinatorialType:
    kind: str  # "product" | "pyramid" | "multipyramid"
    dims: tuple[int, int]
    depth: int = 0

    def __str__(self) -> str:
        a, b = self.dims
        if self.kind == "product":
            return f"product of simplices of dimensions {a} and {b}"
        if self.kind == "pyramid":
            return f"pyramid over a product of simplices of dimensions {a} and {b}"
        return f"{self.depth}-fold pyramid over a product of simplices of dimensions {a} and {b}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "dims": list(self.dims), "depth": self.depth}


def combinatorial_type(g: GaleDiagram1D) -> CombinatorialType:
    dims = (g.p - 1, g.r - 1)
    if g.q == 0:
        return CombinatorialType("product", dims)
    if g.q == 1:
        return CombinatorialType("pyramid", dims, 1)
    return CombinatorialType("multipyramid", dims, g.q)


def is_face(g: GaleDiagram1D, facets: Iterable[int]) -> bool:
    """True iff the facets in ``facets`` meet in a nonempty face.

    Criterion: 0 lies in the relative interior of the convex hull of the
    Gale points of the complementary facets.
    """
    chosen = set(facets)
    for j in chosen:
        g.position(j)
    rest = [g.position(j) for j in range(g.facet_count) if j not in chosen]
    if not rest:
        return False
    if -1 in rest and 1 in rest:
        return True
    return all(x == 0 for x in rest)


def _refuse_multipyramid(g: GaleDiagram1D) -> None:
    if g.q >= 2:
        raise GaleError(
            f"q = {g.q}: multipyramids over products of simplices are never Coxeter polytopes "
            "(a pyramid over a pyramid has a non-simple Euclidean vertex figure at the apex), "
            "so their vertices are not computed"
        )


def faces(g: GaleDiagram1D) -> list[frozenset]:
    """All nonempty faces as facet sets, by brute force over facet subsets."""
    k = g.facet_count
    out = []
    for size in range(k + 1):
        for s in combinations(range(k), size):
            if is_face(g, s):
                out.append(frozenset(s))
    return out


def vertices(g: GaleDiagram1D) -> list[frozenset]:
    """Vertices = inclusion-maximal face sets."""
    _refuse_multipyramid(g)
    fs = faces(g)
    fset = set(fs)
    k = g.facet_count
    out = []
    for f in fs:
        if not any(f | {j} in fset for j in range(k) if j not in f):
            out.append(f)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def coxeter_admissible(g: GaleDiagram1D) -> bool:
    """Only products (q = 0) and single pyramids (q = 1) can be Coxeter polytopes."""
    return g.q <= 1
