from __future__ import annotations

import random
from fractions import Fraction

import pytest

from coxn2.diagram import BOLD, CoxeterDiagram, Dotted
from coxn2.enumerate import search_products, search_pyramids


def path(*labels, names=None):
    k = len(labels) + 1
    nodes = names or [str(i + 1) for i in range(k)]
    return CoxeterDiagram(nodes, [(nodes[i], nodes[i + 1], m) for i, m in enumerate(labels) if m != 2])


def triangle(a, b, c):
    """Edges 1-2 = a, 2-3 = b, 1-3 = c."""
    edges = [(u, v, m) for (u, v), m in ((("1", "2"), a), (("2", "3"), b), (("1", "3"), c)) if m != 2]
    return CoxeterDiagram(["1", "2", "3"], edges)


LABELS = [3, 3, 3, 4, 4, 5, 6, BOLD, Dotted(Fraction(3, 2)), 7, 8, 10, 12]


def random_diagram(rnd: random.Random, max_nodes: int = 8) -> CoxeterDiagram:
    k = rnd.randint(1, max_nodes)
    nodes = [str(i) for i in range(k)]
    edges = []
    density = rnd.choice([0.2, 0.35, 0.5])
    for i in range(k):
        for j in range(i + 1, k):
            if rnd.random() < density:
                edges.append((nodes[i], nodes[j], rnd.choice(LABELS)))
    return CoxeterDiagram(nodes, edges)


@pytest.fixture(scope="session")
def products():
    return search_products(label_cap=12, scan_cap=1000, workers=1)


@pytest.fixture(scope="session")
def pyramids():
    return search_pyramids(3, 17, label_cap=12, workers=1)


__all__ = ["path", "triangle", "random_diagram", "BOLD"]
