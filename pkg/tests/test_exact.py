from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxn2.diagram import BOLD, CoxeterDiagram, Dotted
from coxn2.exact import (
    ParamFamily,
    Signature,
    check_determinant,
    determinant,
    diagram_determinant,
    diagram_signature,
    gram_matrix,
    ldl,
    param_det_polynomial,
    param_root_labels,
    sign,
    signature,
)
from coxn2.field import AlgReal, field, min_poly

from conftest import path, random_diagram, triangle


def _q(x):
    return AlgReal.rational(x)


def test_gram_examples():
    assert gram_matrix(CoxeterDiagram(["1"])).approx() == [[1.0]]
    g = gram_matrix(path(3))
    assert g[0, 1] == _q(Fraction(-1, 2)) and g[0, 0] == _q(1)
    g = gram_matrix(path(BOLD))
    assert g[0, 1] == _q(-1)
    g = gram_matrix(path(Dotted(Fraction(5, 3))))
    assert g[1, 0] == _q(Fraction(-5, 3))


def test_determinant_examples():
    assert determinant(gram_matrix(path(BOLD))).is_zero()
    assert determinant(gram_matrix(path(3))) == _q(Fraction(3, 4))
    assert determinant(gram_matrix(path(3, 3))) == _q(Fraction(1, 2))


def test_signature_examples():
    assert signature(gram_matrix(path(BOLD))) == Signature(1, 0, 1)
    assert signature(gram_matrix(triangle(3, 3, 3))) == Signature(2, 0, 1)
    assert signature(gram_matrix(triangle(3, 3, 4))) == Signature(2, 1, 0)


def test_sign_examples():
    K = field(5)
    assert sign(AlgReal.cos_pi_over(5, K) - Fraction(1, 2)) == 1
    assert sign(AlgReal.cos_pi_over(3) * 2 - 1) == 0
    assert sign(_q(Fraction(-3, 2)) + 1) == -1


def test_cos_values_match_intervals():
    for m in range(2, 40):
        x = AlgReal.cos_pi_over(m)
        lo, hi = x.interval(200)
        with mpmath.workprec(400):
            c = mpmath.mp.cos(mpmath.mp.pi / m)
            eps = mpmath.mpf(2) ** -190
            assert lo - eps <= c <= hi + eps and hi - lo < mpmath.mpf(2) ** -150


def test_min_poly_degrees():
    from sympy import totient  # noqa: F401 -- only for the oracle
    for N in range(3, 40):
        assert len(min_poly(N)) - 1 == int(totient(2 * N)) // 2


def test_inverse_and_mixed_fields():
    K = field(12)
    x = AlgReal.cos_pi_over(12, K) * 3 - Fraction(1, 7)
    assert x * x.inverse() == _q(1)
    y = AlgReal.cos_pi_over(5) + AlgReal.cos_pi_over(7)
    assert (y / y) == _q(1)
    assert (AlgReal.cos_pi_over(6) * 2) ** 2 == _q(3)


def test_big_field_inverse():
    K = field(7 * 11 * 12)
    x = AlgReal.cos_pi_over(7, K) - AlgReal.cos_pi_over(11, K) * AlgReal.cos_pi_over(12, K)
    assert (x * x.inverse()) == AlgReal.rational(1, K)


def test_param_det_polynomial_examples():
    f = ParamFamily(path(7), {"m": ("1", "2")}, {"m": 3})
    p = param_det_polynomial(f)
    assert p.coeffs[(0,)] == _q(1) and p.coeffs[(1,)].is_zero() and p.coeffs[(2,)] == _q(-1)
    f = ParamFamily(path(7, 3), {"m": ("1", "2")}, {"m": 3})
    p = param_det_polynomial(f)
    assert p.coeffs[(0,)] == _q(Fraction(3, 4)) and p.coeffs[(2,)] == _q(-1)


def test_param_det_polynomial_agrees_at_random_labels():
    base = CoxeterDiagram(list("123456"), [("1", "2", 7), ("2", "3", 3), ("3", "4", 4), ("4", "5", 7),
                                           ("5", "6", 3), ("1", "6", 3)])
    f = ParamFamily(base, {"m": ("1", "2"), "l": ("4", "5")}, {"m": 3, "l": 3})
    p = param_det_polynomial(f)
    rnd = random.Random(5)
    for _ in range(5):
        a, b = rnd.randint(3, 15), rnd.randint(3, 15)
        assert p.evaluate_labels([a, b]) == diagram_determinant(f.concretize({"m": a, "l": b}))


def test_param_det_polynomial_rejects():
    base = CoxeterDiagram(list("1234"), [("1", "2", 7), ("2", "3", 7), ("3", "4", 7)])
    f = ParamFamily(base, {"a": ("1", "2"), "b": ("2", "3"), "c": ("3", "4")})
    with pytest.raises(ValueError):
        param_det_polynomial(f)
    with pytest.raises(Exception):
        ParamFamily(path(BOLD), {"a": ("1", "2")})


def test_param_root_labels_examples():
    p = param_det_polynomial(ParamFamily(path(7), {"m": ("1", "2")}, {"m": 3}))
    rep = param_root_labels(p, 3, 200)
    assert rep.exact_zero_labels == [] and rep.limit_sign == 0
    p = param_det_polynomial(ParamFamily(path(7, 3), {"m": ("1", "2")}, {"m": 3}))
    rep = param_root_labels(p, 3, 200)
    assert rep.exact_zero_labels == [6]
    assert rep.limit_sign == -1 and rep.tail_sign == -1


def test_determinant_triple_agreement_sample():
    rnd = random.Random(1)
    for _ in range(150):
        d = random_diagram(rnd)
        r = check_determinant(d)  # raises on any disagreement
        lo, hi = r["interval"]
        assert lo <= hi
        assert r["signature"] == diagram_signature(d)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_signature_permutation_invariant(seed):
    rnd = random.Random(seed)
    d = random_diagram(rnd, 7)
    order = list(d.nodes)
    rnd.shuffle(order)
    s1 = diagram_signature(d)
    s2 = diagram_signature(d.permuted(order))
    assert s1 == s2
    assert sum(s1) == d.order


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_corank_is_order_minus_rank(seed):
    import sympy

    d = random_diagram(random.Random(seed), 6)
    s = diagram_signature(d)
    sym = sympy.Matrix(d.order, d.order, lambda i, j: _sym_entry(d, i, j))
    assert s.corank == d.order - sym.rank(simplify=True)


def _sym_entry(d, i, j):
    import sympy

    if i == j:
        return sympy.Integer(1)
    m = d.matrix[i][j]
    if m == BOLD:
        return sympy.Integer(-1)
    if isinstance(m, Dotted):
        return -sympy.Rational(m.weight.numerator, m.weight.denominator)
    return -sympy.cos(sympy.pi / m)


def test_ldl_pivots_multiply_to_determinant():
    rnd = random.Random(3)
    for _ in range(60):
        d = random_diagram(rnd, 6)
        g = gram_matrix(d)
        r = ldl(g)
        det = determinant(g)
        if r.corank:
            assert det.is_zero()
        else:
            assert r.determinant == det
