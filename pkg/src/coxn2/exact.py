"""Gram matrices of Coxeter diagrams and their exact invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import mpmath

from .diagram import BOLD, NO_EDGE, CoxeterDiagram, Dotted, DiagramError
from .field import AlgReal, CycloField, field, field_for_labels, _lcm


class Signature(NamedTuple):
    pos: int
    neg: int
    corank: int

    def to_json(self) -> list[int]:
        return [self.pos, self.neg, self.corank]


class GramMatrix:
    """Symmetric unit-diagonal matrix over a common cyclotomic field."""

    __slots__ = ("entries", "K")

    def __init__(self, entries: Sequence[Sequence[AlgReal]], K: CycloField):
        self.entries = [list(r) for r in entries]
        self.K = K

    @property
    def order(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def permuted(self, perm: Sequence[int]) -> "GramMatrix":
        return GramMatrix([[self.entries[i][j] for j in perm] for i in perm], self.K)

    def approx(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self.entries]


def gram_entry(m, K: CycloField) -> AlgReal:
    if m == NO_EDGE:
        return AlgReal.rational(0, K)
    if isinstance(m, Dotted):
        return AlgReal.rational(-m.weight, K)
    if m == BOLD:
        return AlgReal.rational(-1, K)
    return -AlgReal.cos_pi_over(m, K)


def gram_matrix(d: CoxeterDiagram) -> GramMatrix:
    K = field_for_labels(d.labels())
    one = AlgReal.rational(1, K)
    cache = {}
    rows = []
    for i, row in enumerate(d.matrix):
        out = []
        for j, m in enumerate(row):
            if i == j:
                out.append(one)
                continue
            if isinstance(m, str):
                raise DiagramError("gram_matrix needs concrete labels")
            if m not in cache:
                cache[m] = gram_entry(m, K)
            out.append(cache[m])
        rows.append(out)
    return GramMatrix(rows, K)


def determinant(M: GramMatrix) -> AlgReal:
    """Bareiss fraction-free elimination with row pivoting."""
    n = M.order
    K = M.K
    if n == 0:
        return AlgReal.rational(1, K)
    A = [list(r) for r in M.entries]
    sign = 1
    prev_inv = None
    for k in range(n - 1):
        if A[k][k].is_zero():
            for i in range(k + 1, n):
                if not A[i][k].is_zero():
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return AlgReal.rational(0, K)
        akk = A[k][k]
        rowk = A[k]
        for i in range(k + 1, n):
            rowi = A[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                v = rowi[j] * akk
                if not aik.is_zero() and not rowk[j].is_zero():
                    v = v - aik * rowk[j]
                if prev_inv is not None:
                    v = v * prev_inv
                rowi[j] = v
        prev_inv = akk.inverse()
    out = A[n - 1][n - 1]
    return -out if sign < 0 else out


@dataclass
class LDLResult:
    pivots: list  # ("1", d) scalar pivots or ("2", det of 2x2 block)
    corank: int
    permutation: list[int]

    @property
    def determinant(self) -> AlgReal:
        if self.corank:
            return None
        out = None
        for _, p in self.pivots:
            out = p if out is None else out * p
        return out

    @property
    def signature(self) -> Signature:
        pos = neg = 0
        for kind, p in self.pivots:
            if kind == "2":
                pos += 1
                neg += 1
            elif p.sign() > 0:
                pos += 1
            else:
                neg += 1
        return Signature(pos, neg, self.corank)


def ldl(M: GramMatrix) -> LDLResult:
    """Symmetric elimination with diagonal pivots and 2x2 blocks when needed."""
    n = M.order
    A = {(i, j): M.entries[i][j] for i in range(n) for j in range(n)}
    alive = list(range(n))
    pivots = []
    perm = []
    while alive:
        piv = next((i for i in alive if not A[i, i].is_zero()), None)
        if piv is not None:
            d = A[piv, piv]
            dinv = d.inverse()
            rest = [i for i in alive if i != piv]
            col = {i: A[i, piv] for i in rest}
            for a, i in enumerate(rest):
                ci = col[i]
                if ci.is_zero():
                    continue
                f = ci * dinv
                for j in rest[a:]:
                    cj = col[j]
                    if cj.is_zero():
                        continue
                    v = A[i, j] - f * cj
                    A[i, j] = A[j, i] = v
            pivots.append(("1", d))
            perm.append(piv)
            alive = rest
            continue
        pair = next(((i, j) for a, i in enumerate(alive) for j in alive[a + 1:] if not A[i, j].is_zero()), None)
        if pair is None:
            return LDLResult(pivots, len(alive), perm + alive)
        p, q = pair
        b = A[p, q]
        binv = b.inverse()
        rest = [i for i in alive if i not in pair]
        cp = {i: A[i, p] for i in rest}
        cq = {i: A[i, q] for i in rest}
        for a, i in enumerate(rest):
            for j in rest[a:]:
                corr = cp[i] * cq[j] + cq[i] * cp[j]
                if corr.is_zero():
                    continue
                v = A[i, j] - corr * binv
                A[i, j] = A[j, i] = v
        pivots.append(("2", -(b * b)))
        perm.extend(pair)
        alive = rest
    return LDLResult(pivots, 0, perm)


def signature(M: GramMatrix) -> Signature:
    return ldl(M).signature


def sign(x) -> int:
    if isinstance(x, AlgReal):
        return x.sign()
    x = Fraction(x)
    return (x > 0) - (x < 0)


def diagram_signature(d: CoxeterDiagram) -> Signature:
    return signature(gram_matrix(d))


def diagram_determinant(d: CoxeterDiagram) -> AlgReal:
    return determinant(gram_matrix(d))


# -- interval cross-check -----------------------------------------------------


def interval_gram(d: CoxeterDiagram, prec: int = 128):
    """Gram entries as mpmath intervals, computed directly from the labels."""
    iv = mpmath.iv
    rows = []
    for i, row in enumerate(d.matrix):
        out = []
        for j, m in enumerate(row):
            if i == j:
                out.append(iv.mpf(1))
            elif m == NO_EDGE:
                out.append(None)
            elif isinstance(m, Dotted):
                out.append(-iv.mpf(m.weight.numerator) / m.weight.denominator)
            elif m == BOLD:
                out.append(iv.mpf(-1))
            else:
                out.append(-iv.cos(iv.pi / m))
        rows.append(out)
    return rows


def interval_determinant(d: CoxeterDiagram, prec: int = 128):
    """Enclosure of det G(d) by Laplace expansion over column subsets.

    Division-free, so it stays valid on singular matrices.  Cost is
    O(k 2^k); intended for orders up to about 12.
    """
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        G = interval_gram(d, prec)
        k = len(G)
        f = {0: iv.mpf(1)}
        for i in range(k):
            nxt = {}
            row = G[i]
            for mask, val in f.items():
                for c in range(k):
                    a = row[c]
                    if a is None or mask >> c & 1:
                        continue
                    term = val * a
                    if bin(mask >> (c + 1)).count("1") & 1:
                        term = -term
                    key = mask | 1 << c
                    nxt[key] = nxt[key] + term if key in nxt else term
            f = nxt
        full = (1 << k) - 1
        out = f.get(full, iv.mpf(0))
        lo, hi = out._mpi_
        return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)
    finally:
        iv.prec = old


def check_determinant(d: CoxeterDiagram, prec: int = 128) -> dict:
    """Three independent determinant routes; raises AssertionError on mismatch."""
    M = gram_matrix(d)
    bareiss = determinant(M)
    res = ldl(M)
    piv = res.determinant
    if piv is None:
        assert bareiss.is_zero(), "pivot route found corank but Bareiss det is nonzero"
    else:
        assert bareiss == piv, "Bareiss and LDL determinants differ"
    lo, hi = interval_determinant(d, prec)
    blo, bhi = bareiss.interval(prec + 64)
    assert lo <= bhi and blo <= hi, f"interval [{lo}, {hi}] excludes exact value"
    if bareiss.is_zero():
        assert lo <= 0 <= hi
    return {"det": bareiss, "interval": (lo, hi), "signature": res.signature}


# -- parametric families ------------------------------------------------------


@dataclass
class ParamFamily:
    """A diagram whose edges listed in ``symbols`` carry a free plain label.

    ``base`` holds a representative label on each symbolic edge.  The family
    members are the concretizations with label >= lower[s] (and <= upper[s]
    when given) on each symbol s.
    """

    base: CoxeterDiagram
    symbols: dict  # name -> (u, v)
    lower: dict = dc_field(default_factory=dict)
    upper: dict = dc_field(default_factory=dict)
    constraint: str = ""

    def __post_init__(self):
        for s, (u, v) in self.symbols.items():
            m = self.base.label(u, v)
            if m == BOLD or isinstance(m, Dotted):
                raise DiagramError(f"symbolic edge {s} must be plain")

    def concretize(self, values: Mapping) -> CoxeterDiagram:
        d = self.base
        for s, m in values.items():
            u, v = self.symbols[s]
            d = d.with_label(u, v, m)
        return d

    def constraint_text(self) -> str:
        if self.constraint:
            return self.constraint
        parts = []
        for s in self.symbols:
            lo = self.lower.get(s, 2)
            hi = self.upper.get(s)
            parts.append(f"{s}>={lo}" if hi is None else f"{lo}<={s}<={hi}")
        return ", ".join(parts)


_INTERP_LABELS = (NO_EDGE, 3, BOLD)  # cos = 0, 1/2, 1
_INTERP_C = (Fraction(0), Fraction(1, 2), Fraction(1))


def _quadratic_coeffs(y0, y1, y2):
    """Coefficients of the quadratic through (0, y0), (1/2, y1), (1, y2)."""
    a2 = (y2 - y1 * 2 + y0) * 2
    a1 = y2 - y0 - a2
    return [y0, a1, a2]


@dataclass
class DetPolynomial:
    """det G as a polynomial in c_s = cos(pi/m_s), degree <= 2 in each c_s."""

    symbols: tuple
    coeffs: dict  # exponent tuple -> AlgReal

    @property
    def K(self) -> CycloField:
        return next(iter(self.coeffs.values())).K

    def evaluate(self, values: Sequence) -> AlgReal:
        """Exact value at c-values (AlgReal or rationals), one per symbol."""
        total = AlgReal.rational(0, self.K)
        for exps, a in self.coeffs.items():
            if a.is_zero():
                continue
            term = a
            for c, e in zip(values, exps):
                for _ in range(e):
                    term = term * c
            total = total + term
        return total

    def evaluate_labels(self, labels: Sequence) -> AlgReal:
        vals = []
        for m in labels:
            if m == BOLD:
                vals.append(Fraction(1))
            else:
                vals.append(AlgReal.cos_pi_over(m))
        return self.evaluate(vals)

    def interval_coeffs(self, prec: int):
        iv = mpmath.iv
        out = {}
        for exps, a in self.coeffs.items():
            lo, hi = a.interval(prec)
            out[exps] = iv.mpf([lo, hi])
        return out

    def __str__(self) -> str:
        names = [f"c_{s}" for s in self.symbols]
        terms = []
        for exps, a in sorted(self.coeffs.items()):
            if a.is_zero():
                continue
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, exps) if e)
            terms.append(f"({a.approx(12)})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) or "0"

    def to_json(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "terms": [{"exponents": list(e), "coeff": a.to_json()} for e, a in sorted(self.coeffs.items())],
        }


def param_det_polynomial(f: ParamFamily, check_labels: Sequence[int] = (5, 7)) -> DetPolynomial:
    syms = tuple(f.symbols)
    if not 1 <= len(syms) <= 2:
        raise ValueError(f"param_det_polynomial supports 1 or 2 symbolic labels, got {len(syms)}")
    grid = {}
    if len(syms) == 1:
        ys = [diagram_determinant(f.concretize({syms[0]: m})) for m in _INTERP_LABELS]
        coeffs = {(e,): a for e, a in enumerate(_quadratic_coeffs(*ys))}
    else:
        for i, m1 in enumerate(_INTERP_LABELS):
            for j, m2 in enumerate(_INTERP_LABELS):
                grid[i, j] = diagram_determinant(f.concretize({syms[0]: m1, syms[1]: m2}))
        # interpolate in the second variable, then the first
        inner = {i: _quadratic_coeffs(grid[i, 0], grid[i, 1], grid[i, 2]) for i in range(3)}
        coeffs = {}
        for e2 in range(3):
            outer = _quadratic_coeffs(inner[0][e2], inner[1][e2], inner[2][e2])
            for e1 in range(3):
                coeffs[(e1, e2)] = outer[e1]
    K = field(1)
    for a in coeffs.values():
        K = field(_lcm(K.N, a.K.N))
    coeffs = {e: a.embed(K.N) for e, a in coeffs.items()}
    poly = DetPolynomial(syms, coeffs)
    for m in check_labels:
        labels = [m] * len(syms)
        expected = diagram_determinant(f.concretize(dict(zip(syms, labels))))
        if poly.evaluate_labels(labels) != expected:
            raise AssertionError(f"determinant polynomial disagrees with direct determinant at label {m}")
    return poly


@dataclass
class RootReport:
    s_min: int
    scan_cap: int
    exact_zero_labels: list
    limit_value: AlgReal
    limit_sign: int
    tail_sign: int
    tail_constant_from: int
    sign_changes: list
    evidence_note: str = ""

    @property
    def tail_status(self) -> str:
        limit = {1: "+", -1: "-", 0: "0"}[self.limit_sign]
        tail = {1: "+", -1: "-", 0: "0"}[self.tail_sign]
        agree = "agrees" if self.tail_sign == self.limit_sign else "differs"
        return (f"sign {tail} on [{self.tail_constant_from}, {self.scan_cap}], "
                f"limit (bold edge) sign {limit} ({agree})")

    def to_json(self) -> dict:
        return {
            "s_min": self.s_min,
            "scan_cap": self.scan_cap,
            "exact_zero_labels": self.exact_zero_labels,
            "limit_value": self.limit_value.to_json(),
            "limit_sign": self.limit_sign,
            "tail_status": self.tail_status,
            "sign_changes": self.sign_changes,
            "note": self.evidence_note,
        }


def _float_sign(fcoeffs, labels: Sequence[int]) -> int:
    """Sign from a float evaluation, or 0 when the rounding bound is not met.

    Each term is a product of at most five correctly rounded values, so its
    relative error is far below 1e-12; the bound below is generous.
    """
    cs = [math.cos(math.pi / m) for m in labels]
    total = 0.0
    size = 0.0
    for exps, a in fcoeffs:
        term = a
        for c, e in zip(cs, exps):
            for _ in range(e):
                term *= c
        total += term
        size += abs(term)
    if abs(total) > 1e-12 * size + 1e-300:
        return 1 if total > 0 else -1
    return 0


def _label_sign(poly: DetPolynomial, labels: Sequence[int], icoeffs, prec: int, fcoeffs=None) -> int:
    if fcoeffs is not None:
        s = _float_sign(fcoeffs, labels)
        if s:
            return s
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        cs = [iv.cos(iv.pi / m) for m in labels]
        acc = iv.mpf(0)
        for exps, a in icoeffs.items():
            term = a
            for c, e in zip(cs, exps):
                for _ in range(e):
                    term = term * c
            acc = acc + term
        lo, hi = acc._mpi_
        lo, hi = mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)
    finally:
        iv.prec = old
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    # inconclusive: decide exactly in Q(2cos(pi/L))
    L = poly.K.N
    for m in labels:
        L = _lcm(L, m)
    K = field(L)
    vals = [AlgReal.cos_pi_over(m, K) for m in labels]
    return poly.evaluate(vals).sign()


def param_root_labels(poly: DetPolynomial, s_min, scan_cap: int = 1000) -> RootReport:
    """Certified signs of the determinant polynomial along integer labels.

    For one symbol, every label in [s_min, scan_cap] is checked.  For two
    symbols, each symbol is scanned over [s_min, scan_cap] with the other
    symbol at every value in its own range up to ``min(scan_cap, 60)``; the
    grid bound is reported in the note.
    """
    syms = poly.symbols
    if isinstance(s_min, Mapping):
        mins = [int(s_min[s]) for s in syms]
    elif isinstance(s_min, (tuple, list)):
        mins = [int(x) for x in s_min]
    else:
        mins = [int(s_min)] * len(syms)
    if any(m < 2 for m in mins):
        raise ValueError("labels start at 2")
    prec = 160
    icoeffs = poly.interval_coeffs(prec + 64)
    fcoeffs = [(e, float(a)) for e, a in poly.coeffs.items() if not a.is_zero()]
    zeros = []
    signs = {}
    note = f"checked every label up to {scan_cap}; beyond that completeness is evidence-grade"
    if len(syms) == 1:
        points = [(m,) for m in range(mins[0], scan_cap + 1)]
    else:
        cross_cap = min(scan_cap, 60)
        pts = set()
        for a in range(mins[0], scan_cap + 1):
            for b in range(mins[1], cross_cap + 1):
                pts.add((a, b))
        for b in range(mins[1], scan_cap + 1):
            for a in range(mins[0], cross_cap + 1):
                pts.add((a, b))
        points = sorted(pts)
        note = (f"two-parameter scan: each label up to {scan_cap} against the other up to "
                f"{cross_cap}; beyond that completeness is evidence-grade")
    for labels in points:
        s = _label_sign(poly, labels, icoeffs, prec, fcoeffs)
        signs[labels] = s
        if s == 0:
            zeros.append(labels[0] if len(labels) == 1 else list(labels))
    limit = poly.evaluate([Fraction(1)] * len(syms))
    limit_sign = limit.sign()
    # tail along the diagonal direction of the first symbol
    line = [p for p in points if all(x == p[0] for x in p)] if len(syms) > 1 else points
    if not line:
        line = points
    tail_sign = signs[line[-1]] if line else 0
    start = line[-1][0] if line else scan_cap
    for p in reversed(line):
        if signs[p] != tail_sign:
            break
        start = p[0]
    changes = []
    prev = None
    for p in line:
        if prev is not None and signs[p] != signs[prev]:
            changes.append(p[0])
        prev = p
    return RootReport(mins[0] if len(mins) == 1 else mins, scan_cap, zeros, limit, limit_sign, tail_sign,
                      start, changes, note)
