"""Rankings on operator indeterminates and admissible monomial orderings.

Ranking schemes (all translation-invariant total orders):

* ``orderly``    -- total order of the symbols first, ties by lexicographic
                    comparison of exponents in symbol priority order, then
                    variable priority.
* ``degrevlex``  -- total order first, ties by reverse-lexicographic
                    comparison (last differing exponent smaller wins), then
                    variable priority.
* ``elim``       -- variable blocks first (elimination), orderly inside a
                    block.
* ``lex``        -- pure lexicographic comparison of the exponent tuples,
                    ties by variable priority (the ranking used for the
                    Navier-Stokes / Stokes systems).

Monomial orderings extend a ranking to power products of indeterminates:
``TOP`` and ``POT`` compare total shift order first and break ties on the
sorted factor tuples (term-over-position resp. position-over-term);
``rankfirst`` compares sorted factor tuples directly by the ranking, which
is the extension used with the ``lex`` ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Sequence

from .poly import DiffPoly, DiffRing, Indet, Monomial

LESS, EQUAL, GREATER = -1, 0, 1


def _cmp(a, b):
    return (a > b) - (a < b)


@dataclass(frozen=True)
class Ranking:
    scheme: str
    #: symbol axes in comparison priority order (first compared first)
    symbol_seq: tuple[int, ...]
    #: variable indices in decreasing priority (first is highest)
    var_seq: tuple[int, ...]

    SCHEMES = ("orderly", "degrevlex", "elim", "lex")

    def __post_init__(self):
        if self.scheme not in self.SCHEMES:
            raise ValueError("unknown ranking scheme %r" % (self.scheme,))

    def var_rank(self, var: int) -> int:
        """Higher value = higher priority."""
        return len(self.var_seq) - self.var_seq.index(var)

    def _exps_lex(self, e1, e2) -> int:
        for j in self.symbol_seq:
            c = _cmp(e1[j], e2[j])
            if c:
                return c
        return 0

    def _exps_revlex(self, e1, e2) -> int:
        # degrevlex tie-break: last differing exponent smaller => greater
        for j in reversed(self.symbol_seq):
            if e1[j] != e2[j]:
                return GREATER if e1[j] < e2[j] else LESS
        return 0

    def compare(self, v: Indet, w: Indet) -> int:
        if v == w:
            return EQUAL
        (var1, e1), (var2, e2) = v, w
        if self.scheme == "elim":
            c = _cmp(self.var_rank(var1), self.var_rank(var2))
            if c:
                return c
            c = _cmp(sum(e1), sum(e2))
            if c:
                return c
            return self._exps_lex(e1, e2)
        if self.scheme == "lex":
            c = self._exps_lex(e1, e2)
            if c:
                return c
            return _cmp(self.var_rank(var1), self.var_rank(var2))
        c = _cmp(sum(e1), sum(e2))
        if c:
            return c
        if self.scheme == "orderly":
            c = self._exps_lex(e1, e2)
        else:  # degrevlex
            c = self._exps_revlex(e1, e2)
        if c:
            return c
        return _cmp(self.var_rank(var1), self.var_rank(var2))

    def max_indet(self, indets) -> Indet:
        it = iter(indets)
        best = next(it)
        for v in it:
            if self.compare(v, best) > 0:
                best = v
        return best

    def sort_key(self, ring: DiffRing):
        import functools
        return functools.cmp_to_key(self.compare)


def ranking_for(ring: DiffRing, scheme: str = "orderly",
                symbol_order: Sequence[str] | None = None,
                var_order: Sequence[str] | None = None) -> Ranking:
    """Build a ranking from symbol/variable names.

    `symbol_order` lists symbol names in comparison priority order (default:
    declaration order for orderly/elim/lex, reversed for degrevlex, which
    reproduces the printed chains of the worked examples).
    """
    if symbol_order is None:
        seq = tuple(range(ring.nsyms))
        if scheme == "degrevlex":
            seq = tuple(reversed(seq))
    else:
        seq = tuple(ring.symbols.index(s) for s in symbol_order)
    if var_order is None:
        vseq = tuple(range(len(ring.variables)))
    else:
        vseq = tuple(ring.var_index(v) for v in var_order)
        rest = tuple(i for i in range(len(ring.variables)) if i not in vseq)
        vseq = vseq + rest
    return Ranking(scheme, seq, vseq)


def compare_indeterminates(r: Ranking, v: Indet, w: Indet) -> int:
    return r.compare(v, w)


# ---------------------------------------------------------------------------
# monomial orderings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialOrdering:
    style: str  # "TOP" | "POT" | "rankfirst"
    ranking: Ranking

    STYLES = ("TOP", "POT", "rankfirst")

    def __post_init__(self):
        if self.style not in self.STYLES:
            raise ValueError("unknown monomial ordering style %r" % (self.style,))

    # pair = one indeterminate occurrence
    def _pair_cmp(self, v: Indet, w: Indet) -> int:
        if self.style == "rankfirst":
            return self.ranking.compare(v, w)
        (var1, e1), (var2, e2) = v, w
        r = self.ranking
        if self.style == "POT":
            c = _cmp(r.var_rank(var1), r.var_rank(var2))
            if c:
                return c
        c = _cmp(sum(e1), sum(e2))
        if c:
            return c
        c = r._exps_revlex(e1, e2)
        if c:
            return c
        if self.style == "TOP":
            return _cmp(r.var_rank(var1), r.var_rank(var2))
        return 0

    def _factors(self, m: Monomial):
        import functools
        out = []
        for v, k in m:
            out.extend([v] * k)
        out.sort(key=functools.cmp_to_key(self._pair_cmp), reverse=True)
        return out

    def compare(self, m1: Monomial, m2: Monomial) -> int:
        if m1 == m2:
            return EQUAL
        if self.style in ("TOP", "POT"):
            d1 = sum(k * sum(v[1]) for v, k in m1)
            d2 = sum(k * sum(v[1]) for v, k in m2)
            c = _cmp(d1, d2)
            if c:
                return c
        f1, f2 = self._factors(m1), self._factors(m2)
        for v, w in zip(f1, f2):
            c = self._pair_cmp(v, w)
            if c:
                return c
        return _cmp(len(f1), len(f2))

    def sort_key(self):
        import functools
        return functools.cmp_to_key(self.compare)

    def leading_monomial(self, p: DiffPoly) -> Monomial:
        if p.is_zero():
            raise ValueError("zero polynomial has no leading monomial")
        it = iter(p.terms)
        best = next(it)
        for m in it:
            if self.compare(m, best) > 0:
                best = m
        return best

    def leading_coeff(self, p: DiffPoly):
        return p.terms[self.leading_monomial(p)]

    def monic(self, p: DiffPoly) -> DiffPoly:
        lc = self.leading_coeff(p)
        return p.scale(p.ring.field.one / lc)


def compare_monomials(o: MonomialOrdering, m1: Monomial, m2: Monomial) -> int:
    return o.compare(m1, m2)


# ---------------------------------------------------------------------------
# leader / initial / separant / discriminant
# ---------------------------------------------------------------------------


def leader(p: DiffPoly, r: Ranking) -> Indet:
    vs = p.indets()
    if not vs:
        raise ValueError("constant polynomial has no leader")
    return r.max_indet(vs)


def initial(p: DiffPoly, r: Ranking) -> DiffPoly:
    v = leader(p, r)
    return p.coeff_of_power(v, p.degree_in(v))


def separant(p: DiffPoly, r: Ranking) -> DiffPoly:
    v = leader(p, r)
    out = p.ring.zero()
    for k, c in p.coeffs_in(v).items():
        if k >= 1:
            vm = ((v, k - 1),) if k > 1 else ()
            out = out + DiffPoly(p.ring, {vm: p.ring.field.from_fraction(k)}) * c
    return out


def _det_bareiss(mat: list[list[DiffPoly]], ring: DiffRing) -> DiffPoly:
    """Fraction-free determinant over the polynomial ring."""
    n = len(mat)
    if n == 0:
        return ring.one()
    m = [row[:] for row in mat]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return ring.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = _exact_quo(num, prev)
            m[i][k] = ring.zero()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def _exact_quo(num: DiffPoly, den: DiffPoly) -> DiffPoly:
    """Exact division by a polynomial known to divide (Bareiss pivots)."""
    if den.is_constant():
        c = den.constant_coeff()
        return num.scale(num.ring.field.one / c)
    # long division along a structural order; remainder must vanish
    ring = num.ring
    quo = ring.zero()
    rem = num
    dlead = max(den.terms)
    dc = den.terms[dlead]
    guard = 0
    while not rem.is_zero():
        rlead = max(rem.terms)
        from .poly import mon_divides, mon_div
        if not mon_divides(dlead, rlead):
            raise ArithmeticError("non-exact division in Bareiss step")
        q = DiffPoly(ring, {mon_div(rlead, dlead): rem.terms[rlead] / dc})
        quo = quo + q
        rem = rem - q * den
        guard += 1
        if guard > 10000:
            raise ArithmeticError("division did not terminate")
    return quo


def discriminant(p: DiffPoly, r: Ranking) -> DiffPoly:
    """Discriminant of p as a univariate polynomial in its leader."""
    v = leader(p, r)
    coeffs = p.coeffs_in(v)
    d = max(coeffs)
    if d < 1:
        raise ValueError("polynomial has degree 0 in its leader")
    if d == 1:
        return p.ring.one()
    a = [coeffs.get(k, p.ring.zero()) for k in range(d + 1)]      # p
    b = [a[k].scale(p.ring.field.from_fraction(k)) for k in range(1, d + 1)]  # p'
    n, m = d, d - 1
    size = n + m
    ring = p.ring
    mat = [[ring.zero()] * size for _ in range(size)]
    for i in range(m):           # rows of p coefficients
        for k in range(n + 1):
            mat[i][i + k] = a[n - k]
    for i in range(n):           # rows of p' coefficients
        for k in range(m + 1):
            mat[m + i][i + k] = b[m - k]
    res = _det_bareiss(mat, ring)
    lc = a[d]
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    quo = _exact_quo(res, lc)
    return quo if sign > 0 else -quo
