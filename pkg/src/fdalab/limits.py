"""Taylor expansion of shifts, continuous limits, w-consistency, modified PDEs.

A difference polynomial is expanded about a grid point by substituting the
truncated exponential series sigma^a = exp(sum_j a_j h_j d_j) for every
shifted indeterminate.  After clearing the monomial step denominators the
expansion is graded by total degree in the step parameters; the lowest
non-vanishing stratum is the continuous limit.  Strata computed under a
truncation at total degree D are exact for all degrees <= D, so the
adaptive loop only has to raise D until something non-zero appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Optional, Sequence

from .poly import (PARTIAL, SHIFT, DiffPoly, DiffRing, require_normalized,
                   substitute_direction)

Expvec = tuple[int, ...]


def partial_ring_for(ring: DiffRing, symbols: Sequence[str] | None = None) -> DiffRing:
    """Differential counterpart of a difference ring (same variables/field)."""
    if symbols is None:
        symbols = tuple("x%d" % (i + 1) for i in range(ring.nsyms))
    return DiffRing(PARTIAL, tuple(symbols), ring.variables, ring.field)


@dataclass
class LimitResult:
    """Lowest-degree stratum of the Taylor expansion after clearing the
    monomial step denominators by q."""

    degree: int
    #: (step-parameter exponent vector, differential polynomial) pairs
    terms: list[tuple[Expvec, DiffPoly]]
    q: Expvec
    truncation: int
    steps: tuple[str, ...]

    def single(self) -> DiffPoly:
        if len(self.terms) != 1:
            raise ValueError("stratum has %d monomials" % len(self.terms))
        return self.terms[0][1]

    def combined(self) -> DiffPoly:
        """The stratum as one differential polynomial with step-parameter
        coefficients."""
        out = None
        for gamma, r in self.terms:
            field = r.ring.field
            mono = field.one
            for name, e in zip(field.params, gamma):
                if e:
                    mono *= field.gen(name) ** e
            piece = r.scale(mono)
            out = piece if out is None else out + piece
        return out


class _Graded:
    """Step-graded differential polynomial: exponent vector over the field
    parameters (nonzero only at step positions) -> DiffPoly with step-free
    coefficients."""

    __slots__ = ("ring", "strata")

    def __init__(self, ring, strata=None):
        self.ring = ring
        self.strata: dict[Expvec, DiffPoly] = strata or {}

    def add_piece(self, gamma: Expvec, p: DiffPoly):
        if p.is_zero():
            return
        cur = self.strata.get(gamma)
        s = p if cur is None else cur + p
        if s.is_zero():
            self.strata.pop(gamma, None)
        else:
            self.strata[gamma] = s

    def __add__(self, other):
        out = _Graded(self.ring, dict(self.strata))
        for g, p in other.strata.items():
            out.add_piece(g, p)
        return out

    def mul_truncated(self, other, D: int):
        out = _Graded(self.ring)
        for g1, p1 in self.strata.items():
            d1 = sum(g1)
            for g2, p2 in other.strata.items():
                if d1 + sum(g2) > D:
                    continue
                out.add_piece(tuple(a + b for a, b in zip(g1, g2)), p1 * p2)
        return out

    def pow_truncated(self, k: int, D: int):
        out = _Graded(self.ring, {(0,) * _width(self.ring): self.ring.one()})
        base = self
        while k:
            if k & 1:
                out = out.mul_truncated(base, D)
            k >>= 1
            if k:
                base = base.mul_truncated(base, D)
        return out


def _width(ring) -> int:
    return len(ring.field.params)


def _coeff_grading(field, c, step_idx: set[int]):
    """Split a coefficient with step-free denominator into graded pieces:
    yields (gamma over all params, step-free coefficient)."""
    num, den = field.numer_denom(c)
    den_c = field.poly_to_coeff(den)
    pieces: dict[Expvec, list] = {}
    for mon, q in field.poly_terms(num):
        gamma = tuple(e if i in step_idx else 0 for i, e in enumerate(mon))
        rest = tuple(0 if i in step_idx else e for i, e in enumerate(mon))
        pieces.setdefault(gamma, []).append((rest, q))
    for gamma, monos in pieces.items():
        yield gamma, field.from_poly_terms(monos) / den_c


def _den_step_part(field, c, step_idx: set[int]) -> Expvec:
    """Denominator must factor as step-monomial * step-free polynomial;
    returns the step exponent vector."""
    _, den = field.numer_denom(c)
    parts = set()
    for mon, _ in field.poly_terms(den):
        parts.add(tuple(e if i in step_idx else 0 for i, e in enumerate(mon)))
    if len(parts) != 1:
        raise ValueError("coefficient denominator mixes step parameters "
                         "with other terms: %s" % (c,))
    return parts.pop()


def taylor_shift(ring: DiffRing, target: DiffRing, var: int, exps: Expvec,
                 steps: Sequence[str], D: int) -> DiffPoly:
    """Truncated expansion of sigma^exps u^(var) as a differential polynomial
    with step-parameter coefficients, total step degree <= D."""
    graded = taylor_shift_graded(ring, target, var, exps, steps, D)
    out = target.zero()
    field = target.field
    for gamma, p in graded.strata.items():
        mono = field.one
        for name, e in zip(field.params, gamma):
            if e:
                mono *= field.gen(name) ** e
        out = out + p.scale(mono)
    return out


def taylor_shift_graded(ring: DiffRing, target: DiffRing, var: int,
                        exps: Expvec, steps: Sequence[str], D: int) -> _Graded:
    field = ring.field
    n = ring.nsyms
    width = len(field.params)
    positions = [field.params.index(s) for s in steps]
    out = _Graded(target)

    def rec(axis, k_acc, deg, coeff):
        if axis == n:
            gamma = [0] * width
            for j, kj in enumerate(k_acc):
                gamma[positions[j]] += kj
            out.add_piece(tuple(gamma),
                          target.indet(var, tuple(k_acc)).scale(coeff))
            return
        a = exps[axis]
        if a == 0:
            rec(axis + 1, k_acc + [0], deg, coeff)
            return
        k = 0
        while deg + k <= D:
            c = coeff * field.from_fraction(Fraction(a ** k, factorial(k)))
            rec(axis + 1, k_acc + [k], deg + k, c)
            k += 1

    rec(0, [], 0, field.one)
    return out


def _expand_graded(p: DiffPoly, target: DiffRing, steps: Sequence[str],
                   q: Expvec, D: int) -> _Graded:
    """Graded expansion of q(h)*p truncated at total step degree D."""
    field = p.ring.field
    width = len(field.params)
    step_idx = {field.params.index(s) for s in steps}
    qcoeff = field.one
    for name, e in zip(field.params, q):
        if e:
            qcoeff *= field.gen(name) ** e
    factor_cache: dict = {}
    out = _Graded(target)
    for mon, c in p.terms.items():
        acc = _Graded(target, {(0,) * width: target.one()})
        for (var, exps), k in mon:
            key = (var, exps)
            if key not in factor_cache:
                factor_cache[key] = taylor_shift_graded(
                    p.ring, target, var, exps, steps, D)
            acc = acc.mul_truncated(factor_cache[key].pow_truncated(k, D), D)
        # distribute the cleared coefficient, graded by its own step content
        for gamma, cfree in _coeff_grading(field, c * qcoeff, step_idx):
            for g2, poly in acc.strata.items():
                total = tuple(a + b for a, b in zip(gamma, g2))
                if sum(total) <= D:
                    out.add_piece(total, poly.scale(cfree))
    return out


def continuous_limit(p: DiffPoly, steps: Sequence[str],
                     target: DiffRing | None = None,
                     direction: Mapping[str, Fraction] | None = None,
                     symbols: Sequence[str] | None = None,
                     max_degree: int = 40) -> LimitResult:
    """Lowest non-vanishing stratum of the Taylor expansion of p (Def. of the
    continuous-limit map).  With `direction`, substitutes h_i = a_i * mu
    first and grades by mu alone."""
    if p.ring.action != SHIFT:
        raise ValueError("continuous_limit expects a difference polynomial")
    if p.is_zero():
        raise ValueError("zero polynomial has no continuous limit")
    require_normalized(p)
    steps = tuple(steps)
    if len(steps) != p.ring.nsyms:
        raise ValueError("need one step parameter per grid direction")
    if direction is not None:
        sub = substitute_direction(p, {s: direction[s] for s in direction},
                                   mu="mu")
        return continuous_limit(sub, ["mu"] * len(steps), target=None,
                                symbols=symbols, max_degree=max_degree)
    if target is None:
        target = partial_ring_for(p.ring, symbols)
    field = p.ring.field
    step_idx = {field.params.index(s) for s in steps}
    # clearing denominators: componentwise max of the step parts
    width = len(field.params)
    q = [0] * width
    for c in p.terms.values():
        dpart = _den_step_part(field, c, step_idx)
        q = [max(a, b) for a, b in zip(q, dpart)]
    q = tuple(q)
    maxshift = sum(p.max_shift())
    D = maxshift + 2
    while D <= max_degree:
        graded = _expand_graded(p, target, steps, q, D)
        if graded.strata:
            dmin = min(sum(g) for g in graded.strata)
            if dmin <= D - 1:  # strata strictly below D are final
                terms = sorted((g, poly) for g, poly in graded.strata.items()
                               if sum(g) == dmin)
                return LimitResult(dmin, terms, q, D, steps)
        D += 2
    raise ValueError("no non-vanishing stratum up to degree %d" % max_degree)


def w_consistency_check(fda_eqs: Sequence[DiffPoly], pde_eqs: Sequence[DiffPoly],
                        steps: Sequence[str], target: DiffRing | None = None,
                        symbols: Sequence[str] | None = None
                        ) -> tuple[bool, list[dict]]:
    """Each difference equation must imply its differential counterpart:
    single-monomial stratum proportional to the matching equation."""
    if len(fda_eqs) != len(pde_eqs):
        raise ValueError("equation count mismatch")
    details = []
    ok = True
    for ft, f in zip(fda_eqs, pde_eqs):
        lim = continuous_limit(ft, steps, target=f.ring, symbols=symbols)
        entry = {"limit": lim, "consistent": False}
        if len(lim.terms) == 1:
            r = lim.terms[0][1].primitive_part()
            fp = f.primitive_part()
            entry["consistent"] = (r == fp or r == -fp)
        details.append(entry)
        ok = ok and entry["consistent"]
    return ok, details


# ---------------------------------------------------------------------------
# modified equations
# ---------------------------------------------------------------------------


def _truncate_step_degree(p: DiffPoly, step_idx: set[int], N: int) -> DiffPoly:
    field = p.ring.field
    out_terms = {}
    for mon, c in p.terms.items():
        num, den = field.numer_denom(c)
        den_c = field.poly_to_coeff(den)
        kept = [(m, q) for m, q in field.poly_terms(num)
                if sum(e for i, e in enumerate(m) if i in step_idx) <= N]
        if not kept:
            continue
        c2 = field.from_poly_terms(kept) / den_c
        if c2:
            out_terms[mon] = c2
    return DiffPoly(p.ring, out_terms)


def _step_strata(p: DiffPoly, step_idx: set[int]) -> dict[int, DiffPoly]:
    field = p.ring.field
    out: dict[int, DiffPoly] = {}
    for mon, c in p.terms.items():
        for gamma, cfree in _coeff_grading(field, c, step_idx):
            d = sum(gamma)
            mono = field.one
            for name, e in zip(field.params, gamma):
                if e:
                    mono *= field.gen(name) ** e
            piece = DiffPoly(p.ring, {mon: cfree * mono})
            out[d] = out.get(d, p.ring.zero()) + piece
    return {d: v for d, v in out.items() if not v.is_zero()}


def modified_equation(fda_eq: DiffPoly, steps: Sequence[str], order: int,
                      ranking=None, target: DiffRing | None = None,
                      symbols: Sequence[str] | None = None) -> dict:
    """Modified PDE of a single w-consistent difference equation.

    The Taylor expansion f + sum_k h^k c_k is normalized by eliminating from
    the corrections every derivative of the leader of f, substituting the
    relation the expansion itself defines; the result is the differential
    equation the scheme satisfies to the given order.  Requires a single
    step parameter (equal spacings).
    """
    if len(set(steps)) != 1:
        raise ValueError("modified_equation requires a single step parameter")
    hname = steps[0]
    if target is None:
        target = partial_ring_for(fda_eq.ring, symbols)
    field = fda_eq.ring.field
    step_idx = {field.params.index(hname)}
    N = order
    # expand far enough that strata up to d0 + N are exact
    lim = continuous_limit(fda_eq, steps, target=target)
    d0 = lim.degree
    D = d0 + N + 1
    graded = _expand_graded(fda_eq, target, steps, lim.q, D)
    h = field.gen(hname)
    expansion = target.zero()
    for gamma, poly in graded.strata.items():
        d = sum(gamma)
        if d > d0 + N:
            continue
        expansion = expansion + poly.scale(h ** (d - d0))
    # expansion = f + sum_{k=1..N} h^k c_k
    from .orderings import Ranking, leader, ranking_for
    if ranking is None:
        ranking = ranking_for(target, "orderly")
    strata = _step_strata(expansion, step_idx)
    f = strata.get(0)
    if f is None:
        raise ValueError("expansion has no order-zero part")
    v = leader(f, ranking)
    if f.degree_in(v) != 1 or not f.coeff_of_power(v, 1).is_constant():
        raise ValueError("base equation is not monic-linear in its leader")
    lc = f.coeff_of_power(v, 1).constant_coeff()
    f = f.scale(field.one / lc)
    rest = expansion.scale(field.one / lc) - f
    g = DiffPoly(target, {((v, 1),): field.one}) - f  # v = g on solutions

    def v_occurrences(p):
        out = []
        for (var, exps) in p.indets():
            if var == v[0] and all(a >= b for a, b in zip(exps, v[1])):
                out.append((var, exps))
        return out

    guard = 0
    while True:
        occs = v_occurrences(rest)
        if not occs:
            break
        guard += 1
        if guard > 2000:
            raise RuntimeError("modified equation elimination did not settle")
        w = max(occs, key=lambda t: sum(t[1]))
        theta = tuple(a - b for a, b in zip(w[1], v[1]))
        strata = _step_strata(rest, step_idx)
        sub = g.apply_action(theta)
        for k, ck in strata.items():
            if k == 0:
                continue
            sub = sub - ck.apply_action(theta)  # strata carry their h-weight
        rest = rest.substitute_indet(w, sub)
        rest = _truncate_step_degree(rest, step_idx, N)
    corrections = _step_strata(rest, step_idx)
    series = f
    rs = {}
    for k in sorted(corrections):
        if k == 0:
            raise ArithmeticError("elimination left an order-zero defect")
        series = series + corrections[k]
        rs[k] = corrections[k].scale(field.one / h ** k)
    return {"base": f, "modified": series, "corrections": rs, "order": N,
            "stratum_degree": d0}
