"""Quasi-simple algebraic decomposition and difference Thomas decomposition.

A branch of the decomposition carries equations with provenance (every
derived equation records a replayable identity over its parents), the
inequation set (inequations hold at every grid point, hence are closed
under forward shifts), and its case-split path.

Splitting policy: whenever a reduction would multiply by a non-constant
initial that the inequations do not already force to be nonzero, the branch
is split into an inequation branch (generic, explored first) and an
equation branch (degenerate).  Inequations added by splits are normalized
to products of distinct factors; equations are never altered beyond exact
ideal arithmetic, except for the optional pointwise square-free step on
split initials, which records a root receipt.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dfield, replace
from typing import Callable, Optional, Sequence

from .janet import JanetSystem, build_janet_system
from .orderings import Ranking, initial, leader
from .poly import DiffPoly, DiffRing, Indet, require_normalized, unshift
from .reduction import (AutoReduceResult, ReductionReceipt, auto_reduce,
                        janet_normal_form)


class DecompositionBudget(RuntimeError):
    pass


@dataclass
class AnalysisSystem:
    """Equations + inequations + ranking; decomposition output also carries
    the Janet division and the derivation log."""

    ring: DiffRing
    ranking: Ranking
    equations: list[DiffPoly]
    inequations: list[DiffPoly] = dfield(default_factory=list)
    janet: Optional[JanetSystem] = None
    simple_declared: bool = False
    split_path: tuple[str, ...] = ()
    events: list[dict] = dfield(default_factory=list)
    eq_ids: list[int] = dfield(default_factory=list)

    @property
    def is_trivial(self) -> bool:
        return not self.equations and not self.inequations

    @property
    def degenerate(self) -> bool:
        """True when the branch was reached through an initial = 0 split."""
        return any(step.startswith("eq:") for step in self.split_path)


@dataclass
class _Eq:
    eid: int
    poly: DiffPoly


@dataclass
class _Branch:
    eqs: list[_Eq]
    ineqs: list[DiffPoly]
    path: tuple[str, ...]
    events: list[dict]


class _Decomposer:
    def __init__(self, system: AnalysisSystem, symbol_seq=None,
                 backshift: bool = False, max_nodes: int = 4000,
                 normalize_output: bool = True):
        self.ring = system.ring
        self.rk = system.ranking
        self.seq = tuple(symbol_seq) if symbol_seq is not None \
            else tuple(range(self.ring.nsyms))
        self.backshift = backshift
        self.max_nodes = max_nodes
        self.normalize_output = normalize_output
        self.next_eid = itertools.count()
        self.nodes = 0
        eqs = []
        events = []
        for i, p in enumerate(system.equations):
            require_normalized(p)
            eid = next(self.next_eid)
            eqs.append(_Eq(eid, p))
            events.append({"kind": "input", "eid": eid, "index": i, "poly": p})
        ineqs = []
        for g in system.inequations:
            require_normalized(g)
            ineqs.extend(_factor_normalize(g))
        self.root = _Branch(eqs, ineqs, (), events)

    def fresh(self, branch, poly, event) -> _Eq:
        eid = next(self.next_eid)
        event = dict(event)
        event["eid"] = eid
        event["poly"] = poly
        branch.events.append(event)
        return _Eq(eid, poly)

    # -- initial discharge --------------------------------------------------

    def init_nonzero(self, c: DiffPoly, branch: _Branch) -> bool:
        """Is this initial forced nonzero by constants and the (shift-closed)
        inequations?"""
        if c.is_constant():
            return not c.is_zero()
        _, prim = c.content_primitive()
        return _divides_by_shifted(prim, branch.ineqs)

    # -- splitting -----------------------------------------------------------

    def split(self, branch: _Branch, eq: _Eq, queue):
        """Split on the initial of eq: generic (initial != 0) branch is pushed
        last so it is processed first."""
        iota = initial(eq.poly, self.rk)
        _, prim = iota.content_primitive()
        v = leader(eq.poly, self.rk)
        d = eq.poly.degree_in(v)
        label = "eid%d" % eq.eid
        # degenerate branch: initial = 0
        eq_events = list(branch.events)
        eq_eqs = [e for e in branch.eqs if e.eid != eq.eid]
        b_eq = _Branch(eq_eqs, list(branch.ineqs),
                       branch.path + ("eq:" + label,), eq_events)
        factors = _pointwise_factors(prim)
        neweqs = []
        for fct in factors:
            cand = self.fresh(b_eq, fct, {
                "kind": "split-init", "of": eq.eid,
                "initial": iota, "root_of": prim})
            neweqs.append(self.maybe_unshift(b_eq, cand))
        vpow = DiffPoly(self.ring, {((v, d),): self.ring.field.one})
        tail = eq.poly - iota * vpow
        if not tail.is_zero():
            newtail = self.fresh(b_eq, tail, {
                "kind": "tail", "of": eq.eid, "initial": iota,
                "leader": v, "degree": d})
            b_eq.eqs = b_eq.eqs + neweqs + [self.maybe_unshift(b_eq, newtail)]
        else:
            b_eq.eqs = b_eq.eqs + neweqs
        queue.append(b_eq)
        # generic branch: initial != 0
        b_ne = _Branch(list(branch.eqs),
                       branch.ineqs + _factor_normalize(prim),
                       branch.path + ("ne:" + label,), list(branch.events))
        b_ne.events.append({"kind": "split-ineq", "of": eq.eid, "poly": prim})
        queue.append(b_ne)

    # -- algebraic phase -------------------------------------------------------

    def alg_step(self, branch: _Branch, queue) -> str:
        """Fix one algebraic violation; returns 'dead', 'split', 'changed'
        or 'clean'."""
        # drop zero equations, detect inconsistency
        for e in list(branch.eqs):
            if e.poly.is_zero():
                branch.eqs.remove(e)
                return "changed"
            if e.poly.is_constant():
                return "dead"
        seen = {}
        for g in list(branch.ineqs):
            if g.is_zero():
                return "dead"
            if g.is_constant():
                branch.ineqs.remove(g)
                return "changed"
            key = g.primitive_part()
            if key in seen:
                branch.ineqs.remove(g)
                return "changed"
            seen[key] = g
        # strip factors that the inequations force to be nonzero
        for e in list(branch.eqs):
            stripped, mult = _strip_nonzero_factors(e.poly, branch.ineqs)
            if mult is None:
                continue
            if stripped.is_constant():
                return "dead"  # nonzero constant times a nonzero factor
            branch.eqs.remove(e)
            branch.eqs.append(self.fresh(branch, stripped, {
                "kind": "strip", "of": e.eid, "multiplier": mult}))
            return "changed"
        # duplicate equations
        prims = {}
        for e in branch.eqs:
            key = e.poly.primitive_part()
            if key in prims:
                branch.eqs.remove(e)
                return "changed"
            prims[key] = e
        # 1. equal leaders among equations -> Euclid step
        by_leader: dict[Indet, list[_Eq]] = {}
        for e in branch.eqs:
            by_leader.setdefault(leader(e.poly, self.rk), []).append(e)
        clash = [(v, es) for v, es in by_leader.items() if len(es) > 1]
        if clash:
            clash.sort(key=lambda t: (tuple(t[0][1]), t[0][0]), reverse=True)
            v, es = clash[0]
            es.sort(key=lambda e: (e.poly.degree_in(v), e.eid))
            divisor, reducee = es[0], es[-1]
            iota = initial(divisor.poly, self.rk)
            if not self.init_nonzero(iota, branch):
                self.split(branch, divisor, queue)
                return "split"
            d1 = reducee.poly.degree_in(v)
            d2 = divisor.poly.degree_in(v)
            c = reducee.poly.coeff_of_power(v, d1)
            vpow = DiffPoly(self.ring, {((v, d1 - d2),) if d1 > d2 else ():
                                        self.ring.field.one})
            rem = iota * reducee.poly - c * vpow * divisor.poly
            receipt = ReductionReceipt(
                input=reducee.poly, remainder=rem, multiplier=iota,
                cofactors={(divisor.eid, (0,) * self.ring.nsyms): c * vpow},
                steps=[(divisor.eid, (0,) * self.ring.nsyms, d1)])
            branch.eqs.remove(reducee)
            if not rem.is_zero():
                branch.eqs.append(self.fresh(branch, rem, {
                    "kind": "euclid", "of": reducee.eid,
                    "divisor": divisor.eid, "receipt": receipt}))
            return "changed"
        # 2. non-constant undischarged initials of equations
        for e in sorted(branch.eqs, key=lambda e: e.eid):
            iota = initial(e.poly, self.rk)
            if not self.init_nonzero(iota, branch):
                self.split(branch, e, queue)
                return "split"
        # 3. inequation leader clashes -> pseudo-reduce the inequation
        eq_leaders = {leader(e.poly, self.rk): e for e in branch.eqs}
        for g in list(branch.ineqs):
            v = leader(g, self.rk)
            if v in eq_leaders:
                e = eq_leaders[v]
                d1, d2 = g.degree_in(v), e.poly.degree_in(v)
                if d1 < d2:
                    continue
                iota = initial(e.poly, self.rk)
                c = g.coeff_of_power(v, d1)
                vpow = DiffPoly(self.ring, {((v, d1 - d2),) if d1 > d2 else ():
                                            self.ring.field.one})
                rem = iota * g - c * vpow * e.poly
                branch.ineqs.remove(g)
                if rem.is_zero():
                    return "dead"
                branch.ineqs.extend(_factor_normalize(rem))
                return "changed"
        # 4. inequation initials
        for g in branch.ineqs:
            iota = initial(g, self.rk)
            if not self.init_nonzero(iota, branch):
                _, prim = iota.content_primitive()
                v = leader(g, self.rk)
                d = g.degree_in(v)
                vpow = DiffPoly(self.ring, {((v, d),): self.ring.field.one})
                tail = g - iota * vpow
                # degenerate branch: initial = 0, so g != 0 becomes tail != 0;
                # a zero tail contradicts g != 0 and the branch is dead.
                if not tail.is_zero():
                    b_eq = _Branch(list(branch.eqs),
                                   [h for h in branch.ineqs if h != g],
                                   branch.path + ("eq:ineq",),
                                   list(branch.events))
                    for fct in _pointwise_factors(prim):
                        b_eq.eqs.append(self.fresh(b_eq, fct, {
                            "kind": "split-init", "of": None, "initial": iota,
                            "root_of": prim}))
                    b_eq.ineqs.extend(_factor_normalize(tail))
                    queue.append(b_eq)
                b_ne = _Branch(list(branch.eqs),
                               branch.ineqs + _factor_normalize(prim),
                               branch.path + ("ne:ineq",), list(branch.events))
                queue.append(b_ne)
                return "split"
        return "clean"

    # -- difference phase ---------------------------------------------------

    def run(self) -> list[AnalysisSystem]:
        queue = [self.root]
        out: list[AnalysisSystem] = []
        while queue:
            branch = queue.pop()
            self.nodes += 1
            if self.nodes > self.max_nodes:
                raise DecompositionBudget("decomposition exceeded %d nodes"
                                          % self.max_nodes)
            # algebraic loop
            status = None
            while True:
                status = self.alg_step(branch, queue)
                if status in ("dead", "split"):
                    break
                if status == "clean":
                    break
            if status == "dead" or status == "split":
                continue
            if not branch.eqs and not branch.ineqs:
                # no constraints at all: the decomposition is trivial
                return [AnalysisSystem(self.ring, self.rk, [], [],
                                       split_path=branch.path,
                                       events=branch.events)]
            # difference auto-reduction (with split-on-demand)
            polys = [e.poly for e in branch.eqs]
            if polys:
                res = auto_reduce(polys, self.rk,
                                  init_ok=lambda c: self.init_nonzero(c, branch))
                if res.blocked is not None:
                    idx, _ = res.blocked
                    self.split(branch, branch.eqs[idx], queue)
                    continue
                if not res.flag:
                    idx, receipt = res.step
                    reducee = branch.eqs[idx]
                    # remap cofactor keys from list positions to eids
                    receipt.cofactors = {
                        (branch.eqs[i].eid, th): c
                        for (i, th), c in receipt.cofactors.items()}
                    receipt.steps = [(branch.eqs[i].eid, th, d)
                                     for (i, th, d) in receipt.steps]
                    rem = receipt.remainder
                    dropped = set(res.removed) | {idx}
                    branch.eqs = [e for i, e in enumerate(branch.eqs)
                                  if i not in dropped]
                    rem_eq = self.fresh(branch, rem, {
                        "kind": "autoreduce", "of": reducee.eid,
                        "receipt": receipt})
                    rem_eq = self.maybe_backshift(branch, rem_eq)
                    branch.eqs = branch.eqs + [rem_eq]
                    queue.append(branch)
                    continue
                if res.removed:
                    branch.eqs = [e for i, e in enumerate(branch.eqs)
                                  if i not in set(res.removed)]
            # Janet completion
            J, elements = self.completed(branch)
            # passivity
            remainders = []
            constant_nf = False
            for el_index, el in enumerate(J.elements):
                for axis in range(self.ring.nsyms):
                    if axis in el.mu:
                        continue
                    sigma = tuple(1 if k == axis else 0
                                  for k in range(self.ring.nsyms))
                    prolonged = el.poly.apply_action(sigma)
                    receipt = janet_normal_form(prolonged, J)
                    nf = receipt.remainder
                    if nf.is_zero():
                        continue
                    if nf.is_constant():
                        constant_nf = True
                        break
                    remainders.append((el, sigma, receipt))
                if constant_nf:
                    break
            if constant_nf:
                branch.events.append({"kind": "drop",
                                      "reason": "constant passivity remainder"})
                continue
            if remainders:
                base_eqs = list(branch.eqs)
                for el, sigma, receipt in remainders:
                    receipt.cofactors = {
                        (base_eqs[b].eid, th): c
                        for (b, th), c in receipt.cofactors.items()}
                    receipt.steps = [(base_eqs[b].eid, th, d)
                                     for (b, th, d) in receipt.steps]
                    new_eq = self.fresh(branch, receipt.remainder, {
                        "kind": "passivity", "of": base_eqs[el.base].eid,
                        "sigma": sigma, "theta": el.theta, "receipt": receipt})
                    new_eq = self.maybe_backshift(branch, new_eq)
                    branch.eqs.append(new_eq)
                branch.eqs = self.with_janet_eqs(branch, J, elements)
                queue.append(branch)
                continue
            # passive: reduce inequations, check consistency, emit
            sysout = self.emit(branch, J, elements)
            if sysout is not None:
                out.append(sysout)
        return out

    def completed(self, branch: _Branch):
        polys = [e.poly for e in branch.eqs]
        J = build_janet_system(polys, self.rk, self.seq)
        elements = []
        for el in J.elements:
            base_eq = branch.eqs[el.base]
            if any(el.theta):
                eq = self.fresh(branch, el.poly, {
                    "kind": "prolong", "of": base_eq.eid, "theta": el.theta})
            else:
                eq = base_eq
            elements.append(eq)
        return J, elements

    def with_janet_eqs(self, branch, J, elements) -> list[_Eq]:
        seen = set()
        out = []
        for eq in elements + branch.eqs:
            if eq.eid not in seen:
                seen.add(eq.eid)
                out.append(eq)
        return out

    def maybe_backshift(self, branch: _Branch, eq: _Eq) -> _Eq:
        if not self.backshift:
            return eq
        newpoly, subs, delta = _backshift_simplify(eq.poly, branch, self.rk)
        if newpoly is None or _size_key(newpoly) >= _size_key(eq.poly):
            return eq
        return self.fresh(branch, newpoly, {
            "kind": "backshift", "of": eq.eid, "delta": delta,
            "substitutions": subs})

    def maybe_unshift(self, branch: _Branch, eq: _Eq) -> _Eq:
        """Plain common back-shift (no substitutions), for split equations."""
        if not self.backshift or self.ring.action != "shift":
            return eq
        vs = eq.poly.indets()
        if not vs:
            return eq
        delta = tuple(min(e[j] for _, e in vs) for j in range(self.ring.nsyms))
        if not any(delta):
            return eq
        newpoly = unshift(eq.poly, delta)
        return self.fresh(branch, newpoly, {
            "kind": "backshift", "of": eq.eid, "delta": delta,
            "substitutions": []})

    def emit(self, branch: _Branch, J: JanetSystem,
             elements: list[_Eq]) -> Optional[AnalysisSystem]:
        max_eq_degree = max((el.poly.degree_in(el.leader) for el in J.elements),
                            default=1)
        new_ineqs = []
        for g in branch.ineqs:
            if self.backshift:
                vs = g.indets()
                if vs:
                    delta = tuple(min(e[j] for _, e in vs)
                                  for j in range(self.ring.nsyms))
                    if any(delta):
                        g = unshift(g, delta)
            receipt = janet_normal_form(g, J)
            nf = receipt.remainder
            if nf.is_zero():
                branch.events.append({"kind": "drop",
                                      "reason": "inequation reduces to zero"})
                return None
            # power guard: g != 0 with g^k in the ideal kills the branch
            dead = False
            for k in range(2, max_eq_degree + 1):
                if janet_normal_form(nf ** k, J).remainder.is_zero():
                    dead = True
                    break
            if dead:
                branch.events.append({"kind": "drop",
                                      "reason": "inequation power in ideal"})
                return None
            if nf.is_constant():
                continue
            new_ineqs.extend(_factor_normalize(nf))
        eq_polys = []
        eq_ids = []
        for el, eq in zip(J.elements, elements):
            p = el.poly
            if self.normalize_output:
                p2, eq = self.tail_normalize(branch, J, el, eq)
                p = p2
            _, p = p.content_primitive()
            eq_polys.append(p)
            eq_ids.append(eq.eid)
        return AnalysisSystem(
            self.ring, self.rk, eq_polys, new_ineqs,
            janet=J, split_path=branch.path, events=branch.events,
            eq_ids=eq_ids)

    def tail_normalize(self, branch, J: JanetSystem, el, eq: _Eq):
        """Janet-reduce the non-head part of an output equation (leader and
        degree are preserved; the multiplier joins the initial)."""
        v = el.leader
        d = el.poly.degree_in(v)
        iota = el.poly.coeff_of_power(v, d)
        vpow = DiffPoly(self.ring, {((v, d),): self.ring.field.one})
        rest = el.poly - iota * vpow
        if rest.is_zero():
            return el.poly, eq
        sub = JanetSystem(J.ranking, J.symbol_seq,
                          [e for e in J.elements if e is not el])
        receipt = janet_normal_form(rest, sub)
        if receipt.remainder == rest:
            return el.poly, eq
        newpoly = receipt.multiplier * iota * vpow + receipt.remainder
        neweq = self.fresh(branch, newpoly, {
            "kind": "tail-normalize", "of": eq.eid, "receipt": receipt})
        el.poly = newpoly
        return newpoly, neweq


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _pointwise_factors(p: DiffPoly) -> list[DiffPoly]:
    """Distinct-factor form of the monomial content plus the cofactor;
    pointwise zero sets are preserved (x^2*y and x*y vanish together)."""
    if p.is_zero() or p.is_constant():
        return [p]
    common = None
    for m in p.monomials():
        d = dict(m)
        common = d if common is None else {
            v: min(k, d.get(v, 0)) for v, k in common.items() if v in d}
        if not common:
            break
    out = []
    rest = p
    ring = p.ring
    if common:
        mono = tuple(sorted((v, k) for v, k in common.items() if k))
        if mono:
            for v, _ in mono:
                out.append(DiffPoly(ring, {((v, 1),): ring.field.one}))
            from .poly import mon_div
            rest = DiffPoly(ring, {mon_div(m, mono): c
                                   for m, c in p.terms.items()})
    if not rest.is_constant():
        out.append(rest.primitive_part())
    if not out:
        out = [p.primitive_part()]
    return out


def _factor_normalize(g: DiffPoly) -> list[DiffPoly]:
    """Normalize an inequation to a list of distinct primitive factors."""
    return [f for f in _pointwise_factors(g) if not f.is_constant()]


def _size_key(p: DiffPoly):
    from .poly import mon_total_degree, mon_shift_degree
    if p.is_zero():
        return (0, 0, 0)
    return (max(mon_total_degree(m) for m in p.monomials()),
            max(mon_shift_degree(m) for m in p.monomials()),
            len(p.terms))


def _strip_nonzero_factors(p: DiffPoly, ineqs: Sequence[DiffPoly]):
    """Divide out factors that are forward shifts of inequations; returns
    (stripped polynomial, multiplier) or (p, None) when nothing divides.
    Pointwise the zero set is unchanged because the multiplier never
    vanishes on the branch."""
    work = p
    mult = p.ring.one()
    changed = False
    guard = 0
    while not work.is_constant():
        guard += 1
        if guard > 64:
            break
        progressed = False
        work_indets = work.indets()
        for g in ineqs:
            g_indets = sorted(g.indets())
            if not g_indets:
                continue
            base = g_indets[0]
            for v in sorted(work_indets):
                if v[0] != base[0]:
                    continue
                theta = tuple(a - b for a, b in zip(v[1], base[1]))
                if any(t < 0 for t in theta):
                    continue
                shifted = g.apply_action(theta)
                q = _try_exact_divide(work, shifted)
                if q is not None:
                    work = q
                    mult = mult * shifted
                    progressed = True
                    changed = True
                    break
            if progressed:
                break
        if not progressed:
            break
    if not changed:
        return p, None
    return work, mult


def _divides_by_shifted(c: DiffPoly, ineqs: Sequence[DiffPoly]) -> bool:
    """Can c be written (up to a constant) as a product of forward shifts of
    the inequations?  Sound but not complete; enough to discharge initials
    that are literally shifted inequation powers."""
    stripped, mult = _strip_nonzero_factors(c, ineqs)
    return mult is not None and stripped.is_constant() and not stripped.is_zero()


def _try_exact_divide(num: DiffPoly, den: DiffPoly) -> Optional[DiffPoly]:
    from .orderings import _exact_quo
    try:
        return _exact_quo(num, den)
    except ArithmeticError:
        return None


def _backshift_simplify(p: DiffPoly, branch: _Branch, rk: Ranking):
    """Upward substitution + common back-shift (reflexive closure step).

    Replaces blocking low indeterminates using equations solved for their
    lowest indeterminate (when that indeterminate is linear with constant
    coefficient), then removes the common shift.  Returns (new polynomial,
    substitution log, delta) or (None, ..) when nothing helps.
    """
    ring = p.ring
    n = ring.nsyms
    subs_log = []
    work = p

    def mins(q):
        vs = q.indets()
        if not vs:
            return (0,) * n
        return tuple(min(e[j] for _, e in vs) for j in range(n))

    def blockers(q):
        out = set()
        for v in q.indets():
            if any(e == 0 for e in v[1]):
                out.add(v)
        return out

    for _ in range(20):
        delta = mins(work)
        if any(delta):
            work = unshift(work, delta)
            if subs_log or any(delta):
                return work, subs_log, delta
        blocked = blockers(work)
        if not blocked:
            break
        progressed = False
        for v in sorted(blocked):
            for e in branch.eqs:
                q = e.poly
                vs = sorted(q.indets(), key=lambda w: (tuple(w[1]), w[0]))
                if not vs:
                    continue
                low = min(vs, key=lambda w: _rank_key(rk, w))
                if low[0] != v[0]:
                    continue
                theta = tuple(a - b for a, b in zip(v[1], low[1]))
                if any(t < 0 for t in theta):
                    continue
                tq = q.apply_action(theta)
                if tq.degree_in(v) != 1:
                    continue
                coeff = tq.coeff_of_power(v, 1)
                if not coeff.is_constant():
                    continue
                expr = (tq.coeff_of_power(v, 0)).scale(
                    -ring.field.one / coeff.constant_coeff())
                new_blockers = {w for w in expr.indets()
                                if any(x == 0 for x in w[1])}
                if not new_blockers <= (blocked - {v}):
                    candidate_new = new_blockers - blocked
                    if candidate_new:
                        continue
                cand = work.substitute_indet(v, expr)
                if blockers(cand) >= blocked:
                    continue
                subs_log.append({"indet": v, "eid": e.eid, "theta": theta})
                work = cand
                progressed = True
                break
            if progressed:
                break
        if not progressed:
            break
    return None, subs_log, (0,) * n


def _rank_key(rk: Ranking, v: Indet):
    import functools
    return functools.cmp_to_key(rk.compare)(v)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def algebraic_quasi_simple_decompose(S: AnalysisSystem,
                                     max_nodes: int = 2000
                                     ) -> list[AnalysisSystem]:
    """Decompose into systems that are quasi-simple as algebraic systems
    (distinct leaders, non-vanishing initials; no discriminant splits)."""
    dec = _Decomposer(S, max_nodes=max_nodes)
    queue = [dec.root]
    out = []
    while queue:
        branch = queue.pop()
        dec.nodes += 1
        if dec.nodes > max_nodes:
            raise DecompositionBudget("algebraic decomposition budget")
        while True:
            status = dec.alg_step(branch, queue)
            if status != "changed":
                break
        if status == "clean":
            out.append(AnalysisSystem(
                S.ring, S.ranking, [e.poly for e in branch.eqs],
                list(branch.ineqs), split_path=branch.path,
                events=branch.events,
                eq_ids=[e.eid for e in branch.eqs]))
    return out


def difference_decompose(S: AnalysisSystem, symbol_order=None,
                         backshift: bool = False, max_nodes: int = 4000,
                         normalize_output: bool = True) -> list[AnalysisSystem]:
    """Difference Thomas decomposition into passive quasi-simple systems."""
    seq = None
    if symbol_order is not None:
        seq = tuple(S.ring.symbols.index(s) for s in symbol_order)
    dec = _Decomposer(S, symbol_seq=seq, backshift=backshift,
                      max_nodes=max_nodes, normalize_output=normalize_output)
    return dec.run()


def verify_quasi_simple(S: AnalysisSystem) -> tuple[bool, list[str]]:
    """Check quasi-simplicity conditions 1-3, passivity, and reducedness of
    the inequations; returns (ok, list of violations)."""
    report = []
    rk = S.ranking
    polys = list(S.equations)
    for p in polys + list(S.inequations):
        if p.is_constant():
            report.append("constant polynomial in system")
    leaders = []
    for p in polys + list(S.inequations):
        if not p.is_constant():
            leaders.append(leader(p, rk))
    if len(set(leaders)) != len(leaders):
        report.append("leaders are not pairwise distinct")
    J = S.janet
    if J is None:
        try:
            J = build_janet_system(polys, rk)
        except ValueError as exc:
            report.append(str(exc))
            return False, report
    base_count = len(polys)
    if len(J.elements) != base_count:
        report.append("system is not Janet complete as given")
        return False, report
    # condition 3: initials nonzero modulo the lower system / inequations
    for p in polys:
        iota = initial(p, rk)
        if iota.is_constant():
            continue
        nf = janet_normal_form(iota, J).remainder
        if nf.is_zero():
            report.append("initial reduces to zero: %r" % (iota,))
    # passivity
    n = S.ring.nsyms
    for el in J.elements:
        for axis in range(n):
            if axis in el.mu:
                continue
            sigma = tuple(1 if k == axis else 0 for k in range(n))
            nf = janet_normal_form(el.poly.apply_action(sigma), J).remainder
            if not nf.is_zero():
                report.append("passivity fails for element with leader %r, "
                              "symbol %s" % (el.leader, S.ring.symbols[axis]))
    # inequations reduced
    for g in S.inequations:
        nf = janet_normal_form(g, J).remainder
        if nf.is_zero():
            report.append("inequation reduces to zero")
        elif nf.primitive_part() != g.primitive_part():
            report.append("inequation not Janet reduced: %r" % (g,))
    return not report, report
