"""Pseudo-reduction, Janet normal forms, auto-reduction, head/full normal forms.

Thomas-mode reductions are fraction-free: every step multiplies the work
polynomial by the initial of the (prolonged) divisor and records it, so each
reduction produces a replayable identity

    multiplier * input  =  remainder + sum_i cofactor_i * theta_i(base_i)

over the base equations.  Groebner-mode reductions (head/full normal form)
work with monic divisors instead and record the elementary reduction chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Callable, Optional, Sequence

from .janet import JanetSystem, Expvec
from .orderings import MonomialOrdering, Ranking, initial, leader
from .poly import DiffPoly, Indet, Monomial, mon_div, mon_divides, mon_mul


def _add_vec(a: Expvec, b: Expvec) -> Expvec:
    return tuple(x + y for x, y in zip(a, b))


@dataclass
class ReductionReceipt:
    """Replayable certificate for one fraction-free reduction."""

    input: DiffPoly
    remainder: DiffPoly
    multiplier: DiffPoly
    #: (base equation index, total prolongation) -> polynomial cofactor
    cofactors: dict[tuple[int, Expvec], DiffPoly]
    #: (base index, prolongation, degree used) per elementary step
    steps: list[tuple[int, Expvec, int]]

    def replay(self, base_polys: Sequence[DiffPoly]) -> DiffPoly:
        """Expand multiplier*input - sum cof*theta(f); equals the remainder."""
        acc = self.multiplier * self.input
        for (i, theta), cof in self.cofactors.items():
            acc = acc - cof * base_polys[i].apply_action(theta)
        return acc

    def verify(self, base_polys: Sequence[DiffPoly]) -> bool:
        return self.replay(base_polys) == self.remainder


def _merge_scaled(cof: dict, scale: DiffPoly) -> dict:
    return {k: scale * v for k, v in cof.items()}


def _cof_add(cof: dict, key, val: DiffPoly):
    if key in cof:
        s = cof[key] + val
        if s.is_zero():
            del cof[key]
        else:
            cof[key] = s
    else:
        cof[key] = val


# ---------------------------------------------------------------------------
# single pseudo-reduction steps (Euclid-style, fraction free)
# ---------------------------------------------------------------------------


def pseudo_reduce_algebraic(f1: DiffPoly, f2: DiffPoly, r: Ranking) -> DiffPoly:
    """One algebraic pseudo-reduction of f1 by f2 (equal leaders).

    f3 = init(f2) * f1 - init(f1-in-v) * v^(d1-d2) * f2 cancels the top power.
    """
    v1, v2 = leader(f1, r), leader(f2, r)
    if v1 != v2:
        raise ValueError("pseudo_reduce_algebraic requires equal leaders")
    d1, d2 = f1.degree_in(v1), f2.degree_in(v2)
    if d1 < d2:
        raise ValueError("degree condition violated (d1 < d2)")
    ring = f1.ring
    c1 = initial(f2, r)
    c2 = f1.coeff_of_power(v1, d1)
    vpow = DiffPoly(ring, {((v1, d1 - d2),) if d1 > d2 else (): ring.field.one})
    return c1 * f1 - c2 * vpow * f2


def pseudo_reduce_action(f1: DiffPoly, f2: DiffPoly, r: Ranking) -> DiffPoly:
    """One action pseudo-reduction: ld(f1) = theta(ld(f2)), theta != 1.

    For difference polynomials this is the initial-based step of the
    auto-reduction algorithm; for differential polynomials the prolongation
    theta(f2) is linear in the leader with the separant as initial, which
    reproduces the separant-multiplier rule.
    """
    v1, v2 = leader(f1, r), leader(f2, r)
    if v1[0] != v2[0]:
        raise ValueError("leaders involve different variables")
    theta = tuple(a - b for a, b in zip(v1[1], v2[1]))
    if any(t < 0 for t in theta) or not any(theta):
        raise ValueError("no proper prolongation relates the leaders")
    tf2 = f2.apply_action(theta)
    d1, d2 = f1.degree_in(v1), tf2.degree_in(v1)
    if d1 < d2:
        raise ValueError("degree condition violated")
    ring = f1.ring
    c1 = tf2.coeff_of_power(v1, d2)
    c2 = f1.coeff_of_power(v1, d1)
    vpow = DiffPoly(ring, {((v1, d1 - d2),) if d1 > d2 else (): ring.field.one})
    return c1 * f1 - c2 * vpow * tf2


# ---------------------------------------------------------------------------
# Janet normal form (difference/differential, fraction free, with receipts)
# ---------------------------------------------------------------------------


def janet_normal_form(r: DiffPoly, J: JanetSystem, max_steps: int = 200000
                      ) -> ReductionReceipt:
    """Full Janet reduction of r modulo a Janet-complete system.

    The head is reduced first, then every coefficient (as a polynomial in the
    leader) recursively; constants pass through unchanged.
    """
    ring = r.ring
    one = ring.one()
    counter = [0]

    def nf(p: DiffPoly):
        b = one
        cof: dict = {}
        steps: list = []
        if p.is_constant() or not J.elements:
            return p, b, cof, steps
        v = leader(p, J.ranking)
        # head loop on the fixed leader v
        while not p.is_constant():
            degv = p.degree_in(v)
            if degv == 0:
                break
            hit = J.divisor(v, degv)
            if hit is None:
                break
            el, th = hit
            counter[0] += 1
            if counter[0] > max_steps:
                raise RuntimeError("Janet reduction step budget exceeded")
            tf = el.poly.apply_action(th)
            d2 = tf.degree_in(v)
            i_f = tf.coeff_of_power(v, d2)
            c = p.coeff_of_power(v, degv)
            vpow = DiffPoly(ring, {((v, degv - d2),) if degv > d2 else (): ring.field.one})
            p = i_f * p - c * vpow * tf
            b = i_f * b
            cof = _merge_scaled(cof, i_f)
            total_theta = _add_vec(el.theta, th)
            _cof_add(cof, (el.base, total_theta), c * vpow)
            steps.append((el.base, total_theta, degv))
        if p.is_constant():
            return p, b, cof, steps
        # coefficient recursion (whole polynomial when v is gone)
        coeffs = p.coeffs_in(v)
        if set(coeffs) == {0}:
            inner = coeffs[0]
            if leader(inner, J.ranking) == v:  # cannot happen, defensive
                return p, b, cof, steps
            q, b2, cof2, steps2 = nf(inner)
            p = q
            b = b2 * b
            cof = _merge_scaled(cof, b2)
            for k2, v2 in cof2.items():
                _cof_add(cof, k2, v2)
            steps.extend(steps2)
            return p, b, cof, steps
        for k in sorted(coeffs, reverse=True):
            ck = coeffs[k]
            q, b2, cof2, steps2 = nf(ck)
            if b2 == one and not cof2:
                continue
            vpow = DiffPoly(ring, {((v, k),) if k else (): ring.field.one})
            # p <- b2 * p - (b2*ck - q) * v^k  == b2*(p - ck v^k) + q v^k
            p = b2 * (p - ck * vpow) + q * vpow
            b = b2 * b
            cof = _merge_scaled(cof, b2)
            for k2, v2 in cof2.items():
                _cof_add(cof, k2, vpow * v2)
            steps.extend(steps2)
        return p, b, cof, steps

    rem, b, cof, steps = nf(r)
    return ReductionReceipt(input=r, remainder=rem, multiplier=b,
                            cofactors=cof, steps=steps)


# ---------------------------------------------------------------------------
# auto-reduction (difference algebra)
# ---------------------------------------------------------------------------


@dataclass
class AutoReduceResult:
    flag: bool
    polys: list[DiffPoly]
    #: set when flag is False: (reducee index in the input list, receipt)
    step: Optional[tuple[int, ReductionReceipt]] = None
    #: set instead of reducing when the divisor's initial needs a case split
    blocked: Optional[tuple[int, DiffPoly]] = None
    removed: list[int] = dfield(default_factory=list)


def auto_reduce(L: Sequence[DiffPoly], r: Ranking,
                init_ok: Callable[[DiffPoly], bool] | None = None) -> AutoReduceResult:
    """Difference auto-reduction: repeatedly reduce any element whose leader
    is a prolongation of another's leader (with the degree condition).

    Zero remainders are dropped and the loop continues; the first non-zero
    remainder replaces its source and the function returns with flag False.
    When `init_ok` is given and the divisor's initial fails it, the blocking
    initial is reported instead of reducing (the caller splits).
    """
    work: list[tuple[int, DiffPoly]] = list(enumerate(L))
    for _, p in work:
        if p.is_constant():
            raise ValueError("auto_reduce requires non-constant polynomials")
    removed: list[int] = []
    while True:
        pair = None
        info = [(idx, p, leader(p, r)) for idx, p in work]
        info.sort(key=lambda t: (tuple(t[2][1]), t[2][0], t[0]), reverse=True)
        for idx1, f1, v1 in info:
            for idx2, f2, v2 in info:
                if idx1 == idx2 or v1[0] != v2[0]:
                    continue
                theta = tuple(a - b for a, b in zip(v1[1], v2[1]))
                if any(t < 0 for t in theta):
                    continue
                tf2 = f2.apply_action(theta)
                if f1.degree_in(v1) >= tf2.degree_in(v1):
                    pair = (idx1, f1, v1, idx2, f2, theta, tf2)
                    break
            if pair:
                break
        if pair is None:
            return AutoReduceResult(True, [p for _, p in work], removed=removed)
        idx1, f1, v1, idx2, f2, theta, tf2 = pair
        if init_ok is not None:
            base_init = initial(f2, r)
            if not init_ok(base_init):
                return AutoReduceResult(True, [p for _, p in work],
                                        blocked=(idx2, base_init))
        d1 = f1.degree_in(v1)
        d2 = tf2.degree_in(v1)
        i_f = tf2.coeff_of_power(v1, d2)
        c = f1.coeff_of_power(v1, d1)
        ring = f1.ring
        vpow = DiffPoly(ring, {((v1, d1 - d2),) if d1 > d2 else (): ring.field.one})
        rem = i_f * f1 - c * vpow * tf2
        work = [(i, p) for i, p in work if i != idx1]
        if rem.is_zero():
            removed.append(idx1)
            continue
        receipt = ReductionReceipt(
            input=f1, remainder=rem, multiplier=i_f,
            cofactors={(idx2, theta): c * vpow},
            steps=[(idx2, theta, d1)])
        return AutoReduceResult(False, [p for _, p in work] + [rem],
                                step=(idx1, receipt), removed=removed)


# ---------------------------------------------------------------------------
# Groebner-style head/full normal forms (monic, monomial-ordering driven)
# ---------------------------------------------------------------------------


def _shift_divisions(target: Monomial, lm: Monomial, nsyms: int):
    """All theta with theta(lm) | target, derived from factor alignments."""
    seen = set()
    out = []
    tfactors = [v for v, _ in target]
    for v, _ in lm:
        for w in tfactors:
            if w[0] != v[0]:
                continue
            theta = tuple(a - b for a, b in zip(w[1], v[1]))
            if any(t < 0 for t in theta) or theta in seen:
                continue
            seen.add(theta)
            from .poly import mon_shift
            shifted = mon_shift(lm, theta)
            if mon_divides(shifted, target):
                out.append((theta, shifted))
    if not lm:
        out.append(((0,) * nsyms, ()))
    return out


@dataclass
class NormalFormResult:
    poly: DiffPoly
    #: (divisor index, theta, cofactor monomial, coefficient) chain
    chain: list[tuple[int, Expvec, Monomial, object]]

    def replay(self, input_poly: DiffPoly, divisors: Sequence[DiffPoly],
               ordering: MonomialOrdering) -> DiffPoly:
        acc = input_poly
        for i, theta, m, c in self.chain:
            q = ordering.monic(divisors[i]).apply_action(theta)
            acc = acc - DiffPoly(acc.ring, {m: c}) * q
        return acc


def _reduce_monomial_once(p, mono, F, monics, ordering, head_only):
    """Try one elementary reduction at the given monomial of p."""
    best = None
    for i, q in enumerate(F):
        lmq = ordering.leading_monomial(q)
        for theta, shifted in _shift_divisions(mono, lmq, p.ring.nsyms):
            key = (shifted, -i)
            if best is None or ordering.compare(shifted, best[0]) > 0 or \
               (ordering.compare(shifted, best[0]) == 0 and key > best[4]):
                m = mon_div(mono, shifted)
                best = (shifted, i, theta, m, key)
    if best is None:
        return None
    shifted, i, theta, m, _ = best
    c = p.terms[mono]
    step = (i, theta, m, c)
    red = DiffPoly(p.ring, {m: c}) * monics[i].apply_action(theta)
    return p - red, step


def _normal_form(p: DiffPoly, F: Sequence[DiffPoly], ordering: MonomialOrdering,
                 head_only: bool, max_steps: int = 100000) -> NormalFormResult:
    F = [q for q in F if not q.is_zero()]
    monics = [ordering.monic(q) for q in F]
    chain = []
    steps = 0
    work = p
    # head phase
    while not work.is_zero():
        lm = ordering.leading_monomial(work)
        if not lm:
            break
        hit = _reduce_monomial_once(work, lm, F, monics, ordering, head_only)
        if hit is None:
            break
        work, step = hit
        chain.append(step)
        steps += 1
        if steps > max_steps:
            raise RuntimeError("normal form step budget exceeded")
    if head_only or work.is_zero():
        return NormalFormResult(work, chain)
    # tail phase: reduce remaining monomials in descending order
    done_upper = None  # monomials >= done_upper are irreducible now
    while True:
        candidates = sorted(work.terms, key=ordering.sort_key(), reverse=True)
        progressed = False
        for mono in candidates:
            if done_upper is not None and ordering.compare(mono, done_upper) >= 0:
                continue
            hit = _reduce_monomial_once(work, mono, F, monics, ordering, head_only)
            if hit is None:
                done_upper = mono
                continue
            work, step = hit
            chain.append(step)
            steps += 1
            if steps > max_steps:
                raise RuntimeError("normal form step budget exceeded")
            progressed = True
            break
        if not progressed:
            break
    return NormalFormResult(work, chain)


def head_normal_form(p: DiffPoly, F: Sequence[DiffPoly],
                     o: MonomialOrdering) -> NormalFormResult:
    return _normal_form(p, F, o, head_only=True)


def full_normal_form(p: DiffPoly, F: Sequence[DiffPoly],
                     o: MonomialOrdering) -> NormalFormResult:
    return _normal_form(p, F, o, head_only=False)
