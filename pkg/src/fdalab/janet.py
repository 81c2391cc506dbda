"""Janet division: admissible symbols, completion, divisor queries.

Janet division partitions the multiples of a finite monomial set into
disjoint cones; the admissible symbols of each member generate its cone.
Monomials here are plain exponent tuples over the action symbols (one
monomial set per dependent variable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .orderings import Ranking
from .poly import DiffPoly, Indet

Expvec = tuple[int, ...]


def admissible_symbols(M: Iterable[Expvec], m: Expvec,
                       symbol_seq: Sequence[int] | None = None) -> frozenset[int]:
    """Admissible symbol axes for m within M (max-prefix rule).

    `symbol_seq` fixes the total ordering of the symbols the division uses;
    defaults to the natural axis order.
    """
    M = list(M)
    if m not in M:
        raise ValueError("monomial %r not in the set" % (m,))
    n = len(m)
    seq = tuple(symbol_seq) if symbol_seq is not None else tuple(range(n))
    admissible = set()
    group = M
    for j in seq:
        mx = max(v[j] for v in group)
        if m[j] == mx:
            admissible.add(j)
        group = [v for v in group if v[j] == m[j]]
    return frozenset(admissible)


def _in_cone(target: Expvec, m: Expvec, mu: frozenset[int]) -> bool:
    for j, (t, e) in enumerate(zip(target, m)):
        if t < e:
            return False
        if t > e and j not in mu:
            return False
    return True


def janet_divisor_monomial(M: list[Expvec], mus: list[frozenset[int]],
                           target: Expvec) -> Optional[int]:
    for i, (m, mu) in enumerate(zip(M, mus)):
        if _in_cone(target, m, mu):
            return i
    return None


def _is_multiple(target: Expvec, M: Iterable[Expvec]) -> bool:
    return any(all(t >= e for t, e in zip(target, m)) for m in M)


def janet_complete(M: Iterable[Expvec],
                   symbol_seq: Sequence[int] | None = None) -> list[Expvec]:
    """Minimal Janet-complete superset of M (standard completion loop)."""
    work = sorted(set(M))
    if not work:
        return []
    n = len(work[0])
    while True:
        mus = [admissible_symbols(work, m, symbol_seq) for m in work]
        new = None
        for m, mu in zip(work, mus):
            for j in range(n):
                if j in mu:
                    continue
                cand = tuple(e + (1 if k == j else 0) for k, e in enumerate(m))
                if janet_divisor_monomial(work, mus, cand) is None:
                    new = cand
                    break
            if new:
                break
        if new is None:
            return work
        work = sorted(set(work) | {new})


def cone_partition_ok(M: list[Expvec], symbol_seq=None, degree: int = 8) -> bool:
    """Brute-force window check: every multiple of M with total degree up to
    `degree` lies in exactly one Janet cone."""
    if not M:
        return True
    n = len(M[0])
    mus = [admissible_symbols(M, m, symbol_seq) for m in M]

    def walk(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for e in range(degree - sum(prefix) + 1):
            yield from walk(prefix + [e])

    for target in walk([]):
        hits = sum(1 for m, mu in zip(M, mus) if _in_cone(target, m, mu))
        if _is_multiple(target, M):
            if hits != 1:
                return False
        elif hits != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Janet systems over difference/differential polynomials
# ---------------------------------------------------------------------------


@dataclass
class JanetElement:
    poly: DiffPoly
    leader: Indet
    mu: frozenset[int]
    #: (index of the base equation, prolongation applied by completion)
    base: int
    theta: Expvec


@dataclass
class JanetSystem:
    ranking: Ranking
    symbol_seq: tuple[int, ...]
    elements: list[JanetElement]

    def divisor(self, v: Indet, deg: int) -> Optional[tuple[JanetElement, Expvec]]:
        """Unique (element, theta) with v = theta * leader(element) inside the
        element's cone and deg >= degree of the element in its leader."""
        var, exps = v
        for el in self.elements:
            lvar, lexps = el.leader
            if lvar != var:
                continue
            if not _in_cone(exps, lexps, el.mu):
                continue
            d = el.poly.degree_in(el.leader)
            if deg < d:
                return None  # cones are disjoint: no other element can match
            theta = tuple(a - b for a, b in zip(exps, lexps))
            return el, theta
        return None

    def polys(self) -> list[DiffPoly]:
        return [el.poly for el in self.elements]


def build_janet_system(polys: Sequence[DiffPoly], ranking: Ranking,
                       symbol_seq: Sequence[int] | None = None) -> JanetSystem:
    """Janet-complete a finite set of non-constant polynomials.

    Completion prolongations enter as first-class elements carrying their
    origin, so reduction receipts can always be expressed in terms of the
    base equations.
    """
    from .orderings import leader as ld
    if not polys:
        return JanetSystem(ranking, tuple(symbol_seq or ()), [])
    n = polys[0].ring.nsyms
    seq = tuple(symbol_seq) if symbol_seq is not None else tuple(range(n))
    by_var: dict[int, list[tuple[Expvec, int]]] = {}
    leaders = []
    for i, p in enumerate(polys):
        v = ld(p, ranking)
        leaders.append(v)
        by_var.setdefault(v[0], []).append((v[1], i))
    elements: list[JanetElement] = []
    for var, entries in sorted(by_var.items()):
        base_monos = [e for e, _ in entries]
        if len(set(base_monos)) != len(base_monos):
            raise ValueError("distinct leaders required for Janet completion")
        completed = janet_complete(base_monos, seq)
        mono_to_base = dict((e, i) for e, i in entries)
        for mono in completed:
            if mono in mono_to_base:
                i = mono_to_base[mono]
                elements.append(JanetElement(polys[i], (var, mono),
                                             frozenset(), i, (0,) * n))
            else:
                # smallest base monomial dividing it, maximal overlap
                cands = [(e, i) for e, i in entries
                         if all(a >= b for a, b in zip(mono, e))]
                e, i = max(cands, key=lambda t: sum(t[0]))
                theta = tuple(a - b for a, b in zip(mono, e))
                elements.append(JanetElement(polys[i].apply_action(theta),
                                             (var, mono), frozenset(), i, theta))
        monos = completed
        mus = {m: admissible_symbols(monos, m, seq) for m in monos}
        for el in elements:
            if el.leader[0] == var:
                el.mu = mus[el.leader[1]]
    return JanetSystem(ranking, seq, elements)
