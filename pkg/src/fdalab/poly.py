"""Difference and differential polynomials in operator indeterminates.

An operator indeterminate is a pair (variable index, exponent tuple): the
exponent tuple records a power product of the commuting action symbols
applied to the dependent variable, either partial derivations (action
"partial") or forward shifts (action "shift").  Polynomials are sparse maps
from power products of indeterminates to coefficients in a ParameterField.

Negative shift exponents are a staging form produced only by the input
parser; every algorithmic consumer calls `require_normalized` or goes
through `normalize_shifts` first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coeffs import ParameterField

#: (variable index, exponent tuple) -- e.g. (0, (1, 0)) is u shifted once in
#: the first grid direction, or u_x in a differential ring.
Indet = tuple[int, tuple[int, ...]]

#: sorted tuple of (indet, power); () is the monomial 1.
Monomial = tuple[tuple[Indet, int], ...]

SHIFT = "shift"
PARTIAL = "partial"


def mon_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for v, k in m2:
        acc[v] = acc.get(v, 0) + k
    return tuple(sorted(acc.items()))


def mon_pow(m: Monomial, k: int) -> Monomial:
    if k == 0 or not m:
        return ()
    return tuple((v, e * k) for v, e in m)


def mon_divides(m1: Monomial, m2: Monomial) -> bool:
    d2 = dict(m2)
    return all(d2.get(v, 0) >= k for v, k in m1)


def mon_div(m1: Monomial, m2: Monomial) -> Monomial:
    """m1 / m2; caller guarantees divisibility."""
    d = dict(m1)
    for v, k in m2:
        d[v] -= k
        if d[v] == 0:
            del d[v]
    return tuple(sorted(d.items()))


def mon_lcm(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for v, k in m2:
        d[v] = max(d.get(v, 0), k)
    return tuple(sorted(d.items()))


def mon_gcd(m1: Monomial, m2: Monomial) -> Monomial:
    d2 = dict(m2)
    out = {}
    for v, k in m1:
        g = min(k, d2.get(v, 0))
        if g:
            out[v] = g
    return tuple(sorted(out.items()))


def mon_shift(m: Monomial, theta: Sequence[int]) -> Monomial:
    if not any(theta):
        return m
    return tuple(sorted((((var, tuple(e + t for e, t in zip(exps, theta))), k)
                         for (var, exps), k in m)))


def mon_total_degree(m: Monomial) -> int:
    return sum(k for _, k in m)


def mon_shift_degree(m: Monomial) -> int:
    """Total order of the action symbols, counted with multiplicity."""
    return sum(k * sum(exps) for (_, exps), k in m)


@dataclass(frozen=True)
class DiffRing:
    """Ambient ring: action kind, symbol names, variable names, coefficients."""

    action: str
    symbols: tuple[str, ...]
    variables: tuple[str, ...]
    field: ParameterField

    def __post_init__(self):
        if self.action not in (SHIFT, PARTIAL):
            raise ValueError("action must be 'shift' or 'partial'")

    @property
    def nsyms(self) -> int:
        return len(self.symbols)

    def var_index(self, name: str) -> int:
        return self.variables.index(name)

    # -- constructors ---------------------------------------------------

    def zero(self) -> "DiffPoly":
        return DiffPoly(self, {})

    def one(self) -> "DiffPoly":
        return DiffPoly(self, {(): self.field.one})

    def const(self, c) -> "DiffPoly":
        c = self.field(c)
        return DiffPoly(self, {(): c} if c else {})

    def indet(self, var, exps) -> "DiffPoly":
        if isinstance(var, str):
            var = self.var_index(var)
        exps = tuple(exps)
        if len(exps) != self.nsyms:
            raise ValueError("exponent tuple length mismatch")
        v: Indet = (var, exps)
        return DiffPoly(self, {((v, 1),): self.field.one})

    def poly(self, terms: Mapping[Monomial, object]) -> "DiffPoly":
        clean = {}
        for m, c in terms.items():
            c = self.field(c)
            if c:
                clean[m] = c
        return DiffPoly(self, clean)


class DiffPoly:
    """Sparse polynomial over operator indeterminates; immutable by convention."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: DiffRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basics ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_coeff(self):
        return self.terms.get((), self.ring.field.zero)

    def indets(self) -> set[Indet]:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def monomials(self):
        return self.terms.keys()

    def __eq__(self, other):
        return (isinstance(other, DiffPoly) and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "DiffPoly"):
        if self.ring != other.ring:
            raise ValueError("mixed rings")

    def __add__(self, other):
        if not isinstance(other, DiffPoly):
            other = self.ring.const(other)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return DiffPoly(self.ring, terms)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return DiffPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffPoly):
            other = self.ring.const(other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (self.__neg__()).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            return self.scale(other)
        self._check(other)
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        out: dict = {}
        for m2, c2 in small.items():
            for m1, c1 in big.items():
                m = mon_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return DiffPoly(self.ring, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "DiffPoly":
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        return DiffPoly(self.ring, {m: c0 * c for m, c0 in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- views -------------------------------------------------------------

    def degree_in(self, v: Indet) -> int:
        d = 0
        for m in self.terms:
            for w, k in m:
                if w == v and k > d:
                    d = k
        return d

    def coeffs_in(self, v: Indet) -> dict[int, "DiffPoly"]:
        """Split as a univariate polynomial in v: power -> coefficient."""
        buckets: dict[int, dict] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for w, e in m:
                if w == v:
                    k = e
                else:
                    rest.append((w, e))
            buckets.setdefault(k, {})[tuple(rest)] = c
        return {k: DiffPoly(self.ring, t) for k, t in buckets.items()}

    def coeff_of_power(self, v: Indet, k: int) -> "DiffPoly":
        return self.coeffs_in(v).get(k, self.ring.zero())

    # -- actions -------------------------------------------------------------

    def shift(self, theta: Sequence[int]) -> "DiffPoly":
        """Apply sigma^theta (endomorphism); coefficients are grid constants."""
        if self.ring.action != SHIFT:
            raise ValueError("shift applied to a differential polynomial")
        theta = tuple(theta)
        if any(t < 0 for t in theta):
            raise ValueError("negative shift in apply_action")
        if not any(theta):
            return self
        return DiffPoly(self.ring, {mon_shift(m, theta): c for m, c in self.terms.items()})

    def derive_once(self, axis: int) -> "DiffPoly":
        """Total derivative along one symbol (Leibniz rule)."""
        if self.ring.action != PARTIAL:
            raise ValueError("derivation applied to a difference polynomial")
        out = self.ring.zero()
        for m, c in self.terms.items():
            for i, (v, k) in enumerate(m):
                var, exps = v
                dv = (var, tuple(e + (1 if j == axis else 0) for j, e in enumerate(exps)))
                rest = list(m)
                if k == 1:
                    del rest[i]
                else:
                    rest[i] = (v, k - 1)
                newmon = mon_mul(tuple(rest), ((dv, 1),))
                out = out + DiffPoly(self.ring, {newmon: c * self.ring.field.from_fraction(k)})
        return out

    def apply_action(self, theta: Sequence[int]) -> "DiffPoly":
        theta = tuple(theta)
        if any(t < 0 for t in theta):
            raise ValueError("negative exponent in apply_action")
        if self.ring.action == SHIFT:
            return self.shift(theta)
        p = self
        for axis, t in enumerate(theta):
            for _ in range(t):
                p = p.derive_once(axis)
        return p

    # -- substitution -----------------------------------------------------

    def substitute_indet(self, v: Indet, value: "DiffPoly") -> "DiffPoly":
        """Replace every occurrence of the indeterminate v by `value`."""
        out = self.ring.zero()
        powers = {0: self.ring.one()}

        def vp(k):
            if k not in powers:
                powers[k] = vp(k - 1) * value
            return powers[k]

        for m, c in self.terms.items():
            k = 0
            rest = []
            for w, e in m:
                if w == v:
                    k = e
                else:
                    rest.append((w, e))
            term = DiffPoly(self.ring, {tuple(rest): c})
            out = out + (term * vp(k) if k else term)
        return out

    def evaluate(self, assignment: Mapping[Indet, Fraction],
                 params: Mapping[str, Fraction]) -> Fraction:
        field = self.ring.field
        total = Fraction(0)
        for m, c in self.terms.items():
            t = field.evaluate(c, params)
            for v, k in m:
                t *= Fraction(assignment[v]) ** k
            total += t
        return total

    # -- normalization ------------------------------------------------------

    def content_primitive(self):
        """Return (content, primitive) with content in the coefficient field:
        primitive has coprime integer-polynomial numerators, denominator 1,
        positive leading numerator coefficient (in a fixed term order)."""
        field = self.ring.field
        if not self.terms:
            return field.one, self
        coeffs = list(self.terms.values())
        den = field.lcm_denominators(coeffs)
        cleared = [c * field.poly_to_coeff(den) for c in coeffs]
        num_gcd = field.gcd_numerators(cleared)
        content = field.poly_to_coeff(num_gcd) / field.poly_to_coeff(den)
        prim_terms = {m: c / content for m, c in zip(self.terms.keys(), coeffs)}
        prim = DiffPoly(self.ring, prim_terms)
        # sign normalization: leading (structurally largest) term positive
        lead = max(prim.terms)
        lc = prim.terms[lead]
        num = lc.numer
        if num.LC < 0:
            prim = -prim
            content = -content
        return content, prim

    def primitive_part(self) -> "DiffPoly":
        return self.content_primitive()[1]

    # -- misc ---------------------------------------------------------------

    def max_shift(self) -> tuple[int, ...]:
        """Componentwise maximum exponent over all indeterminates."""
        mx = [0] * self.ring.nsyms
        for var, exps in self.indets():
            for j, e in enumerate(exps):
                if e > mx[j]:
                    mx[j] = e
        return tuple(mx)

    def __repr__(self):
        from .render import render_poly
        return render_poly(self)


def require_normalized(p: DiffPoly):
    for _, exps in p.indets():
        if any(e < 0 for e in exps):
            raise ValueError("polynomial contains negative shifts; "
                             "run normalize_shifts first")


def normalize_shifts(p: DiffPoly) -> tuple[DiffPoly, tuple[int, ...]]:
    """Clear negative shift exponents by the minimal power product of
    right-shift operators; returns (theta . p, theta)."""
    if p.ring.action != SHIFT:
        raise ValueError("normalize_shifts is defined for difference polynomials")
    n = p.ring.nsyms
    mins = [0] * n
    for _, exps in p.indets():
        for j, e in enumerate(exps):
            if e < mins[j]:
                mins[j] = e
    theta = tuple(-m for m in mins)
    if not any(theta):
        return p, theta
    shifted = DiffPoly(p.ring, {mon_shift(m, theta): c for m, c in p.terms.items()})
    return shifted, theta


def unshift(p: DiffPoly, delta: Sequence[int]) -> DiffPoly:
    """Apply sigma^{-delta}; requires every exponent to stay non-negative."""
    delta = tuple(delta)
    neg = tuple(-d for d in delta)
    for _, exps in p.indets():
        if any(e + s < 0 for e, s in zip(exps, neg)):
            raise ValueError("unshift would create negative exponents")
    return DiffPoly(p.ring, {mon_shift(m, neg): c for m, c in p.terms.items()})


def substitute_direction(p: DiffPoly, direction: Mapping[str, Fraction] | Sequence,
                         mu: str = "mu") -> DiffPoly:
    """Substitute h_i := a_i * mu in all coefficients (directional limit h -> 0).

    `direction` maps step-symbol names to positive rationals; the result's
    coefficients live in the field extended by `mu`.
    """
    field = p.ring.field
    if not isinstance(direction, Mapping):
        raise TypeError("direction must map step names to rationals")
    for name, a in direction.items():
        if name not in field.params:
            raise KeyError("unknown step symbol %r" % (name,))
        if Fraction(a) <= 0:
            raise ValueError("direction components must be positive")
    target = field.extended([mu])
    mu_gen = target.gen(mu)
    images = {name: target.from_fraction(Fraction(a)) * mu_gen
              for name, a in direction.items()}
    new_ring = DiffRing(p.ring.action, p.ring.symbols, p.ring.variables, target)
    terms = {m: field.map_to(target, c, images) for m, c in p.terms.items()}
    return new_ring.poly(terms)
