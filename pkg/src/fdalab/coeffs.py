"""Exact coefficient arithmetic: the field Q(p1, ..., pk) of rational functions.

Coefficients of difference/differential polynomials live in a field of
rational functions over Q in named parameters (grid spacings h1, h2, tau,
physical constants Re, a, ...).  Arithmetic is exact; no floats enter this
layer.  The heavy lifting (sparse multivariate polynomials, GCD-based
cancellation) is delegated to sympy's sparse polynomial rings, wrapped so
the rest of the package never touches sympy directly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.fields import FracField
from sympy.polys.rings import PolyElement


class ParameterField:
    """The field Q(params) with canonical (gcd-reduced) representatives."""

    def __init__(self, params: Sequence[str]):
        params = tuple(params)
        if len(set(params)) != len(params):
            raise ValueError("duplicate parameter names: %r" % (params,))
        self.params = params
        # FracField wants at least one generator; keep a phantom for QQ itself.
        self._field = FracField(params if params else ("_phantom",), QQ)
        self._gens = dict(zip(params, self._field.gens))

    # -- constructors ---------------------------------------------------

    @property
    def zero(self):
        return self._field.zero

    @property
    def one(self):
        return self._field.one

    def gen(self, name: str):
        try:
            return self._gens[name]
        except KeyError:
            raise KeyError("unknown parameter %r (have %r)" % (name, self.params))

    def from_fraction(self, q) -> object:
        q = Fraction(q)
        return self._field(QQ(q.numerator, q.denominator))

    def __call__(self, value):
        if isinstance(value, (int, Fraction)):
            return self.from_fraction(value)
        if isinstance(value, str):
            return self.gen(value)
        return value

    # -- predicates / conversions ----------------------------------------

    def is_zero(self, c) -> bool:
        return not c

    def is_constant(self, c) -> bool:
        return c.numer.is_ground and c.denom.is_ground

    def as_fraction(self, c) -> Fraction:
        if not self.is_constant(c):
            raise ValueError("coefficient %s is not rational" % (c,))
        num = c.numer.LC if not self.is_zero(c) else QQ(0)
        den = c.denom.LC
        val = QQ(num) / QQ(den)
        return Fraction(val.numerator, val.denominator)

    def evaluate(self, c, values: Mapping[str, Fraction]) -> Fraction:
        """Evaluate at a rational point; raises ZeroDivisionError on poles."""
        num = self._eval_poly(c.numer, values)
        den = self._eval_poly(c.denom, values)
        return num / den

    def _eval_poly(self, p: PolyElement, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for mon, coef in p.terms():
            t = Fraction(coef.numerator, coef.denominator)
            for name, e in zip(self.params, mon):
                if e:
                    t *= Fraction(values[name]) ** e
            total += t
        return total

    # -- structural helpers (used by limits / substitution) --------------

    def numer_denom(self, c):
        return c.numer, c.denom

    def poly_terms(self, p: PolyElement):
        """Terms of a polynomial part as (exponent tuple, Fraction)."""
        for mon, coef in p.terms():
            yield tuple(mon[: len(self.params)]), Fraction(coef.numerator, coef.denominator)

    def from_poly_terms(self, terms: Iterable[tuple[tuple[int, ...], Fraction]]):
        out = self.zero
        for mon, q in terms:
            t = self.from_fraction(q)
            for name, e in zip(self.params, mon):
                if e:
                    t *= self.gen(name) ** e
            out += t
        return out

    def extended(self, extra: Sequence[str]) -> "ParameterField":
        return ParameterField(self.params + tuple(n for n in extra if n not in self.params))

    def map_to(self, target: "ParameterField", c, images: Mapping[str, object] | None = None):
        """Map a coefficient into `target`, sending each parameter to
        `images[name]` (an element of `target`) or to the same-named
        generator by default."""
        images = images or {}

        def image(name):
            if name in images:
                return target(images[name])
            return target.gen(name)

        def map_poly(p):
            out = target.zero
            for mon, q in self.poly_terms(p):
                t = target.from_fraction(q)
                for name, e in zip(self.params, mon):
                    if e:
                        t *= image(name) ** e
                out += t
            return out

        num = map_poly(c.numer)
        den = map_poly(c.denom)
        return num / den

    # -- gcd/content utilities -------------------------------------------

    def lcm_denominators(self, coeffs):
        """Least common multiple of the denominator polynomials."""
        acc = self._field.ring.one
        for c in coeffs:
            d = c.denom
            g = acc.gcd(d)
            acc = acc * d.quo(g)
        return acc

    def gcd_numerators(self, coeffs):
        acc = None
        for c in coeffs:
            n = c.numer
            acc = n if acc is None else acc.gcd(n)
            if acc == self._field.ring.one:
                break
        return acc if acc is not None else self._field.ring.zero

    def poly_to_coeff(self, p: PolyElement):
        return self._field.new(p, self._field.ring.one)

    def __eq__(self, other):
        return isinstance(other, ParameterField) and self.params == other.params

    def __hash__(self):
        return hash(self.params)

    def __repr__(self):
        return "ParameterField(%s)" % (", ".join(self.params) or "Q")
