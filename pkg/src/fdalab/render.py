"""Human-readable printing of polynomials and systems.

Difference indeterminates print with grid subscripts, ``u[i+1,j]``; partial
derivatives with symbol suffixes, ``u_x,y``.  Coefficients print in the
sympy rational-function form.
"""

from __future__ import annotations

from .poly import DiffPoly, Monomial, SHIFT

GRID_LETTERS = ("i", "j", "k", "l", "m", "n")


def render_indet(ring, v) -> str:
    var, exps = v
    name = ring.variables[var]
    if ring.action == SHIFT:
        subs = []
        for pos, e in enumerate(exps):
            letter = GRID_LETTERS[pos % len(GRID_LETTERS)]
            subs.append(letter if e == 0 else "%s+%d" % (letter, e))
        return "%s[%s]" % (name, ",".join(subs))
    parts = []
    for pos, e in enumerate(exps):
        parts.extend([ring.symbols[pos]] * e)
    if not parts:
        return name
    return "%s_%s" % (name, ",".join(parts))


def render_monomial(ring, m: Monomial) -> str:
    if not m:
        return "1"
    factors = []
    for v, k in sorted(m):
        s = render_indet(ring, v)
        factors.append(s if k == 1 else "%s^%d" % (s, k))
    return "*".join(factors)


def _coeff_str(field, c) -> tuple[str, bool]:
    """Render a coefficient; second value says whether it needs parentheses."""
    s = str(c)
    trivial = field.is_constant(c)
    needs = (not trivial) and (("+" in s[1:]) or ("-" in s[1:]) or "/" in s)
    return s, needs


def render_poly(p: DiffPoly) -> str:
    if p.is_zero():
        return "0"
    ring = p.ring
    field = ring.field
    bits = []
    for m in sorted(p.terms, reverse=True):
        c = p.terms[m]
        mono = render_monomial(ring, m)
        cs, paren = _coeff_str(field, c)
        if mono == "1":
            term = "(%s)" % cs if paren else cs
        elif cs == "1":
            term = mono
        elif cs == "-1":
            term = "-" + mono
        else:
            term = "%s*%s" % ("(%s)" % cs if paren else cs, mono)
        bits.append(term)
    out = bits[0]
    for term in bits[1:]:
        if term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out
