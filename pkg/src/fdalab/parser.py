"""Text format for difference/differential systems.

Grammar (one declaration or statement per `;`-terminated line):

    ring difference;              # or: ring differential
    vars u, v;                    # dependent variables
    symbols s1, s2;               # action symbols (grid directions / x, y)
    params h1, h2;                # coefficient field parameters
    ranking orderly;              # orderly | lex | elim(v>u) | degrevlex(v>u)
    symbolorder s2, s1;           # optional comparison priority
    order TOP;                    # optional monomial ordering: TOP | POT | rankfirst
    steps h1, h2;                 # step parameter per symbol (for limits)
    simple declared;              # differential systems: trust condition 4
    eq (S(u,1,0) - u)/h1 - u^2;
    ineq u;

Expression atoms: `S(u,1,0)` is the shift sigma_1^1 sigma_2^0 applied to u
(negative offsets allowed; they are cleared by the right-shift normalization
on load), `D(u, x^2 y)` a derivative, bare names are variables or
parameters, and numeric literals are exact rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Optional

from .coeffs import ParameterField
from .orderings import MonomialOrdering, Ranking, ranking_for
from .poly import PARTIAL, SHIFT, DiffPoly, DiffRing, normalize_shifts
from .thomas import AnalysisSystem


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = "" if line is None else " at line %d, column %d" % (line, column)
        super().__init__(message + where)


@dataclass
class SystemDocument:
    ring: DiffRing
    ranking: Ranking
    ordering: Optional[MonomialOrdering]
    system: AnalysisSystem
    steps: tuple[str, ...] = ()
    shift_clearances: list[tuple[int, ...]] = dfield(default_factory=list)


_TOKEN = re.compile(r"""
    (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[()+\-*/^,])
""", re.VERBOSE)


class _Tokens:
    def __init__(self, text: str, line: int):
        self.items = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError("unexpected character %r" % text[pos],
                                 line, pos + 1)
            self.items.append((m.lastgroup, m.group(), pos + 1))
            pos = m.end()
        self.line = line
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, None)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of expression", self.line, 0)
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.next()
        if val != value:
            raise ParseError("expected %r, found %r" % (value, val),
                             self.line, col)

    def done(self):
        return self.i >= len(self.items)


class _ExprParser:
    """Precedence-climbing parser producing DiffPoly values (staging shifts
    allowed; division restricted to coefficient divisors)."""

    def __init__(self, toks: _Tokens, ring: DiffRing):
        self.t = toks
        self.ring = ring
        self.field = ring.field

    def parse(self) -> DiffPoly:
        p = self.expr()
        if not self.t.done():
            kind, val, col = self.t.peek()
            raise ParseError("trailing input %r" % val, self.t.line, col)
        return p

    def expr(self) -> DiffPoly:
        node = self.term()
        while True:
            kind, val, _ = self.t.peek()
            if val == "+":
                self.t.next()
                node = node + self.term()
            elif val == "-":
                self.t.next()
                node = node - self.term()
            else:
                return node

    def term(self) -> DiffPoly:
        node = self.power()
        while True:
            kind, val, col = self.t.peek()
            if val == "*":
                self.t.next()
                node = node * self.power()
            elif val == "/":
                self.t.next()
                div = self.power()
                if not div.is_constant():
                    raise ParseError("division by a non-coefficient "
                                     "expression", self.t.line, col)
                c = div.constant_coeff()
                if self.field.is_zero(c):
                    raise ParseError("division by zero", self.t.line, col)
                node = node.scale(self.field.one / c)
            else:
                return node

    def power(self) -> DiffPoly:
        base = self.unary()
        kind, val, col = self.t.peek()
        if val == "^":
            self.t.next()
            kind, val, col = self.t.next()
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a non-negative integer",
                                 self.t.line, col)
            return base ** int(val)
        return base

    def unary(self) -> DiffPoly:
        kind, val, col = self.t.peek()
        if val == "-":
            self.t.next()
            return -self.unary()
        if val == "+":
            self.t.next()
            return self.unary()
        return self.atom()

    def atom(self) -> DiffPoly:
        kind, val, col = self.t.next()
        if val == "(":
            node = self.expr()
            self.t.expect(")")
            return node
        if kind == "num":
            if "/" in val:
                a, b = val.split("/")
                return self.ring.const(Fraction(int(a), int(b)))
            return self.ring.const(Fraction(int(val)))
        if kind == "name":
            if val == "S":
                return self.shift_atom(col)
            if val == "D":
                return self.derivative_atom(col)
            if val in self.ring.variables:
                return self.ring.indet(val, (0,) * self.ring.nsyms)
            if val in self.field.params:
                return self.ring.const(self.field.gen(val))
            raise ParseError("undeclared symbol %r" % val, self.t.line, col)
        raise ParseError("unexpected token %r" % val, self.t.line, col)

    def shift_atom(self, col) -> DiffPoly:
        if self.ring.action != SHIFT:
            raise ParseError("shift atom in a differential ring",
                             self.t.line, col)
        self.t.expect("(")
        kind, var, vcol = self.t.next()
        if var not in self.ring.variables:
            raise ParseError("undeclared variable %r" % var, self.t.line, vcol)
        offsets = []
        for _ in range(self.ring.nsyms):
            self.t.expect(",")
            sign = 1
            kind, val, ocol = self.t.next()
            if val == "-":
                sign = -1
                kind, val, ocol = self.t.next()
            if kind != "num" or "/" in val:
                raise ParseError("shift offset must be an integer",
                                 self.t.line, ocol)
            offsets.append(sign * int(val))
        self.t.expect(")")
        return self.ring.indet(var, tuple(offsets))

    def derivative_atom(self, col) -> DiffPoly:
        if self.ring.action != PARTIAL:
            raise ParseError("derivative atom in a difference ring",
                             self.t.line, col)
        self.t.expect("(")
        kind, var, vcol = self.t.next()
        if var not in self.ring.variables:
            raise ParseError("undeclared variable %r" % var, self.t.line, vcol)
        exps = [0] * self.ring.nsyms
        kind, val, _ = self.t.peek()
        while val == ",":
            self.t.next()
            kind, sym, scol = self.t.next()
            if sym not in self.ring.symbols:
                raise ParseError("unknown symbol %r" % sym, self.t.line, scol)
            power = 1
            kind, val, _ = self.t.peek()
            if val == "^":
                self.t.next()
                kind, num, ncol = self.t.next()
                if kind != "num" or "/" in num:
                    raise ParseError("derivative order must be an integer",
                                     self.t.line, ncol)
                power = int(num)
            exps[self.ring.symbols.index(sym)] += power
            kind, val, _ = self.t.peek()
        self.t.expect(")")
        return self.ring.indet(var, tuple(exps))


_RANKING = re.compile(r"^(orderly|lex|elim|degrevlex)\s*(?:\(([^)]*)\))?$")


def parse_system(text: str) -> SystemDocument:
    decls = {"vars": None, "symbols": None, "params": None}
    action = None
    ranking_spec = ("orderly", None)
    symbol_order = None
    order_style = None
    steps = ()
    simple_declared = False
    equations_raw = []
    inequations_raw = []

    statements = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0]
        if not line.strip():
            continue
        for piece in line.split(";"):
            if piece.strip():
                statements.append((lineno, piece.strip()))

    for lineno, stmt in statements:
        head, _, rest = stmt.partition(" ")
        rest = rest.strip()
        if head == "ring":
            if rest == "difference":
                action = SHIFT
            elif rest == "differential":
                action = PARTIAL
            else:
                raise ParseError("ring must be difference or differential",
                                 lineno, 1)
        elif head in ("vars", "symbols", "params"):
            decls[head] = tuple(s.strip() for s in rest.split(",") if s.strip())
        elif head == "ranking":
            m = _RANKING.match(rest)
            if not m:
                raise ParseError("bad ranking spec %r" % rest, lineno, 1)
            scheme = m.group(1)
            var_order = None
            if m.group(2):
                var_order = tuple(s.strip() for s in m.group(2).split(">"))
            ranking_spec = (scheme, var_order)
        elif head == "symbolorder":
            symbol_order = tuple(s.strip() for s in rest.split(",") if s.strip())
        elif head == "order":
            if rest not in ("TOP", "POT", "rankfirst"):
                raise ParseError("order must be TOP, POT or rankfirst", lineno, 1)
            order_style = rest
        elif head == "steps":
            steps = tuple(s.strip() for s in rest.split(",") if s.strip())
        elif head == "simple":
            if rest != "declared":
                raise ParseError("expected 'simple declared'", lineno, 1)
            simple_declared = True
        elif head == "eq":
            equations_raw.append((lineno, rest))
        elif head == "ineq":
            inequations_raw.append((lineno, rest))
        else:
            raise ParseError("unknown declaration %r" % head, lineno, 1)

    if action is None:
        raise ParseError("missing ring declaration")
    for key in ("vars", "symbols"):
        if not decls[key]:
            raise ParseError("missing %s declaration" % key)
    params = decls["params"] or ()
    field = ParameterField(params)
    ring = DiffRing(action, decls["symbols"], decls["vars"], field)
    scheme, var_order = ranking_spec
    ranking = ranking_for(ring, scheme, symbol_order=symbol_order,
                          var_order=var_order)
    ordering = MonomialOrdering(order_style, ranking) if order_style else None
    if steps:
        if len(steps) != ring.nsyms:
            raise ParseError("steps must list one parameter per symbol")
        for s in steps:
            if s not in params:
                raise ParseError("step %r is not a declared parameter" % s)

    clearances = []
    equations = []
    for lineno, src in equations_raw:
        p = _ExprParser(_Tokens(src, lineno), ring).parse()
        if p.is_zero():
            raise ParseError("zero equation", lineno, 1)
        if action == SHIFT:
            p, theta = normalize_shifts(p)
            clearances.append(theta)
        else:
            clearances.append((0,) * ring.nsyms)
        equations.append(p)
    inequations = []
    for lineno, src in inequations_raw:
        g = _ExprParser(_Tokens(src, lineno), ring).parse()
        if g.is_zero():
            raise ParseError("zero inequation", lineno, 1)
        if action == SHIFT:
            g, _ = normalize_shifts(g)
        inequations.append(g)

    system = AnalysisSystem(ring, ranking, equations, inequations,
                            simple_declared=simple_declared)
    return SystemDocument(ring, ranking, ordering, system, steps, clearances)


# ---------------------------------------------------------------------------
# printing (canonical document form; parse . print . parse is the identity)
# ---------------------------------------------------------------------------


def print_poly_expr(p: DiffPoly) -> str:
    """Expression-form printer that the parser accepts back."""
    from .poly import SHIFT as _S
    ring = p.ring
    field = ring.field
    if p.is_zero():
        return "0"
    bits = []
    for m in sorted(p.terms, reverse=True):
        c = p.terms[m]
        factors = []
        for (var, exps), k in m:
            if ring.action == _S:
                atom = "S(%s,%s)" % (ring.variables[var],
                                     ",".join(str(e) for e in exps))
            else:
                parts = []
                for pos, e in enumerate(exps):
                    if e == 1:
                        parts.append(ring.symbols[pos])
                    elif e > 1:
                        parts.append("%s^%d" % (ring.symbols[pos], e))
                atom = ("D(%s,%s)" % (ring.variables[var], ",".join(parts))
                        if parts else ring.variables[var])
            factors.append(atom if k == 1 else "%s^%d" % (atom, k))
        num, den = field.numer_denom(c)
        cstr = _coeff_expr(field, c)
        if factors:
            if cstr == "1":
                bits.append("*".join(factors))
            elif cstr == "-1":
                bits.append("-" + "*".join(factors))
            else:
                bits.append(cstr + "*" + "*".join(factors))
        else:
            bits.append(cstr)
    out = bits[0]
    for b in bits[1:]:
        out += " - " + b[1:] if b.startswith("-") else " + " + b
    return out


def _coeff_expr(field, c) -> str:
    num, den = field.numer_denom(c)
    def poly_str(p):
        terms = []
        for mon, q in field.poly_terms(p):
            fs = []
            if q == -1 and any(mon):
                fs.append("-1")
            elif q != 1 or not any(mon):
                fs.append(str(q))
            for name, e in zip(field.params, mon):
                if e == 1:
                    fs.append(name)
                elif e > 1:
                    fs.append("%s^%d" % (name, e))
            s = "*".join(fs) if fs else "1"
            s = s.replace("-1*", "-")
            terms.append(s)
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out
    ns = poly_str(num)
    if field.is_constant(field.poly_to_coeff(den)) and str(den) == "1":
        return ns if len(ns.split()) == 1 else "(%s)" % ns
    ds = poly_str(den)
    ns_w = ns if len(ns.split()) == 1 else "(%s)" % ns
    ds_w = ds if len(ds.split()) == 1 else "(%s)" % ds
    return "%s/%s" % (ns_w, ds_w)


def print_system(doc_or_system, steps=()) -> str:
    """Canonical text form of an analysis system."""
    if isinstance(doc_or_system, SystemDocument):
        system = doc_or_system.system
        ordering = doc_or_system.ordering
        steps = doc_or_system.steps or steps
    else:
        system = doc_or_system
        ordering = None
    ring = system.ring
    lines = []
    lines.append("ring %s;" % ("difference" if ring.action == SHIFT
                               else "differential"))
    lines.append("vars %s;" % ", ".join(ring.variables))
    lines.append("symbols %s;" % ", ".join(ring.symbols))
    if ring.field.params:
        lines.append("params %s;" % ", ".join(ring.field.params))
    rk = system.ranking
    if rk is not None:
        var_order = ">".join(ring.variables[i] for i in rk.var_seq)
        spec = rk.scheme if rk.scheme in ("orderly", "lex") else \
            "%s(%s)" % (rk.scheme, var_order)
        lines.append("ranking %s;" % spec)
        lines.append("symbolorder %s;" % ", ".join(ring.symbols[i]
                                                   for i in rk.symbol_seq))
    if ordering is not None:
        lines.append("order %s;" % ordering.style)
    if steps:
        lines.append("steps %s;" % ", ".join(steps))
    if system.simple_declared:
        lines.append("simple declared;")
    for eq in system.equations:
        lines.append("eq %s;" % print_poly_expr(eq))
    for g in system.inequations:
        lines.append("ineq %s;" % print_poly_expr(g))
    return "\n".join(lines) + "\n"
