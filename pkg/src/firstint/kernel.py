"""Exact arithmetic kernel.

Bivariate polynomials are sympy sparse ``PolyElement`` objects of the ring
``QQxy = QQ[x, y]`` with graded-lex order (x > y); rational functions are
``FracElement`` objects of its fraction field.  Everything here is exact.

The text grammar accepted by :func:`parse_poly` is::

    poly   := ['-'] term (('+'|'-') term)*
    term   := coef ('*' factor)* | factor ('*' factor)*
    factor := ('x'|'y') ('^' uint)? | '(' poly ')' ('^' uint)?
    coef   := int ('/' uint)?

and :func:`parse_ratfunc` accepts ``poly`` or ``poly '/' factor``.
"""

from __future__ import annotations

import re
from functools import reduce

from sympy import QQ, ZZ, CRootOf, Symbol
from sympy.polys.fields import FracElement
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

QQxy, x, y = ring("x,y", QQ, grlex)
QQxy_field = QQxy.to_field()
X_FIELD, Y_FIELD = QQxy_field.gens

# univariate ring used for residue / indicial polynomials
QQl, lam = ring("l", QQ)


class KernelError(ValueError):
    """Raised on violated preconditions of kernel operations."""


# ---------------------------------------------------------------------------
# conversions and normalization
# ---------------------------------------------------------------------------

def as_frac(f, field=None):
    """Coerce a polynomial, scalar or fraction into the fraction field."""
    field = field or QQxy_field
    if isinstance(f, FracElement):
        if f.field == field:
            return f
        return field(f.numer.set_ring(field.ring)) / field(f.denom.set_ring(field.ring))
    if isinstance(f, PolyElement):
        if f.ring != field.ring:
            f = f.set_ring(field.ring)
        return field(f)
    return field(field.domain.convert(f))


def as_poly(f, ring_=None):
    """Coerce to a polynomial; raise if ``f`` has a nonconstant denominator."""
    ring_ = ring_ or QQxy
    if isinstance(f, PolyElement):
        return f if f.ring == ring_ else f.set_ring(ring_)
    if isinstance(f, FracElement):
        n, d = f.numer, f.denom
        if not d.is_ground:
            raise KernelError("not a polynomial")
        p = n.quo_ground(d.LC)
        return p if p.ring == ring_ else p.set_ring(ring_)
    return ring_(ring_.domain.convert(f))


def primitive_normal(p):
    """Return ``(c, q)`` with ``p = c*q``, ``q`` integer-primitive with positive lc."""
    if p.is_zero:
        return p.ring.domain.one, p
    q = p.clear_denoms()[1]
    cont = q.content()
    q = q.quo_ground(cont)
    if q.LC < 0:
        q = -q
    c = p.LC / q.LC
    return c, q


def num_den(f):
    """Normalized numerator/denominator of a rational function.

    The denominator has integer coefficients with content 1 and positive
    graded-lex leading coefficient; the numerator carries the scalar.
    """
    f = as_frac(f)
    n, d = f.numer, f.denom
    c, dn = primitive_normal(d)
    return n.quo_ground(c), dn


def numer(f):
    return num_den(f)[0]


def denom(f):
    return num_den(f)[1]


def is_constant(f):
    """True iff ``f`` has no dependence on any generator."""
    if isinstance(f, FracElement):
        return f.numer.is_ground and f.denom.is_ground
    if isinstance(f, PolyElement):
        return f.is_ground
    return True


def constant_value(f):
    f = as_frac(f)
    if not is_constant(f):
        raise KernelError("not constant")
    return f.field.domain.convert(f.numer.LC if f.numer else 0) / f.denom.LC


def _gen_index(p, var):
    if isinstance(var, int):
        return var
    if isinstance(var, str):
        return [str(s) for s in p.ring.symbols].index(var)
    return p.ring.gens.index(var.set_ring(p.ring) if var.ring != p.ring else var)


def diff(f, var):
    """Partial derivative of a polynomial or rational function."""
    if isinstance(f, PolyElement):
        i = _gen_index(f, var)
        return f.diff(f.ring.gens[i])
    f = as_frac(f, f.field if isinstance(f, FracElement) else None)
    i = _gen_index(f.numer, var)
    n, d = f.numer, f.denom
    g = n.ring.gens[i]
    return f.field(n.diff(g) * d - n * d.diff(g)) / f.field(d ** 2)


def dx(f):
    return diff(f, 0)


def dy(f):
    return diff(f, 1)


def degree(p):
    """Total degree of a polynomial (``-1`` for zero)."""
    if isinstance(p, FracElement):
        raise KernelError("degree of a rational function is ambiguous")
    if p.is_zero:
        return -1
    return max(sum(m) for m in p.itermonoms())


def degree_in(p, var):
    if p.is_zero:
        return -1
    return p.degree(p.ring.gens[_gen_index(p, var)])


def coefficients(f):
    """All coefficients of the normalized numerator and denominator."""
    if isinstance(f, PolyElement):
        return list(f.itercoeffs())
    n, d = num_den(f)
    return list(n.itercoeffs()) + list(d.itercoeffs())


def has_rational_coefficients(f):
    dom = f.ring.domain if isinstance(f, PolyElement) else f.field.domain
    if dom not in (QQ, ZZ):
        return False
    return all(QQ.of_type(QQ.convert(c)) for c in coefficients(f))


# ---------------------------------------------------------------------------
# classical operations
# ---------------------------------------------------------------------------

def gcd_bivariate(p, q):
    """Primitive gcd with positive leading coefficient (``gcd(0, 0) = 0``)."""
    if p.is_zero and q.is_zero:
        return p
    g = p.gcd(q)
    if g.ring.domain == QQ:
        return primitive_normal(g)[1]
    return g.monic()


def lcm_poly(p, q):
    g = gcd_bivariate(p, q)
    return primitive_normal((p * q).exquo(g))[1] if g.ring.domain == QQ else (p * q).exquo(g)


def _move_first(p, i):
    """Reorder generators of ``p`` so that generator ``i`` comes first."""
    syms = list(p.ring.symbols)
    order = [i] + [j for j in range(len(syms)) if j != i]
    r2 = p.ring.clone(symbols=[syms[j] for j in order])
    d = {tuple(m[j] for j in order): c for m, c in p.iterterms()}
    return r2.from_dict(d) if d else r2.zero, order


def _move_back(p, order, target):
    inv = [0] * len(order)
    for pos, j in enumerate(order):
        inv[j] = pos
    d = {tuple(m[inv[j]] for j in range(len(order))): c for m, c in p.iterterms()}
    return target.from_dict(d) if d else target.zero


def resultant(p, q, var):
    """Sylvester resultant eliminating ``var`` (generator, index or name).

    The result lives in the ring of ``p`` (with no dependence on ``var``).
    """
    i = _gen_index(p, var)
    if p.degree(p.ring.gens[i]) <= 0 and q.degree(q.ring.gens[i]) <= 0:
        raise KernelError("no elimination variable")
    if p.is_zero or q.is_zero:
        return p.ring.zero
    ring0 = p.ring
    if ring0.ngens == 1:
        return ring0(p.resultant(q))
    pp, order = _move_first(p, i)
    qq, _ = _move_first(q, i)
    r = pp.resultant(qq)
    if not isinstance(r, PolyElement):
        return ring0(r)
    if r.ring.ngens == pp.ring.ngens:
        return _move_back(r, order, ring0)
    # sympy drops the eliminated generator
    d = {}
    for m, c in r.iterterms():
        full = [0] * ring0.ngens
        for pos, j in enumerate(order[1:]):
            full[j] = m[pos]
        d[tuple(full)] = c
    return ring0.from_dict(d) if d else ring0.zero


def coeffs_in(p, var):
    """Coefficients of ``p`` as a polynomial in ``var``: dict degree -> poly."""
    i = _gen_index(p, var)
    out = {}
    for m, c in p.iterterms():
        e = m[i]
        mm = list(m)
        mm[i] = 0
        out.setdefault(e, {})[tuple(mm)] = c
    return {e: p.ring.from_dict(d) for e, d in out.items()}


def squarefree_part(p):
    """Squarefree part, normalized primitive."""
    if p.is_zero:
        raise KernelError("squarefree part of zero")
    s = p.sqf_part()
    if s.ring.domain == QQ:
        return primitive_normal(s)[1]
    return s.monic()


def _glex_key(p):
    lm = max(p.itermonoms(), key=lambda m: (sum(m), m))
    return (sum(lm), lm)


def _coeff_key(p):
    terms = sorted(p.iterterms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    try:
        return [(m, QQ.convert(c)) for m, c in terms]
    except Exception:
        return [(m, str(c)) for m, c in terms]


def factor(p):
    """Irreducible factorization ``[(factor, multiplicity), ...]``.

    Factors are primitive (monic over algebraic extensions) and sorted by
    graded-lex leading monomial; the scalar is dropped.
    """
    if p.is_zero:
        raise KernelError("factor of zero")
    _, facs = p.factor_list()
    out = []
    for f, m in facs:
        if f.ring.domain == QQ:
            f = primitive_normal(f)[1]
        else:
            f = f.monic()
        out.append((f, m))
    out.sort(key=lambda t: (_glex_key(t[0]), _coeff_key(t[0])))
    return out


def scalar_of_factorization(p, facs):
    prod = reduce(lambda a, b: a * b, (f ** m for f, m in facs), p.ring.one)
    return p.LC / prod.LC if not prod.is_zero else p.ring.domain.zero


def rational_roots(p):
    """Rational roots with multiplicities and whether every root is rational.

    ``p`` is a univariate polynomial (any single-generator ring, or a
    multivariate ring polynomial depending on exactly one generator).
    Returns ``(roots, all_rational)`` where ``roots`` is a list of
    ``(root, multiplicity)`` sorted increasingly.
    """
    if p.is_zero:
        raise KernelError("rational roots of zero")
    used = [i for i in range(p.ring.ngens) if p.degree(p.ring.gens[i]) > 0]
    if len(used) > 1:
        raise KernelError("not univariate")
    if not used:
        return [], True
    i = used[0]
    roots = []
    all_rat = True
    for f, m in factor(p):
        if f.degree(f.ring.gens[i]) == 1:
            c = coeffs_in(f, i)
            a = c[1].LC
            b = c[0].LC if 0 in c else f.ring.domain.zero
            roots.append((QQ.convert(-b / a), m))
        else:
            all_rat = False
    roots.sort()
    return roots, all_rat


def to_univariate(p, i, ring_=None):
    """Map a polynomial depending only on generator ``i`` to ``QQl``."""
    ring_ = ring_ or QQl
    d = {}
    for m, c in p.iterterms():
        if any(e for j, e in enumerate(m) if j != i):
            raise KernelError("not univariate")
        d[(m[i],)] = c
    return ring_.from_dict(d) if d else ring_.zero


# ---------------------------------------------------------------------------
# algebraic extensions
# ---------------------------------------------------------------------------

def algebraic_field(minpoly, root_index=0):
    """Simple extension ``Q[alpha]`` for a root of an irreducible univariate poly.

    ``minpoly`` is a univariate ``PolyElement`` over QQ.  Irreducibility is
    checked.  The generator is available as ``field.to_alg_gen``.
    """
    if minpoly.ring.ngens != 1:
        minpoly = to_univariate(minpoly, [i for i in range(minpoly.ring.ngens)
                                          if minpoly.degree(minpoly.ring.gens[i]) > 0][0])
    if minpoly.degree() < 1:
        raise KernelError("minimal polynomial must be nonconstant")
    if not minpoly.is_irreducible:
        raise KernelError("minimal polynomial is reducible")
    t = Symbol("t")
    expr = minpoly.as_expr(t)
    K = QQ.algebraic_field(CRootOf(expr, root_index))
    return K


def alg_generator(K):
    """The primitive element ``alpha`` of an algebraic field."""
    return K([K.domain.one, K.domain.zero])


def alg_coordinates(a, K):
    """Coordinates of ``a`` in the power basis ``1, alpha, alpha^2, ...``."""
    rep = list(reversed(a.to_list()))
    n = K.ext.minpoly.degree()
    return rep + [K.domain.zero] * (n - len(rep))


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xy])|(\^)|(\*)|(\+)|(-)|(/)|(\()|(\)))")


class ParseError(ValueError):
    pass


def _tokenize(s):
    pos, toks = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {s[pos:pos + 10]!r}")
        kinds = ("int", "var", "^", "*", "+", "-", "/", "(", ")")
        for k, g in zip(kinds, m.groups()):
            if g is not None:
                toks.append((k, g))
                break
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return toks


class _Parser:
    def __init__(self, text, ring_):
        self.toks = _tokenize(text)
        self.i = 0
        self.R = ring_
        self.vars = {str(s): g for s, g in zip(ring_.symbols, ring_.gens)}

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self, kind):
        t = self.peek()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}")
        self.i += 1
        return t[1]

    def poly(self):
        sign = 1
        if self.peek()[0] == "-":
            self.i += 1
            sign = -1
        acc = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take(self.peek()[0])
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        if self.peek()[0] == "int":
            num = int(self.take("int"))
            c = QQ(num)
            if self.peek()[0] == "/" and self.peek(1)[0] == "int":
                self.i += 1
                den = int(self.take("int"))
                if den == 0:
                    raise ParseError("zero denominator")
                c = QQ(num, den)
            acc = self.R(c)
        else:
            acc = self.factor()
        while self.peek()[0] == "*":
            self.i += 1
            acc = acc * self.factor()
        return acc

    def uint_power(self):
        if self.peek()[0] == "^":
            self.i += 1
            return int(self.take("int"))
        return 1

    def factor(self):
        k, v = self.peek()
        if k == "var":
            self.i += 1
            if v not in self.vars:
                raise ParseError(f"unknown variable {v!r}")
            return self.vars[v] ** self.uint_power()
        if k == "(":
            self.i += 1
            p = self.poly()
            self.take(")")
            return p ** self.uint_power()
        raise ParseError(f"unexpected token {v!r}")

    def done(self):
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.peek()[1]!r}")


def parse_poly(text, ring_=None):
    """Parse a polynomial string under the strict grammar."""
    p = _Parser(text, ring_ or QQxy)
    out = p.poly()
    p.done()
    return out


def parse_ratfunc(text, field=None):
    """Parse ``poly`` or ``poly/factor`` into a rational function."""
    field = field or QQxy_field
    p = _Parser(text, field.ring)
    n = p.poly()
    d = field.ring.one
    if p.peek()[0] == "/":
        p.i += 1
        d = p.factor()
    p.done()
    if d.is_zero:
        raise ParseError("zero denominator")
    return field(n) / field(d)


def _fmt_coeff(c):
    c = QQ.convert(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p):
    """Render a QQ polynomial in graded-lex descending order."""
    if p.is_zero:
        return "0"
    names = [str(s) for s in p.ring.symbols]
    terms = sorted(p.iterterms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    out = []
    for m, c in terms:
        c = QQ.convert(c)
        neg = c < 0
        a = -c if neg else c
        mon = "*".join(
            (n if e == 1 else f"{n}^{e}") for n, e in zip(names, m) if e)
        if mon and a == 1:
            body = mon
        elif mon:
            body = f"{_fmt_coeff(a)}*{mon}"
        else:
            body = _fmt_coeff(a)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def format_ratfunc(f):
    n, d = num_den(f)
    if d.is_one:
        return format_poly(n)
    return f"({format_poly(n)})/({format_poly(d)})"


def poly_from_dict(d, ring_=None):
    ring_ = ring_ or QQxy
    return ring_.from_dict({tuple(k): ring_.domain.convert(v) for k, v in d.items() if v})


def monomials_upto(deg, nvars=2):
    """Monomials of total degree <= deg in ascending graded-lex order (x > y)."""
    if deg < 0:
        return []
    if nvars != 2:
        raise KernelError("only bivariate monomial lists are supported")
    mons = []
    for t in range(deg + 1):
        # ascending graded-lex within a degree: y^t < x*y^(t-1) < ... < x^t
        for i in range(t + 1):
            mons.append((i, t - i))
    return mons
