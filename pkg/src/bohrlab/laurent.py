"""Exact arithmetic in the integer Laurent polynomial ring R_d = Z[z1^±1, ..., zd^±1].

Polynomials are stored sparsely as {exponent tuple: nonzero int coefficient}.
All values are immutable after construction; every operation returns a new
object and is safe to call from concurrent workers.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DimensionMismatch, ParseError, PreconditionError

__all__ = [
    "LaurentPoly",
    "KroneckerForm",
    "parse",
    "divides",
    "kronecker_factor",
    "cyclotomic",
]


class LaurentPoly:
    """A sparse Laurent polynomial with integer coefficients.

    `dim` is the number of variables; exponent keys are int tuples of that
    length.  Zero coefficients are never stored, so two polynomials are equal
    iff their term dicts are equal.
    """

    __slots__ = ("_dim", "_terms", "_hash")

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp) if isinstance(exp, (tuple, list)) else (int(exp),)
            if len(exp) != dim:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {dim}")
            c = int(c)
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        self._dim = dim
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim=1):
        return cls(dim, {})

    @classmethod
    def constant(cls, c, dim=1):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exp, c=1, dim=None):
        exp = tuple(exp) if isinstance(exp, (tuple, list)) else (exp,)
        return cls(dim or len(exp), {exp: c})

    @classmethod
    def var(cls, index=0, dim=1):
        exp = [0] * dim
        exp[index] = 1
        return cls(dim, {tuple(exp): 1})

    # -- basic queries ------------------------------------------------

    @property
    def dim(self):
        return self._dim

    @property
    def terms(self):
        return dict(self._terms)

    def support(self):
        return set(self._terms)

    def is_zero(self):
        return not self._terms

    def is_monomial(self):
        return len(self._terms) == 1

    def is_unit(self):
        """Units of R_d are ±z^m."""
        return len(self._terms) == 1 and abs(next(iter(self._terms.values()))) == 1

    def l1_norm(self):
        return sum(abs(c) for c in self._terms.values())

    def linf_norm(self):
        return max((abs(c) for c in self._terms.values()), default=0)

    def content(self):
        """gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self._terms.values():
            g = gcd(g, abs(c))
        return g

    def exponent_range(self):
        """Per-axis (min, max) of the support; None for the zero polynomial."""
        if not self._terms:
            return None
        lo = [min(e[i] for e in self._terms) for i in range(self._dim)]
        hi = [max(e[i] for e in self._terms) for i in range(self._dim)]
        return tuple(lo), tuple(hi)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({self._dim}, {self.render()!r})"

    # -- ring operations ----------------------------------------------

    def _check_dim(self, other):
        if self._dim != other._dim:
            raise DimensionMismatch(f"dim {self._dim} vs {other._dim}")

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self._dim)
        self._check_dim(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(self._dim, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self._dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self._dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly(self._dim, {e: c * other for e, c in self._terms.items()})
        self._check_dim(other)
        out = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return LaurentPoly(self._dim, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = LaurentPoly.constant(1, self._dim)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, exp):
        """Multiply by the monomial z^exp."""
        exp = tuple(exp) if isinstance(exp, (tuple, list)) else (exp,)
        return LaurentPoly(self._dim, {tuple(a + b for a, b in zip(e, exp)): c
                                       for e, c in self._terms.items()})

    def involute(self):
        """Coefficient reflection n -> -n (the * involution of the group ring)."""
        return LaurentPoly(self._dim, {tuple(-x for x in e): c for e, c in self._terms.items()})

    def restrict(self, exponents):
        """Keep only the terms whose exponent lies in the given set."""
        keep = {tuple(e) for e in exponents}
        return LaurentPoly(self._dim, {e: c for e, c in self._terms.items() if e in keep})

    def evaluate(self, point):
        """Evaluate at a point of (C*)^d given as a sequence of complex numbers."""
        if len(point) != self._dim:
            raise DimensionMismatch("point length != dim")
        total = 0
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                v *= x ** k
            total += v
        return total

    # -- d=1 dense view -----------------------------------------------

    def dense_coeffs(self):
        """For d=1: (lowest exponent, [c_0, ..., c_r]) with c_0, c_r nonzero."""
        if self._dim != 1:
            raise DimensionMismatch("dense_coeffs requires dim 1")
        if not self._terms:
            return 0, []
        lo = min(e[0] for e in self._terms)
        hi = max(e[0] for e in self._terms)
        cs = [self._terms.get((k,), 0) for k in range(lo, hi + 1)]
        return lo, cs

    # -- text and JSON forms --------------------------------------------

    def render(self):
        """Canonical text form, round-trips through parse()."""
        if not self._terms:
            return "0"
        items = sorted(self._terms.items())
        parts = []
        for e, c in items:
            factors = []
            for i, k in enumerate(e):
                if k == 0:
                    continue
                name = "z" if self._dim == 1 else f"z{i + 1}"
                factors.append(name if k == 1 else f"{name}^{k}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self):
        return {
            "dim": self._dim,
            "terms": [[list(e), c] for e, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["dim"]), {tuple(e): c for e, c in obj["terms"]})

    def divides(self, v):
        return divides(self, v)


@dataclass(frozen=True)
class KroneckerForm:
    """Factorization ± z^{m0} * prod_j Phi_{n_j}(z^{m_j}) of a zero-entropy
    univariate polynomial (Phi_n the n-th cyclotomic polynomial)."""

    sign: int
    monomial_shift: int
    factors: tuple  # of (cyclotomic index n, dilation m)

    def reconstruct(self):
        out = LaurentPoly.monomial((self.monomial_shift,), self.sign)
        for n, m in self.factors:
            out = out * dilate(cyclotomic(n), m)
        return out

    def to_json(self):
        return {
            "sign": self.sign,
            "monomial_shift": self.monomial_shift,
            "factors": [list(f) for f in self.factors],
        }


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<sign>[+-])|(?P<int>\d+)|(?P<var>z\d*)|(?P<pow>\^)|(?P<mul>\*))"
)


def parse(text, dim=None):
    """Parse a polynomial expression into a LaurentPoly.

    Grammar: terms `c`, `c*z^k` (one variable) or `c*z1^k1*...*zd^kd`,
    joined by + or -; the coefficient and `*` may be omitted; exponents may
    be negative; whitespace is ignored.  Plain `z` means one variable and
    cannot be mixed with indexed variables `z1, z2, ...`.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", position=pos)
        tokens.append((m.lastgroup, m.group(m.lastgroup), pos))
        pos = m.end()

    if not tokens:
        raise ParseError("empty polynomial expression", position=0)

    # split into terms on top-level signs; a sign right after '^' stays
    # inside the term (it belongs to the exponent)
    terms = []  # list of (sign, [tokens], position)
    cur_sign, cur = 1, []
    for kind, val, p in tokens:
        if kind != "sign":
            cur.append((kind, val, p))
        elif cur and cur[-1][0] == "pow":
            cur.append((kind, val, p))
        elif not cur:
            if val == "-":
                cur_sign = -cur_sign
        else:
            terms.append((cur_sign, cur, p))
            cur_sign, cur = (1 if val == "+" else -1), []
    terms.append((cur_sign, cur, pos))

    plain_z = False
    indexed_z = False
    raw_terms = []
    for sign, toks, term_pos in terms:
        if not toks:
            raise ParseError("empty term", position=term_pos)
        coeff = 1
        powers = {}
        i = 0
        if toks[0][0] == "int":
            coeff = int(toks[0][1])
            i = 1
            if i < len(toks) and toks[i][0] == "mul":
                i += 1
        while i < len(toks):
            kind, val, p = toks[i]
            if kind != "var":
                raise ParseError(f"expected a variable, got {val!r}", position=p)
            if val == "z":
                plain_z = True
                index = 0
            else:
                indexed_z = True
                index = int(val[1:]) - 1
                if index < 0:
                    raise ParseError("variable indices start at z1", position=p)
            i += 1
            k = 1
            if i < len(toks) and toks[i][0] == "pow":
                i += 1
                esign = 1
                if i < len(toks) and toks[i][0] == "sign":
                    esign = 1 if toks[i][1] == "+" else -1
                    i += 1
                if i >= len(toks) or toks[i][0] != "int":
                    raise ParseError("expected an integer exponent",
                                     position=toks[i - 1][2])
                k = esign * int(toks[i][1])
                i += 1
            if i < len(toks) and toks[i][0] == "mul":
                i += 1
            powers[index] = powers.get(index, 0) + k
        raw_terms.append((sign * coeff, powers))

    if plain_z and indexed_z:
        raise ParseError("cannot mix plain variable z with indexed z1, z2, ...", position=0)

    inferred = 1
    for _, powers in raw_terms:
        for idx in powers:
            inferred = max(inferred, idx + 1)
    d = dim or inferred
    if inferred > d:
        raise DimensionMismatch(f"variable z{inferred} exceeds declared dim {d}")

    out = {}
    for c, powers in raw_terms:
        e = [0] * d
        for idx, k in powers.items():
            e[idx] = k
        e = tuple(e)
        out[e] = out.get(e, 0) + c
    return LaurentPoly(d, out)


# ---------------------------------------------------------------------------
# divisibility
# ---------------------------------------------------------------------------

def _positive_orthant(f):
    """Strip the unit ±z^m: returns (g, shift) with g = f * z^{-shift}, g
    supported in the positive orthant with a nonzero coefficient at some
    axis minimum in every variable."""
    rng = f.exponent_range()
    lo = rng[0]
    return f.shift(tuple(-x for x in lo)), lo


def _divide_univariate(num, den):
    """Exact division of dense rational coefficient lists (low->high).
    Returns the quotient list or None if the division leaves a remainder."""
    num = [Fraction(c) for c in num]
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return None
    lead = Fraction(den[-1])
    q = [Fraction(0)] * (len(num) - dn)
    for i in range(len(num) - 1 - dn, -1, -1):
        c = num[i + dn] / lead
        q[i] = c
        if c:
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
    if any(num[:dn]):
        return None
    return q


def divides(f, v):
    """Return q with v = q*f in R_d, or None if f does not divide v.

    Divisibility is taken up to units: both operands are normalized to the
    positive orthant first, and the quotient carries the compensating
    monomial shift.  For d >= 2 the division recurses through sympy's
    generalized polynomial division over Q; the quotient is accepted only
    if its coefficients are integers.
    """
    if f.is_zero():
        raise PreconditionError("division by the zero polynomial")
    if f.dim != v.dim:
        raise DimensionMismatch(f"dim {f.dim} vs {v.dim}")
    if v.is_zero():
        return LaurentPoly.zero(f.dim)

    f0, flo = _positive_orthant(f)
    v0, vlo = _positive_orthant(v)
    shift = tuple(a - b for a, b in zip(vlo, flo))

    if f.dim == 1:
        _, den = f0.dense_coeffs()
        _, num = v0.dense_coeffs()
        q = _divide_univariate(num, den)
        if q is None or any(c.denominator != 1 for c in q):
            return None
        qpoly = LaurentPoly(1, {(i,): int(c) for i, c in enumerate(q)})
        return qpoly.shift(shift)

    import sympy

    gens = sympy.symbols(f"z1:{f.dim + 1}")
    fs = sympy.Poly(_to_sympy_expr(f0, gens), *gens, domain="QQ")
    vs = sympy.Poly(_to_sympy_expr(v0, gens), *gens, domain="QQ")
    q, r = sympy.div(vs, fs, *gens, domain="QQ")
    if not r.is_zero:
        return None
    qd = {}
    for monom, coeff in sympy.Poly(q, *gens, domain="QQ").terms():
        frac = Fraction(coeff.p, coeff.q)
        if frac.denominator != 1:
            return None
        qd[tuple(monom)] = int(frac)
    return LaurentPoly(f.dim, qd).shift(shift)


def _to_sympy_expr(p, gens):
    import sympy

    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Integer(c)
        for g, k in zip(gens, e):
            term *= g ** int(k)
        expr += term
    return expr


# ---------------------------------------------------------------------------
# cyclotomic detection (zero entropy <=> Kronecker form)
# ---------------------------------------------------------------------------

_cyclotomic_cache = {}


def cyclotomic(n):
    """The n-th cyclotomic polynomial Phi_n as a LaurentPoly (d=1)."""
    if n not in _cyclotomic_cache:
        import sympy

        x = sympy.Symbol("x")
        coeffs = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
        _cyclotomic_cache[n] = LaurentPoly(1, {(i,): int(c) for i, c in enumerate(coeffs)})
    return _cyclotomic_cache[n]


def dilate(p, m):
    """Substitute z -> z^m (d=1)."""
    if p.dim != 1:
        raise DimensionMismatch("dilate requires dim 1")
    return LaurentPoly(1, {(e[0] * m,): c for e, c in p.terms.items()})


def embed(p, dim, axis=0):
    """View a univariate polynomial as an element of R_dim depending only on
    the variable at `axis`."""
    if p.dim != 1:
        raise DimensionMismatch("embed requires dim 1 input")
    if not 0 <= axis < dim:
        raise ValueError("axis out of range")
    out = {}
    for e, c in p.terms.items():
        key = [0] * dim
        key[axis] = e[0]
        out[tuple(key)] = c
    return LaurentPoly(dim, out)


def univariate_part(f, axis=0):
    """If f depends only on the variable at `axis`, return it as a d=1
    polynomial; otherwise None."""
    out = {}
    for e, c in f.terms.items():
        if any(k != 0 for i, k in enumerate(e) if i != axis):
            return None
        out[(e[axis],)] = c
    return LaurentPoly(1, out)


def _euler_phi(n):
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            out *= p - 1
            m //= p
            while m % p == 0:
                out *= p
                m //= p
        p += 1
    if m > 1:
        out *= m - 1
    return out


def kronecker_factor(f):
    """Factor a univariate f with zero Mahler measure as
    ± z^{m0} * prod Phi_{n_j}(z^{m_j}); returns None when no such form exists.

    Detection: content 1, leading and trailing coefficients ±1, all complex
    roots of modulus 1 within 1e-8; candidate factors Phi_n(z^m) are then
    peeled off by exact trial division, which is the final arbiter.
    """
    if f.dim != 1:
        raise DimensionMismatch("kronecker_factor requires dim 1")
    if f.is_zero():
        raise PreconditionError("kronecker_factor of the zero polynomial")

    g, (shift,) = _positive_orthant(f)
    _, cs = g.dense_coeffs()
    if g.content() != 1 or abs(cs[0]) != 1 or abs(cs[-1]) != 1:
        return None
    sign = 1 if cs[-1] > 0 else -1
    if sign < 0:
        g = -g
        _, cs = g.dense_coeffs()

    deg = len(cs) - 1
    if deg > 0:
        import numpy as np

        roots = np.roots(np.array(cs[::-1], dtype=float))
        if np.any(np.abs(np.abs(roots) - 1.0) >= 1e-8):
            return None

    factors = []
    remaining = g
    progress = True
    while progress:
        _, rcs = remaining.dense_coeffs()
        rdeg = len(rcs) - 1
        if rdeg == 0:
            break
        progress = False
        # deg Phi_n(z^m) = phi(n) * m must fit in the remaining degree
        n = 1
        while not progress:
            phi_n = _euler_phi(n)
            if phi_n > rdeg:
                # phi(n) >= sqrt(n/2), so indices with phi(n) <= rdeg are bounded
                if n > 2 * rdeg * rdeg + 2:
                    break
                n += 1
                continue
            for m in range(1, rdeg // phi_n + 1):
                cand = dilate(cyclotomic(n), m)
                q = divides(cand, remaining)
                if q is not None:
                    factors.append((n, m))
                    remaining = q
                    progress = True
                    break
            else:
                n += 1
                continue
    _, rcs = remaining.dense_coeffs()
    if len(rcs) != 1 or rcs[0] != 1:
        return None
    return KroneckerForm(sign=sign, monomial_shift=shift, factors=tuple(sorted(factors)))
