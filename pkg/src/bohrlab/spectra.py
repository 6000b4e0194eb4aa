"""Analytic and arithmetic invariants of a Laurent polynomial.

Complex roots with residual certification, logarithmic Mahler measure
(entropy of the principal action) by the Jensen formula or torus
quadrature, p-adic root escape read off the Newton polygon, and a
certified expansivity check (the unitary variety is empty).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, PreconditionError
from .laurent import LaurentPoly, _positive_orthant

__all__ = [
    "RootData",
    "PadicEscape",
    "ExpansivityCertificate",
    "MahlerResult",
    "complex_roots",
    "mahler_measure",
    "padic_escape",
    "expansivity_check",
]


@dataclass(frozen=True)
class RootData:
    """Certified complex roots of a univariate polynomial.

    `rho` is the maximal root modulus; `residual_bound` is the worst
    normalized residual |f(lam)| / (||f||_1 * max(1,|lam|)^deg) over all
    roots after Newton refinement.
    """

    roots: tuple
    rho: float
    leading_coeff: int
    residual_bound: float

    def to_json(self):
        return {
            "roots": [[z.real, z.imag] for z in self.roots],
            "rho": self.rho,
            "leading_coeff": self.leading_coeff,
            "residual_bound": self.residual_bound,
        }


@dataclass(frozen=True)
class PadicEscape:
    """Witness that f has a root lam with |lam|_p = p^slope > 1.

    The slope is a positive segment of the Newton polygon, i.e. of the lower
    convex hull of the points (i, v_p(f_i)).
    """

    prime: int
    slope: Fraction
    witness_index: int
    hull: tuple  # vertices (i, v_p(f_i)) of the lower hull

    @property
    def escape_modulus(self):
        return float(self.prime) ** float(self.slope)

    def to_json(self):
        return {
            "prime": self.prime,
            "slope": [self.slope.numerator, self.slope.denominator],
            "escape_modulus": self.escape_modulus,
            "witness_index": self.witness_index,
            "hull": [list(pt) for pt in self.hull],
        }


@dataclass(frozen=True)
class ExpansivityCertificate:
    """Grid certificate that |f| > 0 on the whole torus.

    Any torus point is within Euclidean distance sqrt(d)/(2N) of a grid
    node and |grad f|_2 <= lipschitz everywhere, so margin > 0 forces the
    unitary variety to be empty.
    """

    grid_size: int
    grid_min: float
    lipschitz: float
    margin: float
    argmin: tuple

    def to_json(self):
        return {
            "grid_size": self.grid_size,
            "grid_min": self.grid_min,
            "lipschitz": self.lipschitz,
            "margin": self.margin,
            "argmin": list(self.argmin),
        }


@dataclass(frozen=True)
class MahlerResult:
    value: float
    method: str
    grid: int = 0
    refine_delta: float = 0.0
    min_abs_at_node: float = math.inf
    unreliable: bool = False
    residual_bound: float = 0.0

    def to_json(self):
        return {
            "value": self.value,
            "method": self.method,
            "grid": self.grid,
            "refine_delta": self.refine_delta,
            "min_abs_at_node": (None if math.isinf(self.min_abs_at_node)
                                else self.min_abs_at_node),
            "unreliable": self.unreliable,
            "residual_bound": self.residual_bound,
        }


# ---------------------------------------------------------------------------
# complex roots
# ---------------------------------------------------------------------------

def complex_roots(f):
    """All complex roots of a univariate f (after stripping the unit ±z^m),
    computed from companion-matrix eigenvalues and polished by Newton steps.
    """
    if f.dim != 1:
        raise DimensionMismatch("complex_roots requires dim 1")
    g, _ = _positive_orthant(f)
    _, cs = g.dense_coeffs()
    deg = len(cs) - 1
    if deg < 1:
        raise PreconditionError("degree 0 after unit normalization")

    c = np.array(cs, dtype=float)
    roots = np.roots(c[::-1])
    dc = np.arange(1, deg + 1) * c[1:]
    for _ in range(16):
        pv = np.polyval(c[::-1], roots)
        dv = np.polyval(dc[::-1], roots)
        step = np.where(dv != 0, pv / np.where(dv == 0, 1.0, dv), 0.0)
        new = roots - step
        if np.allclose(new, roots, rtol=0, atol=1e-15):
            roots = new
            break
        roots = new

    scale = g.l1_norm() * np.maximum(1.0, np.abs(roots)) ** deg
    residual = float(np.max(np.abs(np.polyval(c[::-1], roots)) / scale))
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    return RootData(
        roots=tuple(complex(z) for z in roots),
        rho=float(np.max(np.abs(roots))),
        leading_coeff=cs[-1],
        residual_bound=residual,
    )


# ---------------------------------------------------------------------------
# Mahler measure
# ---------------------------------------------------------------------------

def _grid_log_abs(f, N):
    """log|f| on the uniform endpoint grid (j1/N, ..., jd/N); also returns
    the minimum of |f| over the grid."""
    d = f.dim
    axes = [np.exp(2j * np.pi * np.arange(N) / N) for _ in range(d)]
    vals = np.zeros((N,) * d, dtype=complex)
    for e, c in f.terms.items():
        term = np.array(c, dtype=complex)
        for axis, k in enumerate(e):
            shape = [1] * d
            shape[axis] = N
            term = term * (axes[axis] ** k).reshape(shape)
        vals = vals + term
    absvals = np.abs(vals)
    return absvals, float(absvals.min())


def _quadrature_value(f, N):
    absvals, vmin = _grid_log_abs(f, N)
    if vmin < 1e-300:
        return -math.inf, vmin
    # pairwise summation in numpy keeps the reduction deterministic
    return float(np.mean(np.log(absvals))), vmin


def mahler_measure(f, method="jensen", grid=4096):
    """Logarithmic Mahler measure m(f) = ∫ log|f(e^{2πit})| dt.

    jensen (d=1 only): log|f_r| + Σ log max(1, |λ_i|) over the roots.
    quadrature: mean of log|f| over the uniform N^d torus grid, with the
    value at grid 2N reported as `refine_delta`; if |f| drops below 1e-12
    at a node the value is flagged unreliable (possible zero on the torus).
    """
    if f.is_zero():
        raise PreconditionError("Mahler measure of the zero polynomial")
    if method == "jensen":
        if f.dim != 1:
            raise PreconditionError("jensen requires dim 1")
        g, _ = _positive_orthant(f)
        _, cs = g.dense_coeffs()
        if len(cs) == 1:
            return MahlerResult(value=math.log(abs(cs[0])), method="jensen")
        data = complex_roots(f)
        value = math.log(abs(data.leading_coeff))
        for z in data.roots:
            value += math.log(max(1.0, abs(z)))
        return MahlerResult(value=value, method="jensen",
                            residual_bound=data.residual_bound)
    if method == "quadrature":
        N = int(grid)
        if N < 8:
            raise PreconditionError("quadrature requires grid N >= 8")
        v1, m1 = _quadrature_value(f, N)
        v2, m2 = _quadrature_value(f, 2 * N)
        vmin = min(m1, m2)
        unreliable = vmin < 1e-12
        delta = abs(v2 - v1) if math.isfinite(v1) and math.isfinite(v2) else math.inf
        return MahlerResult(value=v1, method="quadrature", grid=N,
                            refine_delta=delta, min_abs_at_node=vmin,
                            unreliable=unreliable)
    raise PreconditionError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# p-adic escape via the Newton polygon
# ---------------------------------------------------------------------------

def _vp(n, p):
    if n == 0:
        return math.inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _prime_factors(n):
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _lower_hull(points):
    """Lower convex hull of (x, y) points with x strictly increasing.
    Points with y = +inf (zero coefficients) are dropped."""
    pts = [(x, y) for x, y in points if y != math.inf]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop if hull[-1] lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(f, p):
    """Lower hull of {(i, v_p(f_i))} for a univariate f in the positive
    orthant; returns the list of hull vertices."""
    g, _ = _positive_orthant(f)
    _, cs = g.dense_coeffs()
    return _lower_hull([(i, _vp(c, p)) for i, c in enumerate(cs)])


def padic_escape(f):
    """Scan the primes dividing the leading coefficient f_r for a positive
    Newton-polygon slope; such a slope sigma witnesses a root with
    |lam|_p = p^sigma > 1.  Returns None when f_r = ±1 (no prime to scan).

    Primes dividing only the constant term are reachable by applying the
    same scan to involute(f); see certify_padic.
    """
    if f.dim != 1:
        raise DimensionMismatch("padic_escape requires dim 1")
    g, _ = _positive_orthant(f)
    if g.content() != 1:
        raise PreconditionError("coefficients have common content > 1; normalize first")
    _, cs = g.dense_coeffs()
    if len(cs) < 2:
        return None
    for p in _prime_factors(cs[-1]):
        hull = newton_polygon(g, p)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            slope = Fraction(y2 - y1, x2 - x1)
            if slope > 0:
                # a coefficient strictly below the leading valuation witnesses escape
                witness = next(i for i, c in enumerate(cs)
                               if _vp(c, p) < _vp(cs[-1], p))
                return PadicEscape(prime=p, slope=slope, witness_index=witness,
                                   hull=tuple(hull))
    return None


def hull_total_rise(f, p):
    """Sum of slope*length over all Newton polygon segments; equals
    v_p(f_r) - v_p(f_0) when the end coefficients are nonzero."""
    hull = newton_polygon(f, p)
    return sum(Fraction(y2 - y1, 1) for (x1, y1), (x2, y2) in zip(hull, hull[1:]))


# ---------------------------------------------------------------------------
# expansivity
# ---------------------------------------------------------------------------

def expansivity_check(f, grid=64):
    """Certify U(f) = ∅ by a grid minimum plus a Lipschitz bound.

    Uses the crude gradient bound L = 2π Σ ||n||_1 |f_n|; returns None when
    the margin at this resolution is not positive (caller may double N).
    """
    N = int(grid)
    if N < 16:
        raise PreconditionError("expansivity_check requires grid N >= 16")
    if f.is_zero():
        return None
    absvals, vmin = _grid_log_abs(f, N)
    d = f.dim
    lipschitz = 2.0 * math.pi * sum(sum(abs(k) for k in e) * abs(c)
                                    for e, c in f.terms.items())
    margin = vmin - lipschitz * math.sqrt(d) / (2.0 * N)
    flat = int(np.argmin(absvals))
    argmin = np.unravel_index(flat, absvals.shape)
    if margin <= 0:
        return None
    return ExpansivityCertificate(grid_size=N, grid_min=vmin,
                                  lipschitz=lipschitz, margin=margin,
                                  argmin=tuple(int(i) for i in argmin))
