"""m-goodness certificates and their brute-force falsifier.

A polynomial f is m-good when (C1) no nonzero combination
Σ ε_j z^{m j} with ε_j in {-2,...,2} is divisible by f, and (C2) for every
shift k with 0 < k < m (componentwise residue for d >= 2) no nonzero
Σ ε_j z^{m j} - Σ δ_j z^{m j + k} with ε, δ in {-1,0,1} is divisible by f.
m-goodness makes the dilated character family dissociate and the shifted
families orthogonal, which is what drives the weighted-average experiments.

Three constructive certification routes are implemented (archimedean root
escape, p-adic Newton-polygon escape, homoclinic gap radius) plus the lift
of a univariate certificate to d variables.  `falsify` is the independent
oracle: an exact, exhaustively enumerated search for counterexamples.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import CollisionError, DimensionMismatch, PreconditionError
from .laurent import LaurentPoly, _positive_orthant, divides, embed, univariate_part
from .spectra import complex_roots, padic_escape

__all__ = [
    "MGoodCertificate",
    "Counterexample",
    "certify_archimedean",
    "certify_padic",
    "certify_gap",
    "lift_univariate",
    "falsify",
    "confirm_certificate",
    "verify_certificate",
    "certificate_to_json",
    "certificate_from_json",
]

# enumeration alphabets, in scan order: sparse and small patterns first
C1_DIGITS = (0, -1, 1, 2, -2)
C2_DIGITS = (0, -1, 1)

DEGREE_CAP = 512          # cap on D*m for the falsifier
PATTERN_CAP = 400_000_000  # cap on the enumerated pattern count


@dataclass(frozen=True)
class MGoodCertificate:
    """Proof object for a certified pair (f, m).

    `params` records the route-specific inequality data; re-evaluating the
    route inequalities from `params` alone must succeed (see
    verify_certificate).  `checked_horizon` is the largest D up to which
    the brute-force falsifier has confirmed both conditions.
    """

    f: LaurentPoly
    m: int
    route: str  # archimedean | padic | gap | univariate_lift
    params: dict
    checked_horizon: int = 0


@dataclass(frozen=True)
class Counterexample:
    condition: str  # "C1" | "C2"
    witness: LaurentPoly
    quotient: LaurentPoly
    epsilon: tuple
    delta: tuple = ()
    k: object = None


# ---------------------------------------------------------------------------
# exact reduction rows: z^e mod f as integer vectors
# ---------------------------------------------------------------------------

def _reduction_rows(f, exponents):
    """For univariate f (positive orthant, f_0 != 0, degree r >= 1) return
    {e: integer row of length r} and a common scale L so that
    z^e mod f = (row_e / L) · (1, z, ..., z^{r-1}).

    A combination Σ c_e z^e is divisible by f over Q iff Σ c_e row_e = 0.
    """
    _, cs = f.dense_coeffs()
    r = len(cs) - 1
    lead = Fraction(cs[-1])
    # z^r = -(c_0 + ... + c_{r-1} z^{r-1}) / c_r
    top = [-Fraction(c) / lead for c in cs[:-1]]
    need = sorted(set(exponents))
    rows = {}
    cur = [Fraction(1)] + [Fraction(0)] * (r - 1)
    e = 0
    idx = 0
    while idx < len(need):
        if e == need[idx]:
            rows[e] = list(cur)
            idx += 1
        # multiply by z with reduction
        carry = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if carry:
            cur = [a + carry * t for a, t in zip(cur, top)]
        e += 1
    denom = 1
    for row in rows.values():
        for c in row:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
    return {e: tuple(int(c * denom) for c in row) for e, row in rows.items()}, denom


def _vec_add(acc, row, coeff):
    return tuple(a + coeff * b for a, b in zip(acc, row))


def _pattern_vectors(rows, digits):
    """All (pattern, vector) pairs over digits^len(rows), in scan order:
    lexicographic over the pattern tuple with the digit alphabet order."""
    n = len(rows)
    r = len(rows[0]) if n else 0
    zero = (0,) * r
    out = []
    for pat in itertools.product(digits, repeat=n):
        vec = zero
        for c, row in zip(pat, rows):
            if c:
                vec = _vec_add(vec, row, c)
        out.append((pat, vec))
    return out


def _meet_in_middle(rows, digits):
    """Yield nonzero patterns over digits^n summing to the zero vector, in
    scan order.  The pattern space is split in half; the low half is
    tabulated, the high half streamed."""
    n = len(rows)
    r = len(rows[0]) if n else 0
    zero = (0,) * r
    hi_n = (n + 1) // 2
    lo_rows, hi_rows = rows[hi_n:], rows[:hi_n]
    lo_table = {}
    for rank, (pat, vec) in enumerate(_pattern_vectors(lo_rows, digits)):
        lo_table.setdefault(vec, []).append((rank, pat))
    for hi_pat, hi_vec in _pattern_vectors(hi_rows, digits):
        target = tuple(-x for x in hi_vec)
        for _, lo_pat in lo_table.get(target, ()):
            pat = hi_pat + lo_pat
            if any(pat):
                yield pat


def _c2_candidates(rows_eps, rows_delta, digits):
    """Yield nonzero (eps, delta) with Σ eps·rows_eps = Σ delta·rows_delta,
    ordered by (eps rank, delta rank)."""
    table = {}
    for rank, (pat, vec) in enumerate(_pattern_vectors(rows_delta, digits)):
        table.setdefault(vec, []).append((rank, pat))
    for eps, vec in _pattern_vectors(rows_eps, digits):
        for _, delta in table.get(vec, ()):
            if any(eps) or any(delta):
                yield eps, delta


# ---------------------------------------------------------------------------
# the falsifier
# ---------------------------------------------------------------------------

def _univariate_normalized(f):
    g, _ = _positive_orthant(f)
    _, cs = g.dense_coeffs()
    if len(cs) < 2:
        raise PreconditionError("falsify needs degree >= 1 after unit normalization")
    return g


def _check_caps(m, D, count):
    if D * m > DEGREE_CAP:
        raise PreconditionError(f"horizon D={D} with m={m} exceeds the degree cap {DEGREE_CAP}")
    if count > PATTERN_CAP:
        raise PreconditionError(f"pattern count {count} exceeds the enumeration cap")


def _falsify_c1_d1(f, m, D):
    g = _univariate_normalized(f)
    _check_caps(m, D, 5 ** (D + 1))
    rows_map, _ = _reduction_rows(g, [m * j for j in range(D + 1)])
    rows = [rows_map[m * j] for j in range(D + 1)]
    for pat in _meet_in_middle(rows, C1_DIGITS):
        witness = LaurentPoly(1, {(m * j,): c for j, c in enumerate(pat) if c})
        q = divides(f, witness)
        if q is not None:
            return Counterexample("C1", witness, q, epsilon=pat)
    return None


def _falsify_c2_d1(f, m, D):
    g = _univariate_normalized(f)
    _check_caps(m, D, 2 * (m - 1) * 3 ** (D + 1))
    for k in range(1, m):
        exps_eps = [m * j for j in range(D + 1)]
        exps_delta = [m * j + k for j in range(D + 1)]
        rows_map, _ = _reduction_rows(g, exps_eps + exps_delta)
        rows_eps = [rows_map[e] for e in exps_eps]
        rows_delta = [rows_map[e] for e in exps_delta]
        for eps, delta in _c2_candidates(rows_eps, rows_delta, C2_DIGITS):
            terms = {}
            for j, c in enumerate(eps):
                if c:
                    terms[(m * j,)] = terms.get((m * j,), 0) + c
            for j, c in enumerate(delta):
                if c:
                    terms[(m * j + k,)] = terms.get((m * j + k,), 0) - c
            witness = LaurentPoly(1, terms)
            q = divides(f, witness)
            if q is not None:
                return Counterexample("C2", witness, q, epsilon=eps, delta=delta, k=k)
    return None


def _variety_filters(f, seed=12345):
    """Cheap necessary conditions for divisibility by a multivariate f:
    complex points (approximately) on the zero set of f, found by solving
    for one variable f depends on over random values of the others."""
    import numpy as np

    rng = np.random.default_rng(seed)
    d = f.dim
    lo, hi = f.exponent_range()
    solve_axis = max((i for i in range(d) if lo[i] != hi[i]), default=None)
    if solve_axis is None:
        return []
    pts = []
    attempts = 0
    while len(pts) < 4 and attempts < 64:
        attempts += 1
        base = rng.normal(size=d - 1) + 1j * rng.normal(size=d - 1)
        base = [complex(np.exp(0.2j * b.real) * (1.0 + 0.1 * b.imag)) for b in base]
        # collapse f to a univariate polynomial in the solve axis
        slices = {}
        for e, c in f.terms.items():
            v = c
            others = [x for i, x in enumerate(e) if i != solve_axis]
            for x, kk in zip(base, others):
                v *= x ** kk
            slices[e[solve_axis]] = slices.get(e[solve_axis], 0) + v
        lo_e = min(slices)
        coeffs = [slices.get(i, 0) for i in range(lo_e, max(slices) + 1)]
        if len(coeffs) < 2:
            continue
        roots = np.roots(np.array(coeffs[::-1], dtype=complex))
        for rt in roots:
            if 0.05 < abs(rt) < 20.0:
                pt = list(base)
                pt.insert(solve_axis, complex(rt))
                pts.append(tuple(pt))
                break
    return pts


def _falsify_c1_general(f, m, D):
    d = f.dim
    box = list(itertools.product(*[range(D + 1)] * d))
    _check_caps(m, D, 5 ** len(box))
    u = univariate_part(f, axis=0)
    if u is not None and d > 1:
        # slices along the remaining axes are independent; a counterexample
        # exists iff some slice pattern divides the univariate part
        c1 = _falsify_c1_d1(u, m, D)
        if c1 is None:
            return None
        witness = embed(c1.witness, d, axis=0)
        q = divides(f, witness)
        return Counterexample("C1", witness, q, epsilon=c1.epsilon)
    pts = _variety_filters(f)
    for pat in itertools.product(C1_DIGITS, repeat=len(box)):
        if not any(pat):
            continue
        ok = True
        for pt in pts:
            val = 0.0
            for c, e in zip(pat, box):
                if c:
                    term = complex(c)
                    for x, kk in zip(pt, e):
                        term *= x ** (m * kk)
                    val += term
            if abs(val) > 1e-6:
                ok = False
                break
        if not ok:
            continue
        witness = LaurentPoly(d, {tuple(m * k for k in e): c
                                  for e, c in zip(box, pat) if c})
        q = divides(f, witness)
        if q is not None:
            return Counterexample("C1", witness, q, epsilon=pat)
    return None


def _falsify_c2_general(f, m, D):
    d = f.dim
    box = list(itertools.product(*[range(D + 1)] * d))
    kspace = [k for k in itertools.product(*[range(m)] * d) if any(k)]
    _check_caps(m, D, len(kspace) * 9 ** len(box))
    pts = _variety_filters(f)
    for k in kspace:
        for eps in itertools.product(C2_DIGITS, repeat=len(box)):
            for delta in itertools.product(C2_DIGITS, repeat=len(box)):
                if not any(eps) and not any(delta):
                    continue
                ok = True
                for pt in pts:
                    val = 0.0
                    for c, e in zip(eps, box):
                        if c:
                            term = complex(c)
                            for x, kk in zip(pt, e):
                                term *= x ** (m * kk)
                            val += term
                    for c, e in zip(delta, box):
                        if c:
                            term = complex(c)
                            for x, kk, ki in zip(pt, e, k):
                                term *= x ** (m * kk + ki)
                            val -= term
                    if abs(val) > 1e-6:
                        ok = False
                        break
                if not ok:
                    continue
                terms = {}
                for c, e in zip(eps, box):
                    if c:
                        key = tuple(m * x for x in e)
                        terms[key] = terms.get(key, 0) + c
                for c, e in zip(delta, box):
                    if c:
                        key = tuple(m * x + ki for x, ki in zip(e, k))
                        terms[key] = terms.get(key, 0) - c
                witness = LaurentPoly(d, terms)
                if witness.is_zero():
                    continue
                q = divides(f, witness)
                if q is not None:
                    return Counterexample("C2", witness, q, epsilon=eps,
                                          delta=delta, k=k)
    return None


def falsify(f, m, D, condition):
    """Exhaustive exact search for a counterexample to (C1) or (C2) at
    horizon D.  Returns the first counterexample in scan order (k ascending,
    then lexicographic over the coefficient patterns with alphabet
    0, -1, 1, 2, -2), or None once the horizon is exhausted.
    """
    if m < 1:
        raise PreconditionError("m must be >= 1")
    if D < 0:
        raise PreconditionError("D must be >= 0")
    if f.is_zero():
        raise PreconditionError("falsify of the zero polynomial")
    if condition == "C1":
        if f.dim == 1:
            return _falsify_c1_d1(f, m, D)
        return _falsify_c1_general(f, m, D)
    if condition == "C2":
        if m == 1:
            return None  # the shift range 0 < k < m is empty: vacuously good
        if f.dim == 1:
            return _falsify_c2_d1(f, m, D)
        return _falsify_c2_general(f, m, D)
    raise PreconditionError(f"unknown condition {condition!r}")


# ---------------------------------------------------------------------------
# certification routes
# ---------------------------------------------------------------------------

def _arch_margins(rho, m):
    """Margins of the three strict inequality families at (rho, m):
    dissociation needs rho^m > 3; the shifted-difference argument needs
    rho^{m+k} > rho^m + 2 rho^k and rho^m - 1 > rho^k + 1 for 0 < k < m.
    All margins must be positive (equality is not certified)."""
    c1 = rho ** m - 3.0
    c2_i = min((rho ** (m + k) - rho ** m - 2.0 * rho ** k for k in range(1, m)),
               default=math.inf)
    c2_ii = min((rho ** m - 1.0 - rho ** k - 1.0 for k in range(1, m)),
                default=math.inf)
    return c1, c2_i, c2_ii


def certify_archimedean(f, m_cap=64, tol=1e-9):
    """Certificate from a complex root off the unit circle: returns the
    smallest m whose three inequality families hold with margin > tol."""
    if f.dim != 1:
        raise DimensionMismatch("certify_archimedean requires dim 1")
    data = complex_roots(f)
    rho = data.rho
    if rho <= 1.0 + tol:
        raise PreconditionError(
            "no complex root escapes the unit circle; try the p-adic route")
    for m in range(1, m_cap + 1):
        c1, c2_i, c2_ii = _arch_margins(rho, m)
        if c1 > tol and c2_i > tol and c2_ii > tol:
            return MGoodCertificate(
                f=f, m=m, route="archimedean",
                params={"rho": rho,
                        "margin_c1": c1,
                        "margin_c2_case1": None if math.isinf(c2_i) else c2_i,
                        "margin_c2_case2": None if math.isinf(c2_ii) else c2_ii,
                        "root_residual": data.residual_bound})
    raise PreconditionError(f"no m <= {m_cap} satisfies the inequalities")


def certify_padic(f):
    """Certificate from a p-adic root escape q = p^sigma > 1: the smallest
    m with q^m > p (conservatively covering the coefficient-ratio
    valuations), i.e. m = floor(1/sigma) + 1.  The shifted-difference
    inequalities hold automatically in the ultrametric.  Returns None when
    neither f nor its involute has a usable Newton-polygon slope."""
    if f.dim != 1:
        raise DimensionMismatch("certify_padic requires dim 1")
    esc = padic_escape(f)
    via_involution = False
    if esc is None:
        esc = padic_escape(f.involute())
        via_involution = esc is not None
    if esc is None:
        return None
    m = int(Fraction(1, 1) / esc.slope) + 1
    return MGoodCertificate(
        f=f, m=m, route="padic",
        params={"prime": esc.prime,
                "slope": [esc.slope.numerator, esc.slope.denominator],
                "escape_modulus": esc.escape_modulus,
                "via_involution": via_involution})


def certify_gap(f, homoclinic, H, irreducible=False):
    """Certificate for d >= 2 from the homoclinic gap radius: m = 6 R(H).

    `homoclinic` is the SummableArray of Fourier coefficients of 1/f
    (see bohrlab.homoclinic).  Requires |supp(f)| > 1 (a constant divides
    scaled multiples of anything), and f irreducible must be asserted by
    the caller; there is no irreducibility test here.
    """
    from .homoclinic import gap_radius, verify_homoclinic

    if f.dim < 2:
        raise PreconditionError("the gap route applies to d >= 2")
    if len(f.support()) <= 1:
        raise PreconditionError("gap route needs |supp(f)| > 1")
    if not irreducible:
        raise PreconditionError(
            "irreducibility of f is a hypothesis of the gap theorem; "
            "pass irreducible=True to acknowledge it")
    residual = verify_homoclinic(f, homoclinic)
    if residual >= 1e-8:
        raise PreconditionError(f"homoclinic residual {residual:.3e} too large")
    R = gap_radius(f, homoclinic, H)
    return MGoodCertificate(
        f=f, m=6 * R, route="gap",
        params={"H": H, "R": R, "l1_norm": f.l1_norm(),
                "threshold": 1.0 / (2.0 * H * f.l1_norm()),
                "box_radius": homoclinic.box_radius,
                "homoclinic_residual": residual})


def lift_univariate(cert, f):
    """Lift a univariate certificate for g to f(z1,...,zd) = g(z1): slicing
    a lacunary multiple of f along the other variables exhibits a lacunary
    multiple of g, so the same m works."""
    if cert.f.dim != 1:
        raise PreconditionError("inner certificate must be univariate")
    u = univariate_part(f, axis=0)
    if u is None or u != cert.f:
        raise PreconditionError("target polynomial is not the inner g in variable z1; "
                                "relabel variables first")
    return MGoodCertificate(
        f=f, m=cert.m, route="univariate_lift",
        params={"inner": certificate_to_json(cert)})


def confirm_certificate(cert, D):
    """Run the falsifier on both conditions up to horizon D; returns the
    certificate with checked_horizon updated, or raises CollisionError if a
    counterexample is found (the certificate is unsound)."""
    for condition in ("C1", "C2"):
        ce = falsify(cert.f, cert.m, D, condition)
        if ce is not None:
            raise CollisionError(
                f"certificate (m={cert.m}, route={cert.route}) falsified: "
                f"{condition} witness {ce.witness.render()}",
                difference=ce.witness)
    return replace(cert, checked_horizon=max(cert.checked_horizon, D))


# ---------------------------------------------------------------------------
# serialization + re-verification
# ---------------------------------------------------------------------------

def certificate_to_json(cert):
    return {
        "schema": 1,
        "kind": "mgood-certificate",
        "f": cert.f.to_json(),
        "m": cert.m,
        "route": cert.route,
        "params": cert.params,
        "checked_horizon": cert.checked_horizon,
    }


def certificate_from_json(obj):
    if obj.get("kind") != "mgood-certificate":
        raise PreconditionError("not an m-goodness certificate")
    return MGoodCertificate(
        f=LaurentPoly.from_json(obj["f"]),
        m=int(obj["m"]),
        route=obj["route"],
        params=dict(obj["params"]),
        checked_horizon=int(obj.get("checked_horizon", 0)),
    )


def verify_certificate(cert, tol=1e-9):
    """Re-check every route inequality of a deserialized certificate.
    Returns a list of human-readable check lines; raises PreconditionError
    on the first failed check."""
    lines = []
    f, m = cert.f, cert.m

    def require(ok, text):
        if not ok:
            raise PreconditionError(f"certificate check failed: {text}")
        lines.append(f"ok: {text}")

    require(m >= 1, f"m = {m} >= 1")
    if cert.route == "archimedean":
        rho = complex_roots(f).rho
        require(abs(rho - cert.params["rho"]) < 1e-6,
                f"recomputed rho {rho:.9f} matches stored {cert.params['rho']:.9f}")
        c1, c2_i, c2_ii = _arch_margins(rho, m)
        require(c1 > tol, f"rho^m > 3 with margin {c1:.3e}")
        require(math.isinf(c2_i) or c2_i > tol,
                f"rho^(m+k) > rho^m + 2 rho^k for 0 < k < m (margin {c2_i:.3e})")
        require(math.isinf(c2_ii) or c2_ii > tol,
                f"rho^m - 1 > rho^k + 1 for 0 < k < m (margin {c2_ii:.3e})")
    elif cert.route == "padic":
        p = cert.params["prime"]
        slope = Fraction(*cert.params["slope"])
        g = f if not cert.params.get("via_involution") else f.involute()
        esc = padic_escape(g)
        require(esc is not None and esc.prime == p and esc.slope == slope,
                f"Newton polygon of {'involute' if cert.params.get('via_involution') else 'f'} "
                f"has slope {slope} at p = {p}")
        require(slope * m > 1, f"q^m > p, i.e. m*sigma = {m * slope} > 1")
    elif cert.route == "gap":
        from .homoclinic import fundamental_homoclinic, gap_radius, verify_homoclinic

        H, R = cert.params["H"], cert.params["R"]
        B = cert.params["box_radius"]
        w = fundamental_homoclinic(f, B=B)
        residual = verify_homoclinic(f, w)
        require(residual < 1e-8, f"homoclinic residual {residual:.3e} < 1e-8")
        require(gap_radius(f, w, H) == R, f"gap radius R = {R} at H = {H}")
        require(m == 6 * R, f"m = 6R = {6 * R}")
    elif cert.route == "univariate_lift":
        inner = certificate_from_json(cert.params["inner"])
        require(univariate_part(f, axis=0) == inner.f,
                "target is the inner univariate polynomial in z1")
        require(inner.m == m, f"lifted m equals inner m = {inner.m}")
        lines.extend(verify_certificate(inner, tol=tol))
    else:
        raise PreconditionError(f"unknown route {cert.route!r}")
    return lines
