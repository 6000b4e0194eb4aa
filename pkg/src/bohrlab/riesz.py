"""Truncated Riesz products on the dual side of a principal action.

For an m-good f the characters γ_n = z^{m n} (mod f) are dissociate, so the
product measure with density ∏ (1 + Re a_n γ_n) has exact Fourier data: a
character equivalent to Σ ε_n z^{m n} mod (f) with ε in {-1,0,1} picks up
∏ a_n^{(ε_n)} where a^{(1)} = a/2, a^{(-1)} = conj(a)/2 and ε = 0
contributes nothing; all other characters vanish.  A Metropolis sampler
targets the truncated density on the companion-form torus model.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CollisionError, DimensionMismatch, PreconditionError
from .laurent import LaurentPoly, divides
from .mgood import C1_DIGITS, _pattern_vectors, _reduction_rows, falsify
from .dynamics import ToralModel, WeightSeq

__all__ = [
    "RieszSpec",
    "EpsilonPattern",
    "enumerate_lattice",
    "weights_to_coeffs",
    "dissociate_expand",
    "riesz_fourier_coeff",
    "truncated_density",
    "sample",
    "SampleResult",
]


def enumerate_lattice(dim, N):
    """The lattice points carrying the first characters: 0..N for d = 1,
    the box [0, N]^d ordered by (|n|_1, lex) for d >= 2."""
    if dim == 1:
        return [(j,) for j in range(N + 1)]
    pts = list(itertools.product(*[range(N + 1)] * dim))
    pts.sort(key=lambda e: (sum(e), e))
    return pts


@dataclass(frozen=True)
class RieszSpec:
    """Parameters of a truncated Riesz product: the certified pair (f, m),
    the truncation order N, and one unit-disc coefficient per enumerated
    lattice point."""

    f: LaurentPoly
    m: int
    N: int
    coeffs: tuple
    certificate: object = None  # optional MGoodCertificate

    def __post_init__(self):
        pts = enumerate_lattice(self.f.dim, self.N)
        if len(self.coeffs) != len(pts):
            raise PreconditionError(
                f"need {len(pts)} coefficients for truncation N={self.N}, "
                f"got {len(self.coeffs)}")
        if any(abs(a) > 1.0 + 1e-12 for a in self.coeffs):
            raise PreconditionError("Riesz coefficients must satisfy |a_n| <= 1")

    @property
    def points(self):
        return enumerate_lattice(self.f.dim, self.N)

    def character_poly(self, j):
        """Representative z^{m n_j} of the j-th character."""
        n = self.points[j]
        return LaurentPoly.monomial(tuple(self.m * x for x in n), 1, dim=self.f.dim)

    def to_json(self):
        from .mgood import certificate_to_json

        return {
            "schema": 1,
            "f": self.f.to_json(),
            "m": self.m,
            "N": self.N,
            "coeffs": [[complex(a).real, complex(a).imag] for a in self.coeffs],
            "certificate": (certificate_to_json(self.certificate)
                            if self.certificate is not None else None),
        }


@dataclass(frozen=True)
class EpsilonPattern:
    """Finitely supported assignment of {-1,0,1} to the enumerated points."""

    points: tuple
    eps: tuple

    def representative(self, m, dim):
        terms = {}
        for n, e in zip(self.points, self.eps):
            if e:
                terms[tuple(m * x for x in n)] = e
        return LaurentPoly(dim, terms)


def weights_to_coeffs(w, m, count, dim=1):
    """Phase-matched Riesz coefficients a_n = e^{-i arg w_{mn}} for the
    first `count` enumerated points (arg 0 := 0, so zero weights give 1).
    Weights on the real or imaginary axis are matched exactly."""
    if dim != 1:
        raise PreconditionError("weight matching is one-dimensional")
    if isinstance(w, WeightSeq):
        vals = w.values(1 + m * (count - 1))
        picked = [complex(vals[m * j]) for j in range(count)]
    else:
        vals = np.asarray(w, dtype=complex)
        picked = [complex(vals[m * j]) for j in range(count)]
    out = []
    for a in picked:
        if a == 0:
            out.append(1.0 + 0j)
        elif a.imag == 0.0:
            out.append(1.0 + 0j if a.real > 0 else -1.0 + 0j)
        elif a.real == 0.0:
            out.append(0.0 - 1j if a.imag > 0 else 0.0 + 1j)
        else:
            out.append(complex(np.exp(-1j * np.angle(a))))
    return tuple(out)


# ---------------------------------------------------------------------------
# exact character bookkeeping
# ---------------------------------------------------------------------------

def dissociate_expand(spec):
    """All 3^(N+1) epsilon-patterns with their representatives, after
    asserting pairwise inequivalence mod (f).

    Distinct patterns collide iff their difference (coefficients in
    -2..2) is divisible by f, which is exactly a dissociation-range
    counterexample; finding one raises CollisionError.
    """
    if spec.N > 12:
        raise PreconditionError("truncation N <= 12 (3^(N+1) table)")
    ce = falsify(spec.f, spec.m, spec.N, "C1")
    if ce is not None:
        delta = ce.epsilon
        eps_a = tuple(min(1, max(-1, (d + 1) // 2)) for d in delta)
        eps_b = tuple(a - d for a, d in zip(eps_a, delta))
        raise CollisionError(
            "character family is not dissociate at this truncation: "
            f"{ce.witness.render()} is divisible by f",
            pattern_a=eps_a, pattern_b=eps_b, difference=ce.witness)
    pts = spec.points
    table = []
    for eps in itertools.product((-1, 0, 1), repeat=len(pts)):
        pat = EpsilonPattern(points=tuple(pts), eps=eps)
        table.append((pat, pat.representative(spec.m, spec.f.dim)))
    return table


def riesz_fourier_coeff(spec, h):
    """Fourier coefficient of the truncated Riesz product at the character
    of h: ∏ a^{(ε)} when h ≡ Σ ε_n z^{mn} (mod f) for some (unique)
    pattern ε in {-1,0,1}; 0 when no pattern matches."""
    if h.dim != spec.f.dim:
        raise DimensionMismatch("h must live in the same ring as f")
    if spec.f.dim != 1:
        return _riesz_coeff_enumerate(spec, h)
    from .laurent import _positive_orthant

    g, _ = _positive_orthant(spec.f)
    _, cs = g.dense_coeffs()
    if len(cs) < 2:
        raise PreconditionError("need degree >= 1")
    # divisibility is unit-invariant: shift everything so all exponents
    # are nonnegative, then compare reductions in one common scale
    s = 0
    if h.support():
        s = max(0, -min(e[0] for e in h.support()))
    char_exps = [spec.m * p[0] + s for p in spec.points]
    h_exps = [e[0] + s for e in h.support()]
    rows_map, _ = _reduction_rows(g, sorted(set(char_exps + h_exps)))
    rows = [rows_map[e] for e in char_exps]
    target = tuple(
        sum(c * rows_map[e[0] + s][i] for e, c in h.terms.items())
        for i in range(len(cs) - 1))
    matches = []
    n = len(rows)
    hi_n = (n + 1) // 2
    lo_rows, hi_rows = rows[hi_n:], rows[:hi_n]
    lo_table = {}
    for pat, vec in _pattern_vectors(lo_rows, (-1, 0, 1)):
        lo_table.setdefault(vec, []).append(pat)
    for hi_pat, hi_vec in _pattern_vectors(hi_rows, (-1, 0, 1)):
        want = tuple(t - v for t, v in zip(target, hi_vec))
        for lo_pat in lo_table.get(want, ()):
            eps = hi_pat + lo_pat
            rep = EpsilonPattern(tuple(spec.points), eps).representative(spec.m, 1)
            # exact confirmation over Z (handles content > 1)
            if divides(spec.f, h - rep) is not None:
                matches.append(eps)
    if not matches:
        return 0j
    if len(matches) > 1:
        raise CollisionError("two epsilon-patterns represent the same character; "
                             "the m-goodness certificate is unsound",
                             pattern_a=matches[0], pattern_b=matches[1])
    eps = matches[0]
    out = 1.0 + 0j
    for a, e in zip(spec.coeffs, eps):
        if e == 1:
            out *= a / 2.0
        elif e == -1:
            out *= np.conj(a) / 2.0
    return complex(out)


def _riesz_coeff_enumerate(spec, h):
    matches = []
    for eps in itertools.product((-1, 0, 1), repeat=len(spec.points)):
        rep = EpsilonPattern(tuple(spec.points), eps).representative(spec.m, spec.f.dim)
        if divides(spec.f, h - rep) is not None:
            matches.append(eps)
            if len(matches) > 1:
                raise CollisionError("duplicate character representation",
                                     pattern_a=matches[0], pattern_b=matches[1])
    if not matches:
        return 0j
    out = 1.0 + 0j
    for a, e in zip(spec.coeffs, matches[0]):
        if e == 1:
            out *= a / 2.0
        elif e == -1:
            out *= np.conj(a) / 2.0
    return complex(out)


# ---------------------------------------------------------------------------
# density and sampling on the torus model
# ---------------------------------------------------------------------------

def _check_model(spec, model):
    from .laurent import univariate_part, _positive_orthant

    u = univariate_part(spec.f, axis=0)
    if u is None:
        raise PreconditionError("sampling needs the product/univariate form")
    gu, _ = _positive_orthant(u)
    if gu != model.g and gu != -model.g:
        raise PreconditionError("model was built for a different polynomial")
    if spec.f.dim != 1:
        raise PreconditionError("sampling is implemented for d = 1 models")


def truncated_density(spec, model, x0):
    """∏_{n=0}^{N} (1 + Re(a_n e^{2πi x_{mn}})) evaluated along the orbit
    of x0; values lie in [0, 2^{N+1}]."""
    _check_model(spec, model)
    a = np.asarray(spec.coeffs, dtype=complex)
    X = np.atleast_2d(np.asarray(x0, dtype=float))
    logs = _kernels.log_density(np.array(model.recurrence, dtype=float),
                                a, spec.m, X)
    vals = np.exp(logs)
    return float(vals[0]) if np.asarray(x0).ndim == 1 else vals


@dataclass(frozen=True)
class SampleResult:
    states: np.ndarray        # (chains, kept, r) post-burn-in
    acceptance: np.ndarray    # per-chain acceptance rate
    burnin: int
    thin: int
    seed: int

    def flat(self):
        return self.states.reshape(-1, self.states.shape[-1])


def sample(spec, model, chains, steps, seed, burnin=10_000, width=0.1,
           thin=1, start_retry_cap=100):
    """Metropolis random walk targeting the truncated density.

    Each chain owns the counter-based stream Philox(key=(seed, chain));
    runs are bit-reproducible for a fixed seed.  Zero-density starting
    points are redrawn up to `start_retry_cap` times.
    """
    _check_model(spec, model)
    if steps <= burnin:
        raise PreconditionError("steps must exceed the burn-in")
    a = np.asarray(spec.coeffs, dtype=complex)
    recur = np.array(model.recurrence, dtype=float)
    r = model.r
    starts = np.empty((chains, r))
    props = np.empty((steps, chains, r))
    accus = np.empty((steps, chains))
    for cidx in range(chains):
        rng = np.random.Generator(np.random.Philox(key=[seed, cidx]))
        x = rng.random(r)
        for _ in range(start_retry_cap):
            if np.isfinite(_kernels.log_density(recur, a, spec.m, x[None, :])[0]):
                break
            x = rng.random(r)
        else:
            raise PreconditionError("could not find a positive-density start")
        starts[cidx] = x
        props[:, cidx, :] = rng.random((steps, r))
        accus[:, cidx] = rng.random(steps)
    states, accepts = _kernels.metropolis_chains(recur, a, spec.m, starts,
                                                 props, accus, width)
    kept = states[burnin::thin]                      # (kept, chains, r)
    kept = np.swapaxes(kept, 0, 1).copy()            # (chains, kept, r)
    return SampleResult(states=kept,
                        acceptance=accepts / float(steps),
                        burnin=burnin, thin=thin, seed=seed)
