"""Companion-form toral realization of the principal action, weight
sequences, and the weighted Birkhoff averages of the observable
phi(x) = e^{2πi x_0}.

The torus model requires the univariate part of f to be monic up to sign:
the coordinate recurrence x_{n+r} = -(f_0 x_n + ... + f_{r-1} x_{n+r-1})/f_r
(mod 1) then reproduces membership in ker f(σ) window by window.  Solenoid
cases (|leading coefficient| > 1) are supported by the algebra and
certificate modules but excluded from orbit simulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, PreconditionError
from .laurent import LaurentPoly, _positive_orthant, univariate_part

__all__ = [
    "ToralModel",
    "WeightSeq",
    "weight",
    "mobius_sieve",
    "orbit_coordinate",
    "weighted_average",
    "split_averages",
    "shift_invariance_gap",
    "ffq_partial_sums",
]


@dataclass(frozen=True)
class ToralModel:
    """Forward-orbit model of (X_f, alpha_f) on T^r.

    For d = 1 the state is (x_0, ..., x_{r-1}); for d >= 2 the polynomial
    must have the product form g(z1) and the recurrence runs along the
    first axis independently on every fiber.
    """

    f: LaurentPoly
    g: LaurentPoly            # univariate part, positive orthant, f_0 != 0
    r: int
    recurrence: tuple         # c with x_{n+r} = (sum c_i x_{n+i}) mod 1
    invertible: bool

    @classmethod
    def build(cls, f):
        if f.is_zero():
            raise PreconditionError("cannot model the zero polynomial")
        u = univariate_part(f, axis=0)
        if u is None:
            raise PreconditionError(
                "the torus model needs f univariate or of the product form g(z1)")
        g, _ = _positive_orthant(u)
        _, cs = g.dense_coeffs()
        r = len(cs) - 1
        if r < 1:
            raise PreconditionError("degree 0 polynomials have a trivial model")
        if abs(cs[-1]) != 1:
            raise PreconditionError(
                "leading coefficient must be ±1 (solenoid cases are not simulated)")
        lead = cs[-1]
        recur = tuple(-c * lead for c in cs[:-1])
        return cls(f=f, g=g, r=r, recurrence=recur, invertible=abs(cs[0]) == 1)

    def companion_matrix(self):
        """A_f acting on column vectors (x_0, ..., x_{r-1})^T over Z."""
        A = np.zeros((self.r, self.r), dtype=np.int64)
        A[:-1, 1:] = np.eye(self.r - 1, dtype=np.int64)
        A[-1, :] = np.array(self.recurrence, dtype=np.int64)
        return A

    def orbit(self, x0, nmax):
        """Coordinates x_0 .. x_{nmax-1} along the first axis; x0 is one
        state (r,) or a batch (K, r)."""
        x0 = np.asarray(x0, dtype=float)
        single = x0.ndim == 1
        coords = _kernels.orbit_coords(np.array(self.recurrence, dtype=float),
                                       np.atleast_2d(x0), nmax)
        return coords[0] if single else coords

    def membership_residual(self, window):
        """Distance of sum_m f_m x_{n+m} to the nearest integer, maximized
        over the windows contained in the given coordinate stretch."""
        _, cs = self.g.dense_coeffs()
        window = np.asarray(window, dtype=float)
        r = len(cs) - 1
        if window.shape[-1] < r + 1:
            raise PreconditionError("window shorter than deg f + 1")
        acc = np.zeros(window.shape[:-1] + (window.shape[-1] - r,))
        for i, c in enumerate(cs):
            acc += c * window[..., i:window.shape[-1] - r + i]
        return float(np.max(np.abs(acc - np.round(acc))))


def orbit_coordinate(model, x0, n):
    """Single coordinate x_n of the forward orbit (d = 1: n a nonnegative
    integer; d >= 2 product models: n = (n1, ..., nd) with x0 a mapping
    fiber -> state for the needed fibers)."""
    if isinstance(n, (tuple, list)):
        n = tuple(n)
        if model.f.dim != len(n):
            raise DimensionMismatch("lattice point has wrong dimension")
        fiber, n1 = tuple(n[1:]), n[0]
        if not isinstance(x0, dict):
            raise PreconditionError("d >= 2 orbits need x0 as {fiber: state}")
        if fiber not in x0:
            raise PreconditionError(f"no initial state supplied for fiber {fiber}")
        state = x0[fiber]
    else:
        n1, state = int(n), x0
    if n1 < 0:
        raise PreconditionError("n outside the forward cone of the recurrence")
    if n1 < model.r:
        return float(np.asarray(state, dtype=float)[n1]) % 1.0
    return float(model.orbit(state, n1 + 1)[n1])


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def mobius_sieve(N):
    """mu(0..N-1) by a sieve over primes (mu(0) := 0), exact."""
    mu = np.ones(N, dtype=np.int64)
    if N > 0:
        mu[0] = 0
    primes = np.ones(N, dtype=bool)
    if N > 2:
        primes[:2] = False
        for p in range(2, int(N ** 0.5) + 1):
            if primes[p]:
                primes[p * p::p] = False
    for p in range(2, N):
        if primes[p]:
            mu[p::p] *= -1
            mu[p * p::p * p] = 0
    return mu


class WeightSeq:
    """Bounded weight sequence w_0, w_1, ...; values are generated on
    demand and cached so that prefixes are stable across calls."""

    def __init__(self, kind, seed=0, custom=None):
        if kind not in ("bernoulli", "mobius", "constant", "custom"):
            raise PreconditionError(f"unknown weight kind {kind!r}")
        if kind == "custom" and custom is None:
            raise PreconditionError("custom weights need an explicit array")
        self.kind = kind
        self.seed = int(seed)
        self._cache = np.asarray(custom, dtype=complex) if kind == "custom" else None

    @property
    def bound(self):
        if self.kind == "custom":
            return float(np.max(np.abs(self._cache))) if len(self._cache) else 0.0
        return 1.0

    def values(self, N):
        if self._cache is None or len(self._cache) < N:
            self._cache = self._generate(max(N, 1))
        return self._cache[:N]

    def _generate(self, N):
        if self.kind == "constant":
            return np.ones(N, dtype=complex)
        if self.kind == "mobius":
            return mobius_sieve(N).astype(complex)
        if self.kind == "bernoulli":
            rng = np.random.Generator(np.random.Philox(key=self.seed))
            return (1 - 2 * rng.integers(0, 2, size=N)).astype(complex)
        raise PreconditionError(f"cannot extend custom weights to length {N}")


def weight(kind, seed=0, N=0, custom=None):
    w = WeightSeq(kind, seed=seed, custom=custom)
    if N:
        w.values(N)
    return w


# ---------------------------------------------------------------------------
# weighted averages
# ---------------------------------------------------------------------------

def weighted_average(model, x0, w, N):
    """(1/N) Σ_{n<N} w_n e^{2πi x_n} for the observable e^{2πi x_0}.
    x0 may be a batch (K, r); then a vector of K averages is returned."""
    wv = np.asarray(w.values(N) if isinstance(w, WeightSeq) else w,
                    dtype=complex)[:N]
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    S, _ = _kernels.character_sums(np.array(model.recurrence, dtype=float),
                                   np.atleast_2d(x0), wv, 1)
    out = S / N
    return complex(out[0]) if single else out


def split_averages(model, x0, w, m, N):
    """Residue-class split S_N = Σ_k S_{N,k} of the weighted sum, plus the
    phase-matched reference value (1/(2N)) Σ_{mn < N} |w_{mn}|.

    Returns dict with 'total', 'buckets' (length m) and 'reference';
    batched when x0 is (K, r).
    """
    if m < 1:
        raise PreconditionError("m must be >= 1")
    wv = np.asarray(w.values(N) if isinstance(w, WeightSeq) else w,
                    dtype=complex)[:N]
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    S, Sk = _kernels.character_sums(np.array(model.recurrence, dtype=float),
                                    np.atleast_2d(x0), wv, m)
    reference = float(np.sum(np.abs(wv[::m])) / (2.0 * N))
    out = {
        "total": S / N,
        "buckets": Sk / N,
        "reference": reference,
    }
    if single:
        out["total"] = complex(out["total"][0])
        out["buckets"] = out["buckets"][0]
    return out


def shift_invariance_gap(model, x0, w, k, N):
    """|S_N^w phi(x) - S_N^{w~} phi(alpha^k x)| with w~_n = w_{n+k}; the two
    sums share all but 2k terms, so the gap is at most 2k ||w||_inf."""
    if k < 0:
        raise PreconditionError("k must be >= 0")
    wv = np.asarray(w.values(N + k) if isinstance(w, WeightSeq) else w,
                    dtype=complex)[:N + k]
    coords = model.orbit(np.asarray(x0, dtype=float), N + k)
    phases = np.exp(2j * np.pi * coords)
    s1 = np.sum(wv[:N] * phases[:N])
    s2 = np.sum(wv[k:N + k] * phases[k:N + k])
    return float(abs(s1 - s2))


def ffq_partial_sums(Z_by_N):
    """Partial sums of (1/N) * mean |Z_N|^2 over increasing N.

    Z_by_N: mapping N -> array of replicated Z_N values (each the average
    of a bounded family over the box [0, N-1]^d).  Returns (Ns, increments,
    partial sums).  Summability of the series is the a.e.-convergence
    criterion for the averages; for an orthogonal family the increments
    decay like N^{-(d+1)}.
    """
    Ns = sorted(Z_by_N)
    if not Ns:
        raise PreconditionError("no data")
    increments = []
    for N in Ns:
        z = np.asarray(Z_by_N[N])
        if z.size < 1:
            raise PreconditionError(f"no replicates at N={N}")
        increments.append(float(np.mean(np.abs(z) ** 2)) / N)
    return np.array(Ns), np.array(increments), np.cumsum(increments)


def loglog_slope(Ns, values):
    """Least-squares slope of log(values) against log(N); the decay-rate
    oracle used by the diagnostics tests."""
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    slope, _ = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(slope)
