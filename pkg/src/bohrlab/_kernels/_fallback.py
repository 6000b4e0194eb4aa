"""Pure numpy implementations of the hot kernels.

These mirror bohrlab._kernels._core (the Cython extension) operation for
operation; reduction orders match so both backends produce bit-identical
results for the same inputs.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def orbit_coords(recur, x0, nmax):
    """Forward orbit coordinates of the companion-form recurrence
    x_{n+r} = (sum_i recur[i] * x_{n+i}) mod 1, vectorized over points.

    recur: float64[r]; x0: float64[K, r]; returns float64[K, nmax].
    """
    recur = np.asarray(recur, dtype=np.float64)
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    K, r = x0.shape
    out = np.empty((K, nmax), dtype=np.float64)
    ncopy = min(r, nmax)
    out[:, :ncopy] = x0[:, :ncopy]
    for n in range(r, nmax):
        acc = np.zeros(K)
        for i in range(r):
            acc += recur[i] * out[:, n - r + i]
        out[:, n] = acc % 1.0
    return out


def character_sums(recur, x0, w, m):
    """One pass over the orbit: S = Σ_n w_n e^{2πi x_n} and the residue
    buckets S_k = Σ_{n ≡ k (mod m)} w_n e^{2πi x_n}.

    w: complex128[N].  Returns (S complex128[K], Sk complex128[K, m]).
    """
    recur = np.asarray(recur, dtype=np.float64)
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    w = np.asarray(w, dtype=np.complex128)
    K, r = x0.shape
    N = len(w)
    Sk = np.zeros((K, m), dtype=np.complex128)
    window = x0.copy()
    for n in range(N):
        if n < r:
            x = x0[:, n]
        else:
            acc = np.zeros(K)
            for i in range(r):
                acc += recur[i] * window[:, i]
            x = acc % 1.0
            window[:, :-1] = window[:, 1:]
            window[:, -1] = x
        Sk[:, n % m] += w[n] * np.exp(2j * np.pi * x)
    S = Sk.sum(axis=1)
    return S, Sk


def log_density(recur, a, m, X):
    """log of the truncated product density prod_{n<=T} (1 + Re(a_n γ_n))
    at the points X (K, r); γ_n is evaluated as e^{2πi x_{mn}} along the
    orbit of each point.  Nonpositive factors give -inf."""
    a = np.asarray(a, dtype=np.complex128)
    T = len(a) - 1
    coords = orbit_coords(recur, X, m * T + 1)
    xs = coords[:, m * np.arange(T + 1)]
    out = np.zeros(xs.shape[0])
    for n in range(T + 1):
        theta = 2.0 * np.pi * xs[:, n]
        fac = 1.0 + a[n].real * np.cos(theta) - a[n].imag * np.sin(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            out += np.where(fac > 0.0, np.log(np.maximum(fac, 1e-300)), -np.inf)
    return out


def metropolis_chains(recur, a, m, x0, prop, accu, width):
    """Symmetric random-walk Metropolis for the truncated product density.

    x0: float64[K, r] starting states (finite log density);
    prop: float64[steps, K, r] uniforms for the proposals;
    accu: float64[steps, K] uniforms for the accept tests.
    Returns (states float64[steps, K, r], accepts int64[K]).
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    steps, K, r = prop.shape
    states = np.empty((steps, K, r), dtype=np.float64)
    X = x0.copy()
    lp = log_density(recur, a, m, X)
    accepts = np.zeros(K, dtype=np.int64)
    for t in range(steps):
        cand = (X + width * (prop[t] - 0.5)) % 1.0
        lq = log_density(recur, a, m, cand)
        with np.errstate(divide="ignore"):
            take = np.log(accu[t]) < (lq - lp)
        X[take] = cand[take]
        lp[take] = lq[take]
        accepts += take
        states[t] = X
    return states, accepts


def c1_dense_scan(rows, digits, confirm_mask=None):
    """First index (in the base-q positional order over `digits`) of a
    nonzero pattern eps with eps · rows == 0, or -1.

    rows: int64[n, r] reduction rows; digits: int64[q] scan alphabet.
    Entries must be small enough that |digits|_max * n * |rows|_max
    fits in int64 (the caller checks).
    """
    rows = np.asarray(rows, dtype=np.int64)
    digits = np.asarray(digits, dtype=np.int64)
    n, r = rows.shape
    q = len(digits)
    total = q ** n
    chunk = 1 << 18
    place = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        dig = (idx[:, None] // place[None, :]) % q
        eps = digits[dig]
        red = eps @ rows
        hit = np.all(red == 0, axis=1) & np.any(eps != 0, axis=1)
        if hit.any():
            return int(idx[np.argmax(hit)])
    return -1
