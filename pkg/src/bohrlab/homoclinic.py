"""Summable homoclinic data for expansive f: Fourier coefficients of 1/f.

For expansive f (empty unitary variety) the array w with
w_n = ∫ e^{-2πi n·t} / f(e^{2πi t}) dt is summable and satisfies the
convolution identity w * f = δ_0 exactly, so any multiple v = φ·f gives
v * w = φ back in R_d.  That identity is what powers the gap radius: once
the tail Σ_{|n|>=R} |w_n| drops below 1/(2H‖f‖₁), coefficients of v * w far
from supp(v) are integers of modulus < 1/2, hence zero, and restrictions of
v to well-separated clusters stay divisible by f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PreconditionError, TailBoundError
from .laurent import LaurentPoly
from .spectra import expansivity_check

__all__ = [
    "SummableArray",
    "fundamental_homoclinic",
    "verify_homoclinic",
    "gap_radius",
    "gap_check",
]


@dataclass(frozen=True)
class SummableArray:
    """Finitely truncated real array over Z^d with a certified geometric
    tail bound.

    values has shape (2B+1,)^d with the origin at index (B, ..., B).
    tail_bound bounds Σ_{‖n‖_∞ > B} |x_n| via the envelope fitted to the
    outermost max-norm shells (ratio `tail_ratio`, anchored at shell B).
    """

    dim: int
    box_radius: int
    values: np.ndarray
    tail_bound: float
    tail_ratio: float
    grid: int

    def __getitem__(self, n):
        n = tuple(n) if isinstance(n, (tuple, list)) else (n,)
        B = self.box_radius
        if any(abs(x) > B for x in n):
            return 0.0
        return float(self.values[tuple(x + B for x in n)])

    def box_l1(self):
        return float(np.sum(np.abs(self.values)))

    def l1_norm(self):
        """Certified value of ‖w‖₁: in-box sum plus the tail bound."""
        return self.box_l1() + self.tail_bound

    def max_shell_sums(self):
        """S_j = Σ_{‖n‖_∞ = j, inside the box} |x_n| for j = 0..B."""
        B = self.box_radius
        idx = np.abs(np.indices(self.values.shape) - B).max(axis=0)
        return np.bincount(idx.ravel(), weights=np.abs(self.values).ravel(),
                           minlength=B + 1)

    def l1_shell_sums(self):
        """T_s = Σ_{‖n‖_1 = s, inside the box} |x_n| for s = 0..d*B."""
        B = self.box_radius
        idx = np.abs(np.indices(self.values.shape) - B).sum(axis=0)
        return np.bincount(idx.ravel(), weights=np.abs(self.values).ravel(),
                           minlength=self.dim * B + 1)

    def certified_l1_tail(self, R):
        """Upper bound on Σ_{‖n‖_∞ >= R} |x_n|: the in-box mass of the
        l^1 shells s >= R plus the beyond-box tail bound.  (‖n‖_∞ >= R
        implies ‖n‖_1 >= R, so accumulating l^1 shells is conservative.)"""
        T = self.l1_shell_sums()
        return float(T[min(R, len(T)):].sum()) + self.tail_bound

    def to_json(self, include_values=False):
        out = {
            "dim": self.dim,
            "box_radius": self.box_radius,
            "grid": self.grid,
            "tail_bound": self.tail_bound,
            "tail_ratio": self.tail_ratio,
            "box_l1": self.box_l1(),
            "max_shell_sums": [float(s) for s in self.max_shell_sums()],
        }
        if include_values:
            out["values"] = [[list(n), float(v)] for n, v in self.items()]
        return out

    def items(self):
        B = self.box_radius
        for flat, v in enumerate(self.values.ravel()):
            if v != 0.0:
                idx = np.unravel_index(flat, self.values.shape)
                yield tuple(int(i) - B for i in idx), float(v)


def _fit_tail(shells):
    """Conservative geometric envelope from the outer max-norm shells:
    ratio = max of the last few shell-to-shell ratios.  Returns
    (tail_bound, ratio); rejects ratios >= 0.999 (no certified decay)."""
    S = np.asarray(shells, dtype=float)
    B = len(S) - 1
    if B < 2 or S[B] == 0.0:
        return 0.0, 0.0
    ratios = [S[j] / S[j - 1] for j in range(max(1, B - 3), B + 1) if S[j - 1] > 0]
    if not ratios:
        return 0.0, 0.0
    r = max(ratios)
    if r >= 0.999:
        raise PreconditionError(
            f"outer shells do not decay geometrically (fitted ratio {r:.4f})")
    return float(S[B] * r / (1.0 - r)), float(r)


def fundamental_homoclinic(f, B, grid=None):
    """Discrete Fourier inversion of 1/f on an N^d grid, truncated to the
    box [-B, B]^d.  Expansivity is certified first (doubling the
    certification grid as needed); the aliasing error of the inversion,
    estimated from the fitted envelope, must stay below 1e-6.
    """
    if B < 1:
        raise PreconditionError("box radius must be >= 1")
    d = f.dim
    cert = None
    g = 64
    while g <= 1024 and cert is None:
        cert = expansivity_check(f, grid=max(16, g))
        g *= 2
    if cert is None:
        raise PreconditionError("expansivity not certified: f may vanish on the torus")

    N = int(grid) if grid else 4 * B
    if N < 4 * B:
        raise PreconditionError("inversion grid must satisfy N >= 4B")

    axes = [np.exp(2j * np.pi * np.arange(N) / N)] * d
    F = np.zeros((N,) * d, dtype=complex)
    for e, c in f.terms.items():
        term = np.array(c, dtype=complex)
        for axis, k in enumerate(e):
            shape = [1] * d
            shape[axis] = N
            term = term * (axes[axis] ** k).reshape(shape)
        F = F + term
    W = np.fft.fftn(1.0 / F) / (N ** d)

    take = np.arange(-B, B + 1) % N
    vals = W.real[np.ix_(*([take] * d))] if d > 1 else W.real[take]
    vals = np.asarray(vals).reshape((2 * B + 1,) * d)

    probe = SummableArray(dim=d, box_radius=B, values=vals,
                          tail_bound=0.0, tail_ratio=0.0, grid=N)
    tail, ratio = _fit_tail(probe.max_shell_sums())
    if ratio > 0.0:
        # mass aliased into the box comes from shells beyond N - B
        alias = probe.max_shell_sums()[B] * ratio ** (N - 2 * B) / (1.0 - ratio)
        if alias > 1e-6:
            raise PreconditionError(
                f"aliasing estimate {alias:.3e} exceeds 1e-6; increase the grid")
    return SummableArray(dim=d, box_radius=B, values=vals,
                         tail_bound=tail, tail_ratio=ratio, grid=N)


def verify_homoclinic(f, w):
    """Max distance of (w * f) from the point mass at the origin over the
    interior box [-B+r, B-r]^d, r the support radius of f."""
    if f.dim != w.dim:
        raise DimensionMismatch("dim mismatch")
    B = w.box_radius
    d = w.dim
    rng = f.exponent_range()
    if rng is None:
        raise PreconditionError("zero polynomial")
    r = max(max(abs(x) for x in rng[0]), max(abs(x) for x in rng[1]))
    if B <= r:
        raise PreconditionError("box too small for the support of f")

    size = 2 * B + 1
    conv = np.zeros((size,) * d)
    for e, c in f.terms.items():
        # conv[n] += c * w[n - e]
        src = [slice(max(0, -k), min(size, size - k)) for k in e]
        dst = [slice(max(0, k), min(size, size + k)) for k in e]
        conv[tuple(dst)] += c * w.values[tuple(src)]
    target = np.zeros_like(conv)
    target[(B,) * d] = 1.0
    lo, hi = B - (B - r), B + (B - r) + 1  # interior index window
    inner = tuple(slice(lo, hi) for _ in range(d))
    return float(np.max(np.abs(conv - target)[inner]))


def gap_radius(f, w, H):
    """Minimal R with certified tail Σ_{‖n‖>=R} |w_n| < 1/(2H‖f‖₁).

    The accumulation runs over l^1 shells (an upper bound for the max-norm
    tail), so the returned R is sound for the separation argument.
    """
    if H < 1:
        raise PreconditionError("H must be a positive integer")
    residual = verify_homoclinic(f, w)
    if residual >= 1e-8:
        raise PreconditionError(f"homoclinic residual {residual:.3e} >= 1e-8")
    threshold = 1.0 / (2.0 * H * f.l1_norm())
    for R in range(1, w.dim * w.box_radius + 2):
        if w.certified_l1_tail(R) < threshold:
            return R
    raise TailBoundError(
        f"certified tail cannot reach {threshold:.3e} within box radius "
        f"{w.box_radius}; enlarge B")


def gap_check(f, phi, cluster_a, cluster_b, min_separation):
    """Restriction test behind the separation theorem: with v = φ·f
    supported in two clusters at max-norm distance >= min_separation, the
    restriction of v to either cluster must again be divisible by f.
    Returns True iff divides(f, v restricted to cluster_a) is nonempty.
    """
    from .laurent import divides

    S = {tuple(n) for n in cluster_a}
    Sp = {tuple(n) for n in cluster_b}
    v = phi * f
    leak = v.support() - (S | Sp)
    if leak:
        raise PreconditionError(f"support of phi*f leaks outside the clusters: {sorted(leak)[:3]}")
    sep = min(max(abs(a - b) for a, b in zip(n, np))
              for n in S for np in Sp)
    if sep < min_separation:
        raise PreconditionError(f"cluster separation {sep} < required {min_separation}")
    return divides(f, v.restrict(S)) is not None
