# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: orbit recurrences, weighted character sums,
Metropolis chains for the truncated product density, and the dense scan
of the lacunary-pattern falsifier.

Same accumulation orders as bohrlab._kernels._fallback.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, log, floor, INFINITY, M_PI

cnp.import_array()

BACKEND = "compiled"


def orbit_coords(recur, x0, Py_ssize_t nmax):
    recur_arr = np.ascontiguousarray(recur, dtype=np.float64)
    x0_arr = np.ascontiguousarray(np.atleast_2d(x0), dtype=np.float64)
    cdef double[::1] c = recur_arr
    cdef double[:, ::1] X = x0_arr
    cdef Py_ssize_t K = X.shape[0], r = X.shape[1]
    out_arr = np.empty((K, nmax), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t k, n, i
    cdef double acc
    for k in range(K):
        for n in range(r if r < nmax else nmax):
            out[k, n] = X[k, n]
        for n in range(r, nmax):
            acc = 0.0
            for i in range(r):
                acc += c[i] * out[k, n - r + i]
            acc = acc - floor(acc)
            out[k, n] = acc
    return out_arr


def character_sums(recur, x0, w, Py_ssize_t m):
    recur_arr = np.ascontiguousarray(recur, dtype=np.float64)
    x0_arr = np.ascontiguousarray(np.atleast_2d(x0), dtype=np.float64)
    w_arr = np.ascontiguousarray(w, dtype=np.complex128)
    cdef double[::1] c = recur_arr
    cdef double[:, ::1] X0 = x0_arr
    cdef double complex[::1] wv = w_arr
    cdef Py_ssize_t K = X0.shape[0], r = X0.shape[1], N = wv.shape[0]
    Sk_arr = np.zeros((K, m), dtype=np.complex128)
    cdef double complex[:, ::1] Sk = Sk_arr
    window_arr = np.empty(r, dtype=np.float64)
    cdef double[::1] win = window_arr
    cdef Py_ssize_t k, n, i
    cdef double acc, x, theta
    cdef double complex phase
    for k in range(K):
        for i in range(r):
            win[i] = X0[k, i]
        for n in range(N):
            if n < r:
                x = X0[k, n]
            else:
                acc = 0.0
                for i in range(r):
                    acc += c[i] * win[i]
                x = acc - floor(acc)
                for i in range(r - 1):
                    win[i] = win[i + 1]
                win[r - 1] = x
            theta = 2.0 * M_PI * x
            phase = cos(theta) + 1j * sin(theta)
            Sk[k, n % m] += wv[n] * phase
    S_arr = Sk_arr.sum(axis=1)
    return S_arr, Sk_arr


cdef double _log_density_point(double[::1] c, Py_ssize_t r,
                               double complex[::1] a, Py_ssize_t m,
                               double[::1] win) nogil:
    """win holds the first r orbit coordinates on entry and is clobbered."""
    cdef Py_ssize_t T = a.shape[0] - 1
    cdef Py_ssize_t n, i, nmax = m * T
    cdef double acc, x, theta, fac, out = 0.0
    n = 0
    while n <= nmax:
        if n < r:
            x = win[n]
        else:
            acc = 0.0
            for i in range(r):
                acc += c[i] * win[i]
            x = acc - floor(acc)
            for i in range(r - 1):
                win[i] = win[i + 1]
            win[r - 1] = x
        if n % m == 0:
            theta = 2.0 * M_PI * x
            fac = 1.0 + a[n // m].real * cos(theta) - a[n // m].imag * sin(theta)
            if fac > 0.0:
                out += log(fac if fac > 1e-300 else 1e-300)
            else:
                return -INFINITY
        n += 1
    return out


def log_density(recur, a, Py_ssize_t m, X):
    recur_arr = np.ascontiguousarray(recur, dtype=np.float64)
    a_arr = np.ascontiguousarray(a, dtype=np.complex128)
    X_arr = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    cdef double[::1] c = recur_arr
    cdef double complex[::1] av = a_arr
    cdef double[:, ::1] Xv = X_arr
    cdef Py_ssize_t K = Xv.shape[0], r = Xv.shape[1], k, i
    out_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    win_arr = np.empty(r, dtype=np.float64)
    cdef double[::1] win = win_arr
    for k in range(K):
        for i in range(r):
            win[i] = Xv[k, i]
        out[k] = _log_density_point(c, r, av, m, win)
    return out_arr


def metropolis_chains(recur, a, Py_ssize_t m, x0, prop, accu, double width):
    recur_arr = np.ascontiguousarray(recur, dtype=np.float64)
    a_arr = np.ascontiguousarray(a, dtype=np.complex128)
    x0_arr = np.ascontiguousarray(np.atleast_2d(x0), dtype=np.float64).copy()
    prop_arr = np.ascontiguousarray(prop, dtype=np.float64)
    accu_arr = np.ascontiguousarray(accu, dtype=np.float64)
    cdef double[::1] c = recur_arr
    cdef double complex[::1] av = a_arr
    cdef double[:, ::1] X = x0_arr
    cdef double[:, :, ::1] P = prop_arr
    cdef double[:, ::1] U = accu_arr
    cdef Py_ssize_t steps = P.shape[0], K = P.shape[1], r = P.shape[2]
    states_arr = np.empty((steps, K, r), dtype=np.float64)
    cdef double[:, :, ::1] states = states_arr
    accepts_arr = np.zeros(K, dtype=np.int64)
    cdef long long[::1] accepts = accepts_arr
    lp_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] lp = lp_arr
    cand_arr = np.empty(r, dtype=np.float64)
    cdef double[::1] cand = cand_arr
    win_arr = np.empty(r, dtype=np.float64)
    cdef double[::1] win = win_arr
    cdef Py_ssize_t t, k, i
    cdef double lq, x
    for k in range(K):
        for i in range(r):
            win[i] = X[k, i]
        lp[k] = _log_density_point(c, r, av, m, win)
    for t in range(steps):
        for k in range(K):
            for i in range(r):
                x = X[k, i] + width * (P[t, k, i] - 0.5)
                cand[i] = x - floor(x)
                win[i] = cand[i]
            lq = _log_density_point(c, r, av, m, win)
            if log(U[t, k]) < lq - lp[k]:
                for i in range(r):
                    X[k, i] = cand[i]
                lp[k] = lq
                accepts[k] += 1
            for i in range(r):
                states[t, k, i] = X[k, i]
    return states_arr, accepts_arr


def c1_dense_scan(rows, digits, confirm_mask=None):
    rows_arr = np.ascontiguousarray(rows, dtype=np.int64)
    digits_arr = np.ascontiguousarray(digits, dtype=np.int64)
    cdef long long[:, ::1] M = rows_arr
    cdef long long[::1] dig = digits_arr
    cdef Py_ssize_t n = M.shape[0], r = M.shape[1], q = dig.shape[0]
    cdef Py_ssize_t total = 1, j, i, pos
    for j in range(n):
        total *= q
    acc_arr = np.zeros(r, dtype=np.int64)
    cdef long long[::1] acc = acc_arr
    pat_arr = np.zeros(n, dtype=np.int64)  # digit indices (odometer)
    cdef long long[::1] pat = pat_arr
    cdef Py_ssize_t idx
    cdef bint zero, allz
    # odometer enumeration: pat is the base-q expansion of idx (big-endian)
    for idx in range(total):
        if idx > 0:
            pos = n - 1
            while True:
                pat[pos] += 1
                if pat[pos] < q:
                    for i in range(r):
                        acc[i] += (dig[pat[pos]] - dig[pat[pos] - 1]) * M[pos, i]
                    break
                # digit rolls over from q-1 back to 0; carry left
                for i in range(r):
                    acc[i] += (dig[0] - dig[q - 1]) * M[pos, i]
                pat[pos] = 0
                pos -= 1
        zero = True
        for i in range(r):
            if acc[i] != 0:
                zero = False
                break
        if zero:
            allz = True
            for j in range(n):
                if dig[pat[j]] != 0:
                    allz = False
                    break
            if not allz:
                return idx
    return -1
