"""Symmetric eigensolvers: cyclic Jacobi (dense) and Laplacian power iteration (sparse)."""
from __future__ import annotations

import math

import numpy as np
from numba import njit

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    n = a.shape[0]
    frob = 0.0
    for i in range(n):
        for j in range(n):
            frob += a[i, j] * a[i, j]
    frob = math.sqrt(frob)
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if math.sqrt(off) <= tol * frob:
            return sweep, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return max_sweeps, False


def jacobi_eigh(a, tol=1e-14, max_sweeps=100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns, like :func:`numpy.linalg.eigh`.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    if n:
        _, ok = _jacobi_sweeps(a, v, tol, max_sweeps)
        if not ok:
            raise ArithmeticError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@njit(cache=True)
def _laplacian_power(indptr, indices, x, shift, tol, max_iter):
    n = x.shape[0]
    y = np.empty(n)
    rq_prev = np.inf
    diff_prev = np.inf
    rq = 0.0
    for it in range(1, max_iter + 1):
        lx_norm = 0.0
        for i in range(n):
            acc = (indptr[i + 1] - indptr[i]) * x[i]
            for k in range(indptr[i], indptr[i + 1]):
                acc -= x[indices[k]]
            lx_norm += acc * acc
            y[i] = acc - shift * x[i]
        if lx_norm == 0.0:
            return 0.0, it, True
        rq = 0.0
        norm = 0.0
        for i in range(n):
            rq += x[i] * y[i]
            norm += y[i] * y[i]
        rq += shift
        norm = math.sqrt(norm)
        for i in range(n):
            x[i] = y[i] / norm
        diff = abs(rq - rq_prev)
        scale = tol * max(1.0, rq)
        if diff < scale:
            # geometric tail of the remaining Rayleigh-quotient increments
            ratio = diff / diff_prev
            if ratio < 1.0 and diff * ratio / (1.0 - ratio) < scale:
                return rq, it, True
        rq_prev = rq
        diff_prev = diff
    return rq, max_iter, False


def power_start_vector(n: int) -> np.ndarray:
    """All-ones plus a quadratic golden-ratio perturbation.

    A linear sequence would be exactly orthogonal to eigenvectors such as
    (1, -2, 1) on a path; the quadratic term has no such local structure.
    """
    i = np.arange(1, n + 1, dtype=np.float64)
    x = 1.0 + np.mod(i * i * GOLDEN, 1.0)
    return x / np.linalg.norm(x)


def laplacian_power_iteration(indptr, indices, tol=1e-9, max_iter=None):
    """Largest Laplacian eigenvalue by power iteration on ``L v = D v - A v``.

    Iterates on ``L - s I`` with ``s = k_max / 2``; the Laplacian spectrum
    lies in ``[0, rho]`` and ``rho > k_max``, so the shift keeps ``rho - s``
    dominant while shrinking the convergence ratio. Stops when successive
    Rayleigh quotients differ by less than ``tol * max(1, rho)`` and the
    geometric extrapolation of the remaining increments is below the same
    bound. Returns ``(rho, iterations, converged)``.
    """
    n = len(indptr) - 1
    if max_iter is None:
        max_iter = 10 * n + 1000
    if n == 0:
        return 0.0, 0, True
    indptr = np.asarray(indptr, dtype=np.int64)
    shift = float(np.diff(indptr).max()) / 2.0
    x = power_start_vector(n)
    rho, it, ok = _laplacian_power(indptr, np.asarray(indices, dtype=np.int64),
                                   x, shift, tol, max_iter)
    return float(rho), int(it), bool(ok)
