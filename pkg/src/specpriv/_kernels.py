"""Hot loops: Jacobi eigenvalues, bounded-Laplace inverse CDF, BFS distances.

Each kernel exists twice, a numba ``@njit`` version and a plain numpy
version with identical semantics. Set ``SPECPRIV_NUMBA=0`` to force the
numpy path (also used automatically when numba is not importable).
"""

import math
import os
from collections import deque

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SPECPRIV_NUMBA", "1").strip() not in ("0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- jacobi


def _jacobi_eigvalsh_py(a, rel_tol, max_sweeps):
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    scale = math.sqrt(float(np.sum(a * a)))
    if scale == 0.0:
        return np.zeros(n), 0
    thresh = rel_tol * scale
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= thresh:
            return np.sort(np.diag(a).copy()), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.sort(np.diag(a).copy()), -1


def _jacobi_eigvalsh_nb(a, rel_tol, max_sweeps):
    a = a.astype(np.float64).copy()
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = math.sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), 0
    thresh = rel_tol * scale
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        off = math.sqrt(2.0 * off)
        if off <= thresh:
            return np.sort(np.diag(a).copy()), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                sgn = 1.0 if tau >= 0 else -1.0
                t = sgn / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
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
    return np.sort(np.diag(a).copy()), -1


# ------------------------------------------------- bounded Laplace sampling


def _bl_icdf_py(lam, u, b, n):
    lam = np.asarray(lam, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    el = np.exp(-lam / b)
    c = 1.0 - 0.5 * (el + np.exp(-(n - lam) / b))
    p_left = (1.0 - el) / (2.0 * c)
    left = lam + b * np.log(np.maximum(2.0 * c * u + el, 1e-300))
    right = lam - b * np.log(np.maximum(2.0 - el - 2.0 * c * u, 1e-300))
    return np.clip(np.where(u < p_left, left, right), 0.0, n)


def _bl_icdf_nb(lam, u, b, n):
    out = np.empty(lam.shape[0])
    for k in range(lam.shape[0]):
        lk = lam[k]
        el = math.exp(-lk / b)
        c = 1.0 - 0.5 * (el + math.exp(-(n - lk) / b))
        uk = u[k]
        if uk < (1.0 - el) / (2.0 * c):
            x = lk + b * math.log(max(2.0 * c * uk + el, 1e-300))
        else:
            x = lk - b * math.log(max(2.0 - el - 2.0 * c * uk, 1e-300))
        out[k] = min(max(x, 0.0), n)
    return out


# -------------------------------------------------------------- BFS


def _bfs_distances_py(n, indptr, indices):
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in indices[indptr[v] : indptr[v + 1]]:
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, v] + 1
                    queue.append(w)
    return dist


def _bfs_distances_nb(n, indptr, indices):
    dist = np.full((n, n), -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, v] + 1
                    queue[tail] = w
                    tail += 1
    return dist


if HAVE_NUMBA:
    _jacobi_eigvalsh_nb = numba.njit(cache=True)(_jacobi_eigvalsh_nb)
    _bl_icdf_nb = numba.njit(cache=True)(_bl_icdf_nb)
    _bfs_distances_nb = numba.njit(cache=True)(_bfs_distances_nb)


def jacobi_eigvalsh(a, rel_tol, max_sweeps):
    """Eigenvalues (ascending) of a dense symmetric matrix by cyclic Jacobi.

    Returns ``(values, sweeps)``; ``sweeps == -1`` means the sweep cap was hit
    before the off-diagonal norm fell below ``rel_tol * ||a||_F``.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if USE_NUMBA:
        return _jacobi_eigvalsh_nb(a, float(rel_tol), int(max_sweeps))
    return _jacobi_eigvalsh_py(a, rel_tol, max_sweeps)


def bounded_laplace_icdf(lam, u, b, n):
    """Inverse CDF of the bounded Laplace law on [0, n], elementwise."""
    lam, u = np.broadcast_arrays(np.asarray(lam, dtype=np.float64), np.asarray(u, dtype=np.float64))
    shape = lam.shape
    if USE_NUMBA:
        out = _bl_icdf_nb(np.ascontiguousarray(lam).ravel(), np.ascontiguousarray(u).ravel(), float(b), float(n))
    else:
        out = _bl_icdf_py(lam.ravel(), u.ravel(), float(b), float(n))
    return out.reshape(shape)


def bfs_distances(n, indptr, indices):
    """All-pairs hop distances from CSR adjacency; -1 marks unreachable."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if USE_NUMBA:
        return _bfs_distances_nb(int(n), indptr, indices)
    return _bfs_distances_py(int(n), indptr, indices)
