"""Implicit-shift QL eigensolver for real symmetric tridiagonal matrices."""

from __future__ import annotations

import math

import numba
import numpy as np

from .errors import ConvergenceFailure

MAX_SWEEPS = 50


@numba.njit(cache=True)
def _ql_sweeps(d, e, zt, max_sweeps):
    # Returns -1 on success, otherwise the index of the eigenvalue that stalled.
    n = d.size
    eps = np.finfo(np.float64).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                return l
            sweeps += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for j in range(n):
                    upper = zt[i + 1, j]
                    zt[i + 1, j] = s * zt[i, j] + c * upper
                    zt[i, j] = c * zt[i, j] - s * upper
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tql_implicit(diagonal, off_diagonal, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.

    QL iteration with implicit Wilkinson-type shifts; the Givens rotations
    are accumulated into the eigenvector table.  Returns ``(w, v)`` with
    ``w`` unsorted and eigenvector ``k`` in column ``v[:, k]``.

    Raises ConvergenceFailure when one eigenvalue needs more than
    ``max_sweeps`` QL sweeps.
    """
    d = np.array(diagonal, dtype=np.float64)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = off_diagonal
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise ConvergenceFailure("non-finite matrix entries")
    zt = np.eye(n)
    stalled = _ql_sweeps(d, e, zt, max_sweeps)
    if stalled >= 0:
        raise ConvergenceFailure(f"eigenvalue {stalled} not converged after {max_sweeps} sweeps")
    return d, zt.T.copy()
