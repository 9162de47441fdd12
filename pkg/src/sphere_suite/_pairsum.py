"""Compiled pair-sum kernels.

Each row ``i`` accumulates the interactions with ``j > i`` using Neumaier
compensated summation.  Row sums are combined with ``math.fsum`` by the
caller, so the total does not depend on how rows are split among threads.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

LOG, RIESZ = 0, 1


@nb.njit(cache=True, nogil=True, fastmath=False)
def _pair_value(r2, kind, s):
    if kind == LOG:
        return -0.5 * math.log(r2)
    if s == 1.0:
        return 1.0 / math.sqrt(r2)
    if s == 2.0:
        return 1.0 / r2
    if s == -1.0:
        return math.sqrt(r2)
    return r2 ** (-0.5 * s)


@nb.njit(cache=True, nogil=True, fastmath=False)
def row_sums(P, lo, hi, kinds, svals, out):
    """Fill ``out[i - lo, q]`` with the compensated sum over ``j > i`` for kernel ``q``.

    Returns the number of coincident pairs met by singular kernels.
    """
    n = P.shape[0]
    nk = kinds.shape[0]
    acc = np.empty(nk)
    comp = np.empty(nk)
    bad = 0
    for i in range(lo, hi):
        acc[:] = 0.0
        comp[:] = 0.0
        xi, yi, zi = P[i, 0], P[i, 1], P[i, 2]
        for j in range(i + 1, n):
            dx = xi - P[j, 0]
            dy = yi - P[j, 1]
            dz = zi - P[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            for q in range(nk):
                if r2 == 0.0 and (kinds[q] == LOG or svals[q] > 0.0):
                    bad += 1
                    continue
                v = _pair_value(r2, kinds[q], svals[q])
                t = acc[q] + v
                if abs(acc[q]) >= abs(v):
                    comp[q] += (acc[q] - t) + v
                else:
                    comp[q] += (v - t) + acc[q]
                acc[q] = t
        for q in range(nk):
            out[i - lo, q] = acc[q] + comp[q]
    return bad


@nb.njit(cache=True, nogil=True, fastmath=False)
def gradient_rows(P, lo, hi, kind, s, out):
    """Euclidean gradient of the energy (ordered pairs) for rows ``lo..hi``."""
    n = P.shape[0]
    bad = 0
    for i in range(lo, hi):
        gx = 0.0
        gy = 0.0
        gz = 0.0
        for j in range(n):
            if j == i:
                continue
            dx = P[i, 0] - P[j, 0]
            dy = P[i, 1] - P[j, 1]
            dz = P[i, 2] - P[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 == 0.0:
                bad += 1
                continue
            if kind == LOG:
                f = -1.0 / r2
            else:
                f = -s * r2 ** (-0.5 * s - 1.0)
            gx += f * dx
            gy += f * dy
            gz += f * dz
        # each unordered pair appears twice in the ordered-pair energy
        out[i - lo, 0] = 2.0 * gx
        out[i - lo, 1] = 2.0 * gy
        out[i - lo, 2] = 2.0 * gz
    return bad
