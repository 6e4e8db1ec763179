"""Incremental vertex enumeration for upward-closed polyhedra (numba kernels).

The polyhedra handled here have the form ``{y >= a} ∩ {w_i . y >= r_i}`` with
every ``w_i >= 0``.  Their recession cone is the nonnegative orthant, so the
extreme rays are the unit vectors throughout and only vertices have to be
tracked.  A cut is added with the double description update: vertices on the
wrong side are dropped and every adjacent (kept, dropped) pair, or
(dropped vertex, ray) pair, yields a new vertex on the cut hyperplane.

Adjacency is decided combinatorially in the homogenized cone from zero sets,
stored as a boolean generator-by-constraint table.  Column 0 is
``lambda >= 0`` (tight on rays only), columns ``1..p`` are the anchor facets
``y_k >= a_k`` and column ``1 + i`` belongs to facet ``i`` in general.

State lives in a tuple of arrays ``(Y, Z, alive, RZ, W, R, counts)``, with
``counts = [vertex slots, facets]``, so the Benson kernel can drive
it without leaving compiled code.  Vertex slots are never reused; dead slots
are flagged in ``alive``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

ZERO_TOL = 1e-9


@njit(cache=True)
def _grow_rows(a, need):
    if need <= a.shape[0]:
        return a
    cap = max(need, 2 * a.shape[0])
    out = np.zeros((cap,) + a.shape[1:], dtype=a.dtype)
    out[: a.shape[0]] = a
    return out


@njit(cache=True)
def _grow_vec(a, need):
    if need <= a.shape[0]:
        return a
    out = np.zeros(max(need, 2 * a.shape[0]), dtype=a.dtype)
    out[: a.shape[0]] = a
    return out


@njit(cache=True)
def _grow_cols(a, need):
    if need <= a.shape[1]:
        return a
    out = np.zeros((a.shape[0], max(need, 2 * a.shape[1])), dtype=a.dtype)
    out[:, : a.shape[1]] = a
    return out


@njit(cache=True)
def poly_new(anchor):
    p = anchor.shape[0]
    cols = 1 + p + 32
    Y = np.zeros((16, p))
    Z = np.zeros((16, cols), dtype=np.bool_)
    alive = np.zeros(16, dtype=np.bool_)
    RZ = np.zeros((p, cols), dtype=np.bool_)
    W = np.zeros((p + 32, p))
    R = np.zeros(p + 32)
    for k in range(p):
        Y[0, k] = anchor[k]
        Z[0, 1 + k] = True
        W[k, k] = 1.0
        R[k] = anchor[k]
        RZ[k, 0] = True
        for j in range(p):
            if j != k:
                RZ[k, 1 + j] = True
    alive[0] = True
    counts = np.array([1, p], dtype=np.int64)
    return Y, Z, alive, RZ, W, R, counts


@njit(cache=True)
def _contains_count(z, ncols, Z, alive, nv, RZ):
    """How many generators (live vertices and rays) have ``z`` in their zero set."""
    hits = 0
    for o in range(nv):
        if not alive[o]:
            continue
        ok = True
        for c in range(ncols):
            if z[c] and not Z[o, c]:
                ok = False
                break
        if ok:
            hits += 1
    for o in range(RZ.shape[0]):
        ok = True
        for c in range(ncols):
            if z[c] and not RZ[o, c]:
                ok = False
                break
        if ok:
            hits += 1
    return hits


@njit(cache=True)
def poly_add_cut(Y, Z, alive, RZ, W, R, counts, w, rhs):
    """Intersect with ``w . y >= rhs``.

    Returns the (possibly reallocated) state arrays and the slot indices of
    the new vertices.
    """
    p = Y.shape[1]
    nv = counts[0]
    nf = counts[1]
    W = _grow_rows(W, nf + 1)
    R = _grow_vec(R, nf + 1)
    W[nf] = w
    R[nf] = rhs
    col = 1 + nf
    Z = _grow_cols(Z, col + 1)
    RZ = _grow_cols(RZ, col + 1)
    nf += 1
    counts[1] = nf
    ncols = col + 1
    eps = ZERO_TOL * (1.0 + abs(rhs))
    vals = np.zeros(nv)
    n_minus = 0
    for i in range(nv):
        if not alive[i]:
            continue
        s = -rhs
        for k in range(p):
            s += Y[i, k] * w[k]
        vals[i] = s
        if abs(s) <= eps:
            Z[i, col] = True
        elif s < -eps:
            n_minus += 1
    for k in range(p):
        if w[k] <= eps:
            RZ[k, col] = True
    if n_minus == 0:
        return Y, Z, alive, RZ, W, R, np.zeros(0, dtype=np.int64)
    newY = np.zeros((16, p))
    newZ = np.zeros((16, ncols), dtype=np.bool_)
    nn = 0
    z = np.zeros(ncols, dtype=np.bool_)
    for i in range(nv):
        if not alive[i] or vals[i] >= -eps:
            continue
        am = vals[i]
        for j in range(nv + p):
            if j < nv:
                if not alive[j] or vals[j] <= eps:
                    continue
                zj = Z[j]
            else:
                k = j - nv
                if w[k] <= eps:
                    continue
                zj = RZ[k]
            cnt = 0
            for c in range(ncols):
                z[c] = Z[i, c] and zj[c]
                if z[c]:
                    cnt += 1
            if cnt < p - 1:
                continue
            if _contains_count(z, ncols, Z, alive, nv, RZ) > 2:
                continue
            newY = _grow_rows(newY, nn + 1)
            newZ = _grow_rows(newZ, nn + 1)
            if j < nv:
                ap = vals[j]
                for k in range(p):
                    newY[nn, k] = (ap * Y[i, k] - am * Y[j, k]) / (ap - am)
            else:
                k = j - nv
                for q in range(p):
                    newY[nn, q] = Y[i, q]
                newY[nn, k] -= am / w[k]
            for c in range(ncols):
                newZ[nn, c] = z[c]
            newZ[nn, col] = True
            nn += 1
    for i in range(nv):
        if alive[i] and vals[i] < -eps:
            alive[i] = False
    Y = _grow_rows(Y, nv + nn)
    Z = _grow_rows(Z, nv + nn)
    alive = _grow_vec(alive, nv + nn)
    created = np.empty(nn, dtype=np.int64)
    for q in range(nn):
        Y[nv + q] = newY[q]
        Z[nv + q, :ncols] = newZ[q]
        alive[nv + q] = True
        created[q] = nv + q
    counts[0] = nv + nn
    return Y, Z, alive, RZ, W, R, created


@njit(cache=True)
def poly_tight(Y, alive, W, R, counts, tol):
    """Per facet: whether some live vertex attains it."""
    nv = counts[0]
    nf = counts[1]
    p = Y.shape[1]
    out = np.zeros(nf, dtype=np.bool_)
    for f in range(nf):
        lim = tol * (1.0 + abs(R[f]))
        for i in range(nv):
            if not alive[i]:
                continue
            s = -R[f]
            for k in range(p):
                s += W[f, k] * Y[i, k]
            if abs(s) <= lim:
                out[f] = True
                break
    return out


class UpwardPolyhedron:
    """Python handle around the kernels, for direct use and testing."""

    def __init__(self, anchor) -> None:
        self._s = list(poly_new(np.asarray(anchor, dtype=np.float64)))

    def add_cut(self, w, rhs: float) -> list[int]:
        w = np.ascontiguousarray(w, dtype=np.float64)
        if np.any(w < 0):
            raise ValueError("cut normals must be nonnegative")
        *state, created = poly_add_cut(*self._s, w, float(rhs))
        self._s[:6] = state
        return created.tolist()

    @property
    def vertices(self) -> np.ndarray:
        Y, _, alive, _, _, _, counts = self._s
        return Y[: counts[0]][alive[: counts[0]]].copy()

    @property
    def facets(self) -> list[tuple[np.ndarray, float]]:
        W, R, counts = self._s[4], self._s[5], self._s[6]
        return [(W[i].copy(), float(R[i])) for i in range(counts[1])]
