"""Lower bound sets of node relaxations by outer approximation.

The upper image ``{C x : x in X_LP} + R^p_>=`` of the relaxation is built from
the outside.  Start with the orthant anchored at the ideal point, then, while
some vertex ``v`` is not yet known to lie in the upper image, solve

    min t  s.t.  C x - t 1 <= v,  x in X_LP

If ``t* <= BENSON_TOL`` the vertex is confirmed and the optimal ``x`` is its
pre-image.  Otherwise the row duals give a supporting hyperplane that cuts
``v`` off.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .dd import _grow_rows, _grow_vec, poly_add_cut, poly_new, poly_tight
from .lp import LpError, _simplex

BENSON_TOL = 1e-6
COVER_TOL = 1e-6
MAX_CUTS = 5000


class BoundStatus(enum.Enum):
    INFEASIBLE = "infeasible"
    SINGLETON = "singleton"
    GENERAL = "general"


@dataclass(frozen=True)
class Relaxation:
    """LP relaxation data of a node: rows, senses, rhs and variable bounds.

    Objective rows are carried separately as ``C``.
    """

    C: np.ndarray
    A: np.ndarray
    sense: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def n(self) -> int:
        return self.C.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


def make_relaxation(C, A, sense, b, lo=None, hi=None) -> Relaxation:
    C = np.ascontiguousarray(C, dtype=np.float64)
    n = C.shape[1]
    A = np.ascontiguousarray(np.asarray(A, dtype=np.float64).reshape(-1, n))
    sense = np.ascontiguousarray(np.asarray(sense, dtype=np.int64).reshape(-1))
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64).reshape(-1))
    lo = np.zeros(n) if lo is None else np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ones(n) if hi is None else np.ascontiguousarray(hi, dtype=np.float64)
    return Relaxation(C, A, sense, b, lo, hi)


@dataclass
class LowerBoundSet:
    status: BoundStatus
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    preimages: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    normals: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lp_count: int = 0

    @property
    def infeasible(self) -> bool:
        return self.status is BoundStatus.INFEASIBLE

    @property
    def ideal(self) -> np.ndarray:
        return self.points.min(axis=0)

    def extreme_points(self) -> list[tuple[tuple[float, ...], np.ndarray]]:
        return [(tuple(map(float, y)), x) for y, x in zip(self.points, self.preimages)]

    def facets(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.normals, self.rhs.tolist()))

    def min_weighted_sum(self, lam) -> tuple[np.ndarray, float]:
        """Extreme point minimizing ``lam . y`` and that minimum."""
        if self.infeasible:
            raise ValueError("weighted sum over an infeasible bound set")
        lam = np.asarray(lam, dtype=np.float64)
        if np.any(lam < 0) or not np.any(lam > 0):
            raise ValueError("weights must be nonnegative and not all zero")
        vals = self.points @ lam
        i = int(np.argmin(vals))
        return self.points[i], float(vals[i])

    def covers(self, u, tol: float = COVER_TOL) -> bool:
        """``u`` lies in the bound set plus the nonnegative orthant."""
        if self.infeasible:
            return False
        u = np.asarray(u, dtype=np.float64)
        return bool(np.all(self.normals @ u >= self.rhs - tol * (1.0 + np.abs(self.rhs))))

    def covers_many(self, U, tol: float = COVER_TOL) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        if self.infeasible or U.shape[0] == 0:
            return np.zeros(U.shape[0], dtype=bool)
        slack = U @ self.normals.T - (self.rhs - tol * (1.0 + np.abs(self.rhs)))
        return np.all(slack >= 0, axis=1)


def infeasible_bound_set(lp_count: int = 0) -> LowerBoundSet:
    return LowerBoundSet(BoundStatus.INFEASIBLE, lp_count=lp_count)


@njit(cache=True)
def _benson(C, A, sense, b, lo, hi, tol, max_cuts):
    """Returns ``(code, points, preimages, normals, rhs, lps)`` with code 0 ok,
    1 infeasible, 2 LP failure, 3 no convergence."""
    p, n = C.shape
    m = A.shape[0]
    KX = np.zeros((16, n))
    KY = np.zeros((16, p))
    nk = 0
    lps = 0
    ideal = np.zeros(p)
    empty2 = np.zeros((0, p))
    for k in range(p):
        code, x, obj, duals, _it = _simplex(C[k].copy(), A, sense, b, lo, hi)
        lps += 1
        if code != 0:
            return (1 if code == 1 else 2), empty2, np.zeros((0, n)), empty2, np.zeros(0), lps
        ideal[k] = obj
        KX[nk] = x
        KY[nk] = C @ x
        nk += 1
    A2 = np.zeros((p + m, n + 1))
    A2[:p, :n] = C
    A2[:p, n] = -1.0
    A2[p:, :n] = A
    sense2 = np.empty(p + m, dtype=np.int64)
    sense2[:p] = -1
    sense2[p:] = sense
    b2 = np.zeros(p + m)
    b2[p:] = b
    c2 = np.zeros(n + 1)
    c2[n] = 1.0
    lo2 = np.empty(n + 1)
    hi2 = np.empty(n + 1)
    lo2[:n] = lo
    hi2[:n] = hi
    lo2[n] = -np.inf
    hi2[n] = np.inf

    Y, Z, alive, RZ, W, R, counts = poly_new(ideal)
    pre = np.full(16, -1, dtype=np.int64)
    stack = np.zeros(16, dtype=np.int64)
    ns = 1
    cuts = 0
    while ns > 0:
        ns -= 1
        vid = stack[ns]
        if not alive[vid]:
            continue
        v = Y[vid].copy()
        found = -1
        for q in range(nk):
            ok = True
            for k in range(p):
                if KY[q, k] > v[k] + tol * (1.0 + abs(v[k])):
                    ok = False
                    break
            if ok:
                found = q
                break
        pre = _grow_vec(pre, vid + 1)
        if found >= 0:
            pre[vid] = found
            continue
        b2[:p] = v
        code, x2, obj, duals, _it = _simplex(c2, A2, sense2, b2, lo2, hi2)
        lps += 1
        if code != 0:
            return 2, empty2, np.zeros((0, n)), empty2, np.zeros(0), lps
        t = x2[n]
        KX = _grow_rows(KX, nk + 1)
        KY = _grow_rows(KY, nk + 1)
        KX[nk] = x2[:n]
        KY[nk] = C @ x2[:n]
        nk += 1
        vmax = 0.0
        for k in range(p):
            vmax = max(vmax, abs(v[k]))
        if t <= tol * (1.0 + vmax):
            pre[vid] = nk - 1
            continue
        w = np.zeros(p)
        tot = 0.0
        for k in range(p):
            w[k] = max(-duals[k], 0.0)
            tot += w[k]
        if tot <= 0.0:
            return 2, empty2, np.zeros((0, n)), empty2, np.zeros(0), lps
        tot2 = 0.0
        for k in range(p):
            w[k] /= tot
            if w[k] < 1e-10:
                w[k] = 0.0
            tot2 += w[k]
        w /= tot2
        rhs = 0.0
        for k in range(p):
            rhs += w[k] * v[k]
        rhs += t
        cuts += 1
        if cuts > max_cuts:
            return 3, empty2, np.zeros((0, n)), empty2, np.zeros(0), lps
        Y, Z, alive, RZ, W, R, created = poly_add_cut(Y, Z, alive, RZ, W, R, counts, w, rhs)
        stack = _grow_vec(stack, ns + created.shape[0])
        for q in range(created.shape[0]):
            stack[ns] = created[q]
            ns += 1

    nv = counts[0]
    live = 0
    for i in range(nv):
        if alive[i]:
            live += 1
    X = np.zeros((live, n))
    q = 0
    for i in range(nv):
        if alive[i]:
            X[q] = KX[pre[i]]
            q += 1
    tight = poly_tight(Y, alive, W, R, counts, 1e-6)
    nt = 0
    for f in range(tight.shape[0]):
        if tight[f]:
            nt += 1
    Wo = np.zeros((nt, p))
    Ro = np.zeros(nt)
    q = 0
    for f in range(tight.shape[0]):
        if tight[f]:
            Wo[q] = W[f]
            Ro[q] = R[f]
            q += 1
    return 0, X @ C.T, X, Wo, Ro, lps


def compute(rel: Relaxation) -> LowerBoundSet:
    """Outer approximation of the relaxation front of ``rel``."""
    code, imgs, pre, normals, rhs, lps = _benson(
        rel.C, rel.A, rel.sense, rel.b, rel.lo, rel.hi, BENSON_TOL, MAX_CUTS
    )
    if code == 1:
        return infeasible_bound_set(lps)
    if code == 2:
        raise LpError("simplex failure inside the outer approximation")
    if code == 3:
        raise LpError("outer approximation did not converge")
    return _assemble(imgs, pre, normals, rhs, lps)


def _assemble(imgs, pre, normals, rhs, lps: int) -> LowerBoundSet:
    # coinciding images can appear when degenerate vertices coincide
    order = np.lexsort(imgs.T[::-1])
    step = np.abs(np.diff(imgs[order], axis=0)).max(axis=1) if len(order) > 1 else np.zeros(0)
    keep = order[np.concatenate([[True], step > 1e-9 * (1.0 + np.abs(imgs[order][1:]).max(axis=1))])]
    imgs, pre = imgs[keep], pre[keep]
    status = BoundStatus.SINGLETON if len(imgs) == 1 else BoundStatus.GENERAL
    return LowerBoundSet(status, imgs, pre, normals, rhs, lps)
