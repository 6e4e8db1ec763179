"""Dense bounded-variable revised simplex.

Every row gets a slack column so the initial basis is the identity; rows whose
slack would start outside its bounds get an artificial column instead and a
phase-1 pass drives those artificials to zero.  Dantzig pricing is used until a
streak of degenerate pivots, after which Bland's rule takes over.

The kernel is compiled with numba; the Python wrapper only validates input and
packs the result.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

FEAS_TOL = 1e-7
OPT_TOL = 1e-7

LE, EQ, GE = -1, 0, 1
_SENSE_CODES = {"<=": LE, "=": EQ, "==": EQ, ">=": GE}

_PIVOT_TOL = 1e-9
_DJ_TOL = 1e-9
_REFACTOR_EVERY = 40
_BLAND_AFTER = 25
_MAX_ITER = 50_000


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpError(RuntimeError):
    """Raised when the simplex cannot certify a status (numerical trouble)."""


@dataclass
class LinearProgram:
    """``min c.x`` subject to ``A x (sense) b`` and ``lo <= x <= hi``.

    ``sense`` holds -1 for ``<=``, 0 for ``=`` and +1 for ``>=``.
    """

    c: np.ndarray
    A: np.ndarray
    sense: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        self.c = np.ascontiguousarray(self.c, dtype=np.float64)
        n = self.c.shape[0]
        self.A = np.ascontiguousarray(np.asarray(self.A, dtype=np.float64).reshape(-1, n))
        self.sense = np.ascontiguousarray(_coerce_sense(self.sense))
        self.b = np.ascontiguousarray(self.b, dtype=np.float64).reshape(-1)
        self.lo = np.ascontiguousarray(self.lo, dtype=np.float64)
        self.hi = np.ascontiguousarray(self.hi, dtype=np.float64)
        m = self.A.shape[0]
        if self.sense.shape != (m,) or self.b.shape != (m,):
            raise ValueError("row data has inconsistent lengths")
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("bounds must have one entry per variable")
        if np.any(self.lo > self.hi):
            raise ValueError("lower bound exceeds upper bound")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise ValueError("coefficients must be finite")

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[0]


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective_value: float = float("nan")
    duals: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0


def _coerce_sense(sense) -> np.ndarray:
    arr = np.asarray(sense)
    if arr.dtype.kind in "US":
        return np.array([_SENSE_CODES[str(s)] for s in arr], dtype=np.int64)
    return arr.astype(np.int64)


@njit(cache=True)
def _column(A, sign, j, n, m, out):
    if j < n:
        for i in range(m):
            out[i] = A[i, j]
    else:
        for i in range(m):
            out[i] = 0.0
        if j < n + m:
            out[j - n] = 1.0
        else:
            out[j - n - m] = sign[j - n - m]


@njit(cache=True)
def _refactor(A, sign, basis, n, m, Binv, x, b, is_basic):
    B = np.empty((m, m))
    col = np.empty(m)
    for r in range(m):
        _column(A, sign, basis[r], n, m, col)
        for i in range(m):
            B[i, r] = col[i]
    inv = np.linalg.inv(B)
    for i in range(m):
        for k in range(m):
            Binv[i, k] = inv[i, k]
    # x_B = B^-1 (b - N x_N)
    rhs = b.copy()
    N = n + 2 * m
    for j in range(N):
        if is_basic[j] or x[j] == 0.0:
            continue
        _column(A, sign, j, n, m, col)
        for i in range(m):
            rhs[i] -= col[i] * x[j]
    xb = Binv @ rhs
    for r in range(m):
        x[basis[r]] = xb[r]


@njit(cache=True)
def _run(cost, A, sign, b, clo, chi, x, basis, is_basic, Binv, n, m, iters):
    """Primal simplex iterations from a feasible basis.

    Returns (code, iterations): 0 optimal, 2 unbounded, 3 iteration limit.
    """
    N = n + 2 * m
    col = np.empty(m)
    alpha = np.empty(m)
    degenerate = 0
    since_refactor = 0
    while True:
        if iters >= _MAX_ITER:
            return 3, iters
        cb = np.empty(m)
        for r in range(m):
            cb[r] = cost[basis[r]]
        y = cb @ Binv
        bland = degenerate > _BLAND_AFTER
        q = -1
        qdir = 0
        best = 0.0
        for j in range(N):
            if is_basic[j] or clo[j] == chi[j]:
                continue
            dj = cost[j]
            if j < n:
                for i in range(m):
                    dj -= y[i] * A[i, j]
            elif j < n + m:
                dj -= y[j - n]
            else:
                dj -= y[j - n - m] * sign[j - n - m]
            direction = 0
            if x[j] <= clo[j]:
                if dj < -_DJ_TOL:
                    direction = 1
            elif x[j] >= chi[j]:
                if dj > _DJ_TOL:
                    direction = -1
            else:  # free (or strictly between bounds)
                if dj < -_DJ_TOL:
                    direction = 1
                elif dj > _DJ_TOL:
                    direction = -1
            if direction != 0:
                if bland:
                    q = j
                    qdir = direction
                    break
                if abs(dj) > best:
                    best = abs(dj)
                    q = j
                    qdir = direction
        if q < 0:
            return 0, iters
        _column(A, sign, q, n, m, col)
        for i in range(m):
            s = 0.0
            for k in range(m):
                s += Binv[i, k] * col[k]
            alpha[i] = s
        theta = chi[q] - clo[q]
        leave = -1
        leave_to_upper = False
        best_piv = 0.0
        for r in range(m):
            a = qdir * alpha[r]
            j = basis[r]
            if a > _PIVOT_TOL:
                if clo[j] == -np.inf:
                    continue
                lim = (x[j] - clo[j]) / a
                to_upper = False
            elif a < -_PIVOT_TOL:
                if chi[j] == np.inf:
                    continue
                lim = (chi[j] - x[j]) / (-a)
                to_upper = True
            else:
                continue
            lim = max(lim, 0.0)
            if leave < 0 and lim < theta or lim < theta - 1e-12:
                take = True
            elif lim <= theta + 1e-12 and leave >= 0:
                if bland:
                    take = j < basis[leave]
                else:
                    take = abs(a) > best_piv
            else:
                take = False
            if take:
                theta = lim
                leave = r
                leave_to_upper = to_upper
                best_piv = abs(a)
        if theta == np.inf:
            return 2, iters
        iters += 1
        if theta <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0
        step = qdir * theta
        for r in range(m):
            x[basis[r]] -= step * alpha[r]
        x[q] += step
        if leave < 0:
            # bound flip
            x[q] = chi[q] if qdir > 0 else clo[q]
            continue
        j_out = basis[leave]
        x[j_out] = chi[j_out] if leave_to_upper else clo[j_out]
        is_basic[j_out] = False
        is_basic[q] = True
        basis[leave] = q
        piv = alpha[leave]
        for k in range(m):
            Binv[leave, k] /= piv
        for i in range(m):
            if i != leave and alpha[i] != 0.0:
                f = alpha[i]
                for k in range(m):
                    Binv[i, k] -= f * Binv[leave, k]
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            _refactor(A, sign, basis, n, m, Binv, x, b, is_basic)
            since_refactor = 0


@njit(cache=True)
def _simplex(c, A, sense, b, lo, hi):
    """Two-phase bounded simplex.

    Returns (code, x, objective, duals, iterations) where code is 0 optimal,
    1 infeasible, 2 unbounded, 3 iteration limit / numerical failure.
    """
    m, n = A.shape
    N = n + 2 * m
    clo = np.empty(N)
    chi = np.empty(N)
    x = np.zeros(N)
    for j in range(n):
        clo[j] = lo[j]
        chi[j] = hi[j]
        if lo[j] > -np.inf:
            x[j] = lo[j]
        elif hi[j] < np.inf:
            x[j] = hi[j]
        else:
            x[j] = 0.0
    for i in range(m):
        if sense[i] < 0:
            clo[n + i] = 0.0
            chi[n + i] = np.inf
        elif sense[i] > 0:
            clo[n + i] = -np.inf
            chi[n + i] = 0.0
        else:
            clo[n + i] = 0.0
            chi[n + i] = 0.0
        clo[n + m + i] = 0.0
        chi[n + m + i] = 0.0
    sign = np.ones(m)
    basis = np.empty(m, dtype=np.int64)
    is_basic = np.zeros(N, dtype=np.bool_)
    Binv = np.zeros((m, m))
    need_phase1 = False
    for i in range(m):
        r = b[i]
        for j in range(n):
            r -= A[i, j] * x[j]
        if clo[n + i] - 1e-12 <= r <= chi[n + i] + 1e-12:
            basis[i] = n + i
            x[n + i] = r
            Binv[i, i] = 1.0
        else:
            s = min(max(r, clo[n + i]), chi[n + i])
            x[n + i] = s
            resid = r - s
            sign[i] = 1.0 if resid > 0 else -1.0
            basis[i] = n + m + i
            x[n + m + i] = abs(resid)
            chi[n + m + i] = np.inf
            Binv[i, i] = sign[i]
            need_phase1 = True
        is_basic[basis[i]] = True
    iters = 0
    if need_phase1:
        cost1 = np.zeros(N)
        for i in range(m):
            if chi[n + m + i] > 0.0:
                cost1[n + m + i] = 1.0
        code, iters = _run(cost1, A, sign, b, clo, chi, x, basis, is_basic, Binv, n, m, iters)
        if code != 0:
            return 3, x[:n].copy(), np.nan, np.zeros(m), iters
        _refactor(A, sign, basis, n, m, Binv, x, b, is_basic)
        infeas = 0.0
        scale = 1.0
        for i in range(m):
            infeas += abs(x[n + m + i])
            scale = max(scale, abs(b[i]))
        if infeas > 1e-9 * scale + 1e-9:
            return 1, x[:n].copy(), np.nan, np.zeros(m), iters
        for i in range(m):
            chi[n + m + i] = 0.0
            if not is_basic[n + m + i]:
                x[n + m + i] = 0.0
    cost = np.zeros(N)
    for j in range(n):
        cost[j] = c[j]
    code, iters = _run(cost, A, sign, b, clo, chi, x, basis, is_basic, Binv, n, m, iters)
    if code != 0:
        return code if code == 2 else 3, x[:n].copy(), np.nan, np.zeros(m), iters
    _refactor(A, sign, basis, n, m, Binv, x, b, is_basic)
    xs = x[:n].copy()
    for j in range(n):
        # clamp round-off back into the box
        if xs[j] < lo[j]:
            xs[j] = lo[j]
        elif xs[j] > hi[j]:
            xs[j] = hi[j]
    obj = 0.0
    for j in range(n):
        obj += c[j] * xs[j]
    cb = np.empty(m)
    for r in range(m):
        cb[r] = cost[basis[r]]
    duals = cb @ Binv
    return 0, xs, obj, duals, iters


def solve_arrays(c, A, sense, b, lo, hi) -> LpSolution:
    """Solve without building a :class:`LinearProgram`; arrays must already be
    contiguous float64 (int64 for ``sense``)."""
    if A.shape[0] == 0:
        return _solve_unconstrained(c, lo, hi)
    code, x, obj, duals, iters = _simplex(c, A, sense, b, lo, hi)
    if code == 0:
        return LpSolution(LpStatus.OPTIMAL, x, float(obj), duals, int(iters))
    if code == 1:
        return LpSolution(LpStatus.INFEASIBLE, iterations=int(iters))
    if code == 2:
        raise LpError("LP reported unbounded on a box-bounded problem")
    raise LpError("simplex failed to converge (iteration limit or singular basis)")


def _solve_unconstrained(c, lo, hi) -> LpSolution:
    x = np.where(c > 0, lo, np.where(c < 0, hi, np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))))
    if not np.all(np.isfinite(x)):
        raise LpError("LP reported unbounded on a box-bounded problem")
    return LpSolution(LpStatus.OPTIMAL, x.astype(np.float64), float(c @ x), np.zeros(0), 0)


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` to optimality or prove it infeasible."""
    return solve_arrays(lp.c, lp.A, lp.sense, lp.b, lp.lo, lp.hi)


def feasibility_witness(lp: LinearProgram) -> np.ndarray | None:
    """Return a point of the feasible region of ``lp`` or ``None``.

    The objective of ``lp`` must be identically zero.
    """
    if np.any(lp.c != 0):
        raise ValueError("feasibility_witness expects a zero objective")
    sol = solve(lp)
    return sol.x if sol.status is LpStatus.OPTIMAL else None
