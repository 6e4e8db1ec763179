"""Brute-force references for tests.

Everything here uses exact arithmetic: integer numpy for enumeration and
``fractions.Fraction`` for the LP reference.  Speed is a secondary concern.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import pareto_filter
from .upper_bounds import FeasibleSolution


@dataclass(frozen=True)
class OracleLimits:
    max_n: int = 20
    max_grid: int = 12

    def __post_init__(self) -> None:
        if self.max_n <= 0 or self.max_grid <= 0:
            raise ValueError("oracle limits must be positive")


DEFAULT_LIMITS = OracleLimits()


def all_binary(n: int) -> np.ndarray:
    """All ``2**n`` binary vectors as rows, in counting order."""
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def feasible_mask(inst, X: np.ndarray) -> np.ndarray:
    mask = np.ones(X.shape[0], dtype=bool)
    if inst.m == 0:
        return mask
    act = X @ inst.A.T
    for i, s in enumerate(inst.senses):
        if s == "<=":
            mask &= act[:, i] <= inst.b[i]
        elif s == ">=":
            mask &= act[:, i] >= inst.b[i]
        else:
            mask &= act[:, i] == inst.b[i]
    return mask


def feasible_points(inst, limits: OracleLimits = DEFAULT_LIMITS) -> tuple[np.ndarray, np.ndarray]:
    """(binary solutions, images) of every feasible vector."""
    if inst.n > limits.max_n:
        raise ValueError(f"n={inst.n} exceeds the oracle limit {limits.max_n}")
    X = all_binary(inst.n)
    X = X[feasible_mask(inst, X)]
    return X, X @ inst.C.T


def brute_force_front(inst, limits: OracleLimits = DEFAULT_LIMITS) -> list[FeasibleSolution]:
    X, Y = feasible_points(inst, limits)
    if len(X) == 0:
        return []
    # Keep the first pre-image (in counting order) of every image.
    first: dict[tuple[int, ...], int] = {}
    for idx, row in enumerate(map(tuple, Y.tolist())):
        first.setdefault(row, idx)
    return [
        FeasibleSolution(img, tuple(int(v) for v in X[first[img]]))
        for img in pareto_filter(first)
    ]


def grid_lubs(points: Iterable[Sequence[int]], box: Sequence[int],
              limits: OracleLimits = DEFAULT_LIMITS) -> set[tuple[int, ...]]:
    """Local upper bounds by scanning the integer grid ``[0, M]``.

    A grid point survives when no point of ``U`` lies strictly below it in
    every component; the maximal survivors are the local upper bounds.
    Points of ``U`` may have negative components; the grid always starts at
    ``min(0, min U)``.

    The survivors form a down-closed set (if ``u < g`` fails for every ``u``
    it fails for anything below ``g`` too), so a survivor is maximal exactly
    when none of its ``p`` upward grid neighbours survives.
    """
    box = tuple(int(v) for v in box)
    U = [tuple(int(v) for v in u) for u in points]
    lo = min([0] + [min(u) for u in U])
    if any(m - lo > limits.max_grid for m in box):
        raise ValueError("box exceeds the grid oracle limit")
    shape = tuple(m - lo + 1 for m in box)
    axes = np.meshgrid(*[np.arange(lo, m + 1) for m in box], indexing="ij")
    keep = np.ones(shape, dtype=bool)
    for u in U:
        below = np.ones(shape, dtype=bool)
        for k, ax in enumerate(axes):
            below &= u[k] < ax
        keep &= ~below
    maximal = keep.copy()
    for k in range(len(box)):
        up = np.zeros(shape, dtype=bool)
        src = [slice(None)] * len(box)
        dst = [slice(None)] * len(box)
        src[k] = slice(1, None)
        dst[k] = slice(None, -1)
        up[tuple(dst)] = keep[tuple(src)]
        maximal &= ~up
    return {tuple(int(v) + lo for v in idx) for idx in np.argwhere(maximal)}


# --------------------------------------------------------------------------
# exact LP reference


@dataclass
class ExactLpResult:
    status: str  # "optimal" | "infeasible"
    value: Fraction | None = None
    x: list[Fraction] | None = None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    piv = T[r][c]
    T[r] = [v / piv for v in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _bland(T, basis, cost_row: int, allowed: int) -> None:
    """Minimize with Bland's rule; the objective is row ``cost_row`` holding
    reduced costs (last column = negative objective value)."""
    m = len(basis)
    while True:
        enter = next((j for j in range(allowed) if T[cost_row][j] < 0), None)
        if enter is None:
            return
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ArithmeticError("unbounded reference LP")
        _pivot(T, basis, best[1], enter)


def exact_lp(c, A, senses, b, lo, hi) -> ExactLpResult:
    """Solve ``min c.x, A x (sense) b, lo <= x <= hi`` in rational arithmetic.

    ``senses`` uses ``-1`` for ``<=``, ``0`` for ``=`` and ``1`` for ``>=``
    (strings are accepted too).
    """
    F = Fraction
    c = [F(v) for v in c]
    n = len(c)
    lo = [F(v) for v in lo]
    hi = [F(v) for v in hi]
    if any(l > h for l, h in zip(lo, hi)):
        return ExactLpResult("infeasible")
    code = {"<=": -1, "=": 0, ">=": 1}
    rows: list[tuple[list[Fraction], int, Fraction]] = []
    for a, s, rhs in zip(A, senses, b):
        a = [F(v) for v in a]
        s = code.get(s, s)
        rows.append((a, int(s), F(rhs) - sum(ai * l for ai, l in zip(a, lo))))
    for j in range(n):
        e = [F(0)] * n
        e[j] = F(1)
        rows.append((e, -1, hi[j] - lo[j]))
    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s != 0)
    width = n + n_slack + m  # structural, slack, artificial
    T: list[list[Fraction]] = []
    k = n
    for i, (a, s, rhs) in enumerate(rows):
        row = a + [F(0)] * (n_slack + m) + [rhs]
        if s != 0:
            row[k] = F(1) if s < 0 else F(-1)
            k += 1
        if rhs < 0:
            row = [-v for v in row]
        row[n + n_slack + i] = F(1)
        T.append(row)
    basis = [n + n_slack + i for i in range(m)]
    # phase 1 cost row: sum of artificials expressed in nonbasic terms
    p1 = [F(0)] * (width + 1)
    for row in T:
        for j in range(n + n_slack):
            p1[j] -= row[j]
        p1[-1] -= row[-1]
    T.append(p1)
    _bland(T, basis, m, n + n_slack)
    if T[m][-1] != 0:
        return ExactLpResult("infeasible")
    T.pop()
    # drive zero-level artificials out of the basis
    i = 0
    while i < len(basis):
        if basis[i] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    cost = c + [F(0)] * (width - n) + [F(0)]
    red = list(cost)
    for i, bj in enumerate(basis):
        if cost[bj] != 0:
            f = cost[bj]
            red = [a - f * v for a, v in zip(red, T[i])]
    T.append(red)
    _bland(T, basis, len(basis), n + n_slack)
    y = [F(0)] * width
    for i, bj in enumerate(basis):
        y[bj] = T[i][-1]
    x = [y[j] + lo[j] for j in range(n)]
    return ExactLpResult("optimal", sum(ci * xi for ci, xi in zip(c, x)), x)


def exact_lp_of(lp) -> ExactLpResult:
    """Convenience wrapper for a :class:`mobb.lp.LinearProgram`."""
    def frac(v):
        return Fraction(v) if isinstance(v, (int, np.integer)) else Fraction(float(v))
    return exact_lp(
        [frac(v) for v in lp.c],
        [[frac(v) for v in row] for row in np.asarray(lp.A).reshape(-1, len(lp.c))],
        [int(s) for s in lp.sense],
        [frac(v) for v in lp.b],
        [frac(v) for v in lp.lo],
        [frac(v) for v in lp.hi],
    )

