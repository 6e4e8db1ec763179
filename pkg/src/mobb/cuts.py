"""Cover inequalities from objective bounds.

An objective row ``C_k x <= s_k`` with nonnegative coefficients is a knapsack
constraint, so a set ``J`` whose coefficients sum past ``s_k`` cannot be
chosen completely: ``sum_J x_j <= |J| - 1``.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .benson import LowerBoundSet
from .subproblem import INT_TOL, CoverCut, Subproblem, fractional_mask

VIOLATION_TOL = 1e-6


def eligible_objectives(sub: Subproblem) -> list[int]:
    """Objectives usable as knapsack rows at this node.

    The SLUB component must be binding (not the box value) and every
    coefficient on a variable not fixed to zero must be nonnegative, so that
    ``C_k x`` is at least the sum over any subset of variables at one.
    """
    live = sub.fixed != 0
    return [k for k in sub.bounded_objectives() if np.all(sub.inst.C[k, live] >= 0)]


def certified(indices: Sequence[int], rhs: int, coef: np.ndarray, bound: int) -> bool:
    """Any ``rhs + 1`` of the indexed variables at one already exceed ``bound``."""
    if rhs + 1 > len(indices):
        return False
    smallest = np.sort(coef[list(indices)])[: rhs + 1]
    return int(smallest.sum()) > bound


def lift(cut: CoverCut, g: int, sub: Subproblem) -> CoverCut | None:
    """Add ``g`` to the cut without changing its right-hand side, if some
    eligible objective certifies the enlarged inequality."""
    if g in cut.indices:
        return None
    idx = tuple(sorted(cut.indices + (g,)))
    for k in eligible_objectives(sub):
        if certified(idx, cut.rhs, sub.inst.C[k], sub.slub[k]):
            return CoverCut(idx, cut.rhs)
    return None


def _is_cover(J: Sequence[int], ks: list[int], sub: Subproblem) -> bool:
    idx = list(J)
    return any(int(sub.inst.C[k, idx].sum()) > sub.slub[k] for k in ks)


def _point_cuts(x: np.ndarray, ks: list[int], sub: Subproblem, lifting: bool) -> list[CoverCut]:
    """Covers read off one fractional pre-image ``x``.

    The first candidate takes every variable at one together with every
    fractional one.  It is only violated when the fractional values are
    close to one, so single-fraction covers ``ones + {f}`` with right-hand
    side ``|ones|`` are built as well; those are always violated by ``x``.
    With ``lifting`` each further fractional index is first offered to the
    covers already built for ``x`` (first one that certifies it wins) and
    only becomes a cover of its own if none accepts it.
    """
    frac = fractional_mask(x)
    ones = [int(j) for j in np.flatnonzero(~frac & (x >= 1.0 - INT_TOL))]
    fr = [int(j) for j in np.flatnonzero(frac)]
    out: list[CoverCut] = []
    full = CoverCut(tuple(sorted(ones + fr)), len(ones) + len(fr) - 1)
    if _is_cover(full.indices, ks, sub) and full.violation(x) > VIOLATION_TOL:
        out.append(full)
    single: list[CoverCut] = []
    for f in fr:
        if lifting:
            for i, cut in enumerate(single):
                bigger = lift(cut, f, sub)
                if bigger is not None:
                    single[i] = bigger
                    break
            else:
                bigger = None
            if bigger is not None:
                continue
        cut = CoverCut(tuple(sorted(ones + [f])), len(ones))
        if _is_cover(cut.indices, ks, sub) and cut.violation(x) > VIOLATION_TOL:
            single.append(cut)
    return out + single


def generate(sub: Subproblem, lbs: LowerBoundSet, *, lifting: bool = True) -> list[CoverCut]:
    """Cuts violated by fractional extreme-point pre-images inside the SLUB.

    Besides the fractional-index lifting done while building the covers,
    ``lifting`` also tries every free variable outside a cut, in ascending
    order, keeping each one that passes.
    """
    if lbs.infeasible:
        return []
    ks = eligible_objectives(sub)
    if not ks:
        return []
    s = np.asarray(sub.slub, dtype=np.float64)
    inside = np.all(lbs.points <= s + 1e-6 * (1.0 + np.abs(s)), axis=1)
    free = [int(j) for j in sub.free]
    out: list[CoverCut] = []
    seen: set[tuple[tuple[int, ...], int]] = set()
    for x in lbs.preimages[inside]:
        if not fractional_mask(x).any():
            continue
        for cut in _point_cuts(x, ks, sub, lifting):
            if lifting:
                for g in free:
                    bigger = lift(cut, g, sub)
                    if bigger is not None:
                        cut = bigger
            key = (cut.indices, cut.rhs)
            if key not in seen:
                seen.add(key)
                out.append(cut)
    return out
