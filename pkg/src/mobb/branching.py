"""Objective-space branching: which shifted local upper bounds a node still
has to explore, and how they are grouped into subproblem bounds."""
from __future__ import annotations

import enum
from collections.abc import Sequence

import numpy as np
from numba import njit

from .benson import COVER_TOL, LowerBoundSet
from .lub import LocalUpperBoundSet


class ObMode(enum.Enum):
    NOB = "nob"
    CB = "cb"
    FOB = "fob"


def dominated_lubs(lbs: LowerBoundSet, lubset: LocalUpperBoundSet) -> list[tuple[int, ...]]:
    """Shifted local upper bounds lying in ``lbs + R^p_>=``, lexicographically
    sorted.  An empty result means the node is fathomed by dominance."""
    if lbs.infeasible:
        return []
    shifted = lubset.shifted_array()
    hit = shifted[lbs.covers_many(shifted)]
    return [tuple(row) for row in np.unique(hit, axis=0).tolist()]


@njit(cache=True)
def _lex_less(a, b):
    for k in range(a.shape[0]):
        if a[k] != b[k]:
            return a[k] < b[k]
    return False


@njit(cache=True)
def _fob_kernel(work, normals, thresh):
    """``work`` is lexicographically sorted and duplicate free."""
    n, p = work.shape
    nf = normals.shape[0]
    mid = np.empty(p)
    while n > 1:
        found = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                for k in range(p):
                    mid[k] = min(work[i, k], work[j, k])
                ok = True
                for f in range(nf):
                    s = 0.0
                    for k in range(p):
                        s += normals[f, k] * mid[k]
                    if s < thresh[f]:
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if found:
                break
        if not found:
            break
        nadir = np.maximum(work[i], work[j])
        rest = np.empty((n - 2, p), dtype=work.dtype)
        q = 0
        for r in range(n):
            if r != i and r != j:
                rest[q] = work[r]
                q += 1
        pos = 0
        while pos < n - 2 and _lex_less(rest[pos], nadir):
            pos += 1
        dup = pos < n - 2 and not _lex_less(nadir, rest[pos])
        if dup:
            work = rest
            n -= 2
        else:
            out = np.empty((n - 1, p), dtype=work.dtype)
            out[:pos] = rest[:pos]
            out[pos] = nadir
            out[pos + 1:] = rest[pos:]
            work = out
            n -= 1
    return work


def fob_merge(S: Sequence[Sequence[int]], lbs: LowerBoundSet) -> list[tuple[int, ...]]:
    """Merge pairs whose ideal point is covered by ``lbs`` into their nadir
    point until no such pair is left.

    Pairs are scanned in lexicographic order of the current working list and
    the scan restarts after every merge, which makes the result deterministic.
    """
    if not S:
        raise ValueError("nothing to merge")
    work = np.unique(np.asarray(S, dtype=np.int64).reshape(len(S), -1), axis=0)
    if work.shape[0] > 1 and not lbs.infeasible:
        thresh = lbs.rhs - COVER_TOL * (1.0 + np.abs(lbs.rhs))
        work = _fob_kernel(work, np.ascontiguousarray(lbs.normals, dtype=np.float64), thresh)
    return [tuple(int(v) for v in row) for row in work]


def cone_bound(S: Sequence[Sequence[int]]) -> tuple[int, ...]:
    if not S:
        raise ValueError("cone bound of an empty set")
    return tuple(int(v) for v in np.max(np.asarray(S), axis=0))


def subproblem_bounds(mode: ObMode, S, lbs: LowerBoundSet, parent_slub: Sequence[int]) -> list[tuple[int, ...]]:
    """SLUBs of the children for the given mode, each capped by the parent's."""
    if mode is ObMode.NOB:
        return [tuple(parent_slub)]
    raw = fob_merge(S, lbs) if mode is ObMode.FOB else [cone_bound(S)]
    out = []
    for s in raw:
        capped = tuple(min(a, b) for a, b in zip(s, parent_slub))
        if capped not in out:
            out.append(capped)
    return out
