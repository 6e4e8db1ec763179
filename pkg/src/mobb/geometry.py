"""Dominance relations and ideal/nadir points in objective space.

Points are plain tuples.  Components are integers, or ``math.inf`` where an
unbounded coordinate has to be expressed; Python's ordering already treats
``inf`` as larger than every finite value, which is exactly the extended
arithmetic needed here.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence

Point = tuple


def _check_dims(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def weakly_dominates(a: Sequence, b: Sequence) -> bool:
    """``a <= b`` componentwise."""
    _check_dims(a, b)
    return all(x <= y for x, y in zip(a, b))


def dominates(a: Sequence, b: Sequence) -> bool:
    """``a`` weakly dominates ``b`` and differs from it."""
    _check_dims(a, b)
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def pareto_filter(points: Iterable[Sequence]) -> list[Point]:
    """Nondominated subset of ``points``, duplicates collapsed, sorted
    lexicographically."""
    # After a lexicographic sort a point can only be dominated by an earlier one.
    front: list[Point] = []
    for pt in sorted({tuple(p) for p in points}):
        if not any(weakly_dominates(f, pt) for f in front):
            front.append(pt)
    return front


def ideal_point(points: Iterable[Sequence]) -> Point:
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("ideal point of an empty set")
    dim = len(pts[0])
    for p in pts:
        _check_dims(pts[0], p)
    return tuple(min(p[k] for p in pts) for k in range(dim))


def nadir_point(points: Iterable[Sequence]) -> Point:
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("nadir point of an empty set")
    dim = len(pts[0])
    for p in pts:
        _check_dims(pts[0], p)
    return tuple(max(p[k] for p in pts) for k in range(dim))
