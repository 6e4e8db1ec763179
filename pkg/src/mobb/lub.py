"""Local upper bounds of the region not dominated by the incumbent set.

Unbounded components are represented by the box value ``M_k``, chosen larger
than any attainable objective value, so every bound is a finite integer point.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def shift_for_integer(u: Sequence[int]) -> tuple[int, ...]:
    """With integer objectives a new point must lie strictly below ``u``,
    i.e. at most ``u - 1`` componentwise."""
    return tuple(v - 1 for v in u)


def box_for_objectives(C: np.ndarray) -> tuple[int, ...]:
    """``M_k = 1 + sum_j max(0, C_kj)``: one more than the largest value
    objective ``k`` can take on ``[0, 1]^n``."""
    return tuple(int(v) + 1 for v in np.maximum(np.asarray(C), 0).sum(axis=1))


class LocalUpperBoundSet:
    """Redundancy-free set ``N(U)``, updated one point at a time."""

    def __init__(self, box: Sequence[int]) -> None:
        if not all(np.isfinite(v) for v in box):
            raise ValueError("box values must be finite")
        self.box = tuple(int(v) for v in box)
        self._array = np.array([self.box], dtype=np.int64)
        self._shifted: np.ndarray | None = None

    @classmethod
    def init(cls, box: Sequence[int]) -> LocalUpperBoundSet:
        return cls(box)

    def __len__(self) -> int:
        return self._array.shape[0]

    def __iter__(self):
        return iter(self.lubs)

    @property
    def lubs(self) -> list[tuple[int, ...]]:
        return [tuple(row) for row in self._array.tolist()]

    @property
    def p(self) -> int:
        return len(self.box)

    def as_array(self) -> np.ndarray:
        """The bounds as rows of an integer array (do not modify)."""
        return self._array

    def shifted_array(self) -> np.ndarray:
        if self._shifted is None:
            self._shifted = self._array - 1
        return self._shifted

    def copy(self) -> LocalUpperBoundSet:
        other = LocalUpperBoundSet(self.box)
        other._array = self._array.copy()
        return other

    def update(self, z: Sequence[int]) -> None:
        """Account for a new incumbent image ``z``."""
        z = np.asarray([int(v) for v in z], dtype=np.int64)
        if z.shape[0] != self.p:
            raise ValueError("dimension mismatch")
        if np.any(z > np.asarray(self.box)):
            raise ValueError(f"point {tuple(z.tolist())} lies outside the box {self.box}")
        L = self.as_array()
        hit = np.all(z < L, axis=1)
        if not hit.any():
            return
        keep = L[~hit]
        # every removed bound spawns p projections: u with u_k replaced by z_k
        H = L[hit]
        cand = np.repeat(H, self.p, axis=0)
        k = np.tile(np.arange(self.p), H.shape[0])
        cand[np.arange(cand.shape[0]), k] = z[k]
        cand = np.unique(cand, axis=0)
        below_keep = np.zeros(cand.shape[0], dtype=bool)
        if keep.shape[0]:
            below_keep = np.all(cand[:, None, :] <= keep[None, :, :], axis=2).any(axis=1)
        # rows are distinct after unique, so a weakly-dominating other row is a
        # strict superset in at least one component
        pair = np.all(cand[:, None, :] <= cand[None, :, :], axis=2)
        np.fill_diagonal(pair, False)
        new = cand[~(below_keep | pair.any(axis=1))]
        self._array = np.concatenate([keep, new])
        self._shifted = None


def update_with_point(lubset: LocalUpperBoundSet, z: Sequence[int]) -> LocalUpperBoundSet:
    """Functional form: returns an updated copy."""
    out = lubset.copy()
    out.update(z)
    return out
