"""A node problem: the instance plus variable fixings, objective bounds and
inherited cuts, with its LP relaxation and an integer ``<=`` row view."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .benson import Relaxation
from .instances import MoilpInstance

FREE = -1
INT_TOL = 1e-6


@dataclass(frozen=True)
class CoverCut:
    """``sum(x_j for j in indices) <= rhs``."""

    indices: tuple[int, ...]
    rhs: int

    def violation(self, x) -> float:
        return float(np.sum(np.asarray(x)[list(self.indices)])) - self.rhs


@dataclass
class Subproblem:
    inst: MoilpInstance
    box: tuple[int, ...]
    fixed: np.ndarray  # int8 per variable: FREE, 0 or 1
    slub: tuple[int, ...]
    cuts: tuple[CoverCut, ...] = ()
    _rel: Relaxation | None = field(default=None, repr=False, compare=False)

    @classmethod
    def root(cls, inst: MoilpInstance, box: Sequence[int]) -> Subproblem:
        return cls(inst, tuple(box), np.full(inst.n, FREE, dtype=np.int8), tuple(box))

    def derive(self, *, fixed=None, slub=None, cuts=None) -> Subproblem:
        return Subproblem(
            self.inst,
            self.box,
            self.fixed.copy() if fixed is None else fixed,
            self.slub if slub is None else tuple(slub),
            self.cuts if cuts is None else tuple(cuts),
        )

    @property
    def free(self) -> np.ndarray:
        return np.flatnonzero(self.fixed == FREE)

    def bounded_objectives(self) -> list[int]:
        """Objectives whose SLUB component can actually cut something off."""
        return [k for k, (s, m) in enumerate(zip(self.slub, self.box)) if s < m - 1]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.where(self.fixed == 1, 1.0, 0.0)
        hi = np.where(self.fixed == 0, 0.0, 1.0)
        return lo, hi

    def relaxation(self) -> Relaxation:
        if self._rel is None:
            inst = self.inst
            Cf, Af, bf = inst.float_data
            ks = self.bounded_objectives()
            blocks = [Af]
            senses = [inst.sense_codes]
            rhs = [bf]
            if ks:
                blocks.append(Cf[ks])
                senses.append(np.full(len(ks), -1, dtype=np.int64))
                rhs.append(np.array([self.slub[k] for k in ks], dtype=np.float64))
            if self.cuts:
                K = np.zeros((len(self.cuts), inst.n))
                for i, cut in enumerate(self.cuts):
                    K[i, list(cut.indices)] = 1.0
                blocks.append(K)
                senses.append(np.full(len(self.cuts), -1, dtype=np.int64))
                rhs.append(np.array([c.rhs for c in self.cuts], dtype=np.float64))
            lo, hi = self.bounds()
            self._rel = Relaxation(
                Cf,
                np.ascontiguousarray(np.concatenate(blocks)) if len(blocks) > 1 else Af,
                np.concatenate(senses) if len(senses) > 1 else senses[0],
                np.concatenate(rhs) if len(rhs) > 1 else bf,
                lo,
                hi,
            )
        return self._rel

    def with_bounds(self, lo: np.ndarray, hi: np.ndarray) -> Relaxation:
        rel = self.relaxation()
        return Relaxation(rel.C, rel.A, rel.sense, rel.b, lo, hi)

    def le_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """All node rows as integer ``G x <= h`` (equalities split in two)."""
        inst = self.inst
        G, h = [], []
        for a, s, b in zip(inst.A, inst.senses, inst.b):
            if s in ("<=", "="):
                G.append(a)
                h.append(b)
            if s in (">=", "="):
                G.append(-a)
                h.append(-b)
        for k in self.bounded_objectives():
            G.append(inst.C[k])
            h.append(self.slub[k])
        for cut in self.cuts:
            row = np.zeros(inst.n, dtype=np.int64)
            row[list(cut.indices)] = 1
            G.append(row)
            h.append(cut.rhs)
        if not G:
            return np.zeros((0, inst.n), dtype=np.int64), np.zeros(0, dtype=np.int64)
        return np.array(G, dtype=np.int64), np.array(h, dtype=np.int64)

    def rows_satisfied(self, X: np.ndarray, tol: float = 1e-7) -> np.ndarray:
        """Row feasibility of each row of ``X`` (bounds not checked)."""
        rel = self.relaxation()
        X = np.atleast_2d(X)
        if rel.A.shape[0] == 0:
            return np.ones(X.shape[0], dtype=bool)
        act = X @ rel.A.T
        scale = tol * (1.0 + np.abs(rel.b))
        viol = np.where(rel.sense < 0, act - rel.b,
                        np.where(rel.sense > 0, rel.b - act, np.abs(act - rel.b)))
        return np.all(viol <= scale, axis=1)

    def relaxation_feasible(self, x: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float = 1e-7) -> bool:
        """Whether ``x`` satisfies the rows and the given bounds."""
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            return False
        return bool(self.rows_satisfied(x, tol)[0])


def is_integral(x: np.ndarray, tol: float = INT_TOL) -> bool:
    return bool(np.all(np.minimum(np.abs(x), np.abs(x - 1.0)) <= tol))


def fractional_mask(x: np.ndarray, tol: float = INT_TOL) -> np.ndarray:
    return np.minimum(np.abs(x), np.abs(x - 1.0)) > tol
