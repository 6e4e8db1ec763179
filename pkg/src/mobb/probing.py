"""Variable fixing at node creation.

Three sources of fixings are combined: bound tightening on the integer rows
(inspection), LP feasibility of ``x_i = v`` (VF), and, for VFD, a
weighted-sum test showing that every completion with ``x_i = v`` lies in the
part of objective space that is already dominated.
"""
from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .benson import LowerBoundSet
from .geometry import dominates
from .lp import OPT_TOL, LpStatus, solve_arrays
from .subproblem import FREE, Subproblem
from .upper_bounds import FeasibleSolution


class ProbingMode(enum.Enum):
    NONE = "none"
    VF = "vf"
    VFD = "vfd"


class ProbeOutcome(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    DOMINATED = "dominated"


@dataclass(frozen=True)
class ProbingConfig:
    mode: ProbingMode = ProbingMode.VF
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.weights is not None:
            w = np.asarray(self.weights)
            if np.any(w < 0) or (self.mode is ProbingMode.VFD and not np.any(w > 0)):
                raise ValueError("probing weights must be nonnegative and not all zero")


@dataclass
class WitnessCache:
    last0: np.ndarray | None = None
    last1: np.ndarray | None = None

    def get(self, v: int) -> np.ndarray | None:
        return self.last1 if v else self.last0


@dataclass
class FixationResult:
    fixed_to_0: list[int] = field(default_factory=list)
    fixed_to_1: list[int] = field(default_factory=list)
    node_infeasible: bool = False
    new_integer_solution: FeasibleSolution | None = None
    lps: int = 0


def should_probe(s: Sequence[int], parent_s: Sequence[int] | None, *, always: bool = False) -> bool:
    """Probe when the objective bound got strictly tighter, at the root
    (``parent_s is None``) and whenever ``always`` is set (NOB)."""
    if always or parent_s is None:
        return True
    return dominates(tuple(s), tuple(parent_s))


def inspection_fix(G: np.ndarray, h: np.ndarray, fixed: np.ndarray) -> tuple[np.ndarray, bool]:
    """Minimum-activity bound tightening on ``G x <= h`` until nothing changes.

    Returns the new fixing vector and whether a contradiction was found.
    Exact integer arithmetic throughout.
    """
    fixed = fixed.copy()
    if G.shape[0] == 0:
        return fixed, False
    while True:
        free = fixed == FREE
        one = fixed == 1
        minact = G[:, one].sum(axis=1) + np.minimum(G[:, free], 0).sum(axis=1)
        slack = h - minact
        if np.any(slack < 0):
            return fixed, True
        Gf = G[:, free]
        forced = np.abs(Gf) > slack[:, None]
        if not forced.any():
            return fixed, False
        to0 = (forced & (Gf > 0)).any(axis=0)
        to1 = (forced & (Gf < 0)).any(axis=0)
        if np.any(to0 & to1):
            return fixed, True
        idx = np.flatnonzero(free)
        fixed[idx[to0]] = 0
        fixed[idx[to1]] = 1


def _witness_ok(sub: Subproblem, x, i: int, v: int, lo, hi) -> bool:
    return x is not None and abs(x[i] - v) <= 1e-6 and sub.relaxation_feasible(x, lo, hi)


def _any_witness(W: np.ndarray, i: int, v: int, lo, hi, tol: float = 1e-7) -> bool:
    """Some row of ``W`` (already known to satisfy the rows) has ``x_i = v``
    and respects the bounds."""
    if W.shape[0] == 0:
        return False
    ok = (np.abs(W[:, i] - v) <= 1e-6) & np.all((W >= lo - tol) & (W <= hi + tol), axis=1)
    return bool(ok.any())


def probe_variable(sub: Subproblem, i: int, v: int, mode: ProbingMode, cache: WitnessCache,
                   lo: np.ndarray, hi: np.ndarray, *, lbs: LowerBoundSet | None = None,
                   shifted_lubs: np.ndarray | None = None, weights: np.ndarray | None = None,
                   counter: list[int] | None = None, witnesses: np.ndarray | None = None) -> ProbeOutcome:
    """Test ``x_i = v`` against the relaxation with bounds ``lo``/``hi``.

    The LP is skipped when a cached vector or a bound-set pre-image already
    shows ``x_i = v`` is feasible.  ``witnesses`` may pass those pre-images
    pre-filtered by row feasibility; ``counter`` (a one-element list) is
    incremented per LP solved.
    """
    if _witness_ok(sub, cache.get(v), i, v, lo, hi):
        return ProbeOutcome.FEASIBLE
    if witnesses is None and lbs is not None and not lbs.infeasible:
        witnesses = lbs.preimages[sub.rows_satisfied(lbs.preimages)]
    if witnesses is not None and _any_witness(witnesses, i, v, lo, hi):
        return ProbeOutcome.FEASIBLE
    rel = sub.relaxation()
    lo2, hi2 = lo.copy(), hi.copy()
    lo2[i] = hi2[i] = float(v)
    if mode is ProbingMode.VFD:
        c = np.ascontiguousarray(weights @ rel.C)
    else:
        c = np.zeros(rel.n)
    sol = solve_arrays(c, rel.A, rel.sense, rel.b, lo2, hi2)
    if counter is not None:
        counter[0] += 1
    if sol.status is LpStatus.INFEASIBLE:
        return ProbeOutcome.INFEASIBLE
    if mode is ProbingMode.VFD and shifted_lubs is not None:
        zstar = sol.objective_value
        capped = np.minimum(shifted_lubs, np.asarray(sub.slub))
        tol = OPT_TOL * (1.0 + abs(zstar)) + 1e-9
        if not np.any(capped @ weights >= zstar - tol):
            return ProbeOutcome.DOMINATED
    if v:
        cache.last1 = sol.x
    else:
        cache.last0 = sol.x
    return ProbeOutcome.FEASIBLE


def probe_node(sub: Subproblem, cfg: ProbingConfig, *, lbs: LowerBoundSet | None = None,
               shifted_lubs: np.ndarray | None = None, weights: Sequence[float] | None = None,
               cache: WitnessCache | None = None) -> tuple[Subproblem, FixationResult]:
    """Inspection to a fixed point, then one pass of probes in ascending index
    order, value 0 before 1.  Returns the tightened subproblem."""
    res = FixationResult()
    cache = cache or WitnessCache()
    G, h = sub.le_rows()
    fixed, bad = inspection_fix(G, h, sub.fixed)
    if bad:
        res.node_infeasible = True
        return sub, res
    if cfg.mode is not ProbingMode.NONE:
        w = None
        if cfg.mode is ProbingMode.VFD:
            w = np.asarray(weights if weights is not None else (cfg.weights or np.ones(sub.inst.p)), dtype=np.float64)
        lo = np.where(fixed == 1, 1.0, 0.0)
        hi = np.where(fixed == 0, 0.0, 1.0)
        counter = [0]
        witnesses = None
        if lbs is not None and not lbs.infeasible:
            witnesses = lbs.preimages[sub.rows_satisfied(lbs.preimages)]
        for i in np.flatnonzero(fixed == FREE):
            i = int(i)
            o0, o1 = (
                probe_variable(sub, i, v, cfg.mode, cache, lo, hi, shifted_lubs=shifted_lubs,
                               weights=w, counter=counter, witnesses=witnesses)
                for v in (0, 1)
            )
            if o0 is not ProbeOutcome.FEASIBLE and o1 is not ProbeOutcome.FEASIBLE:
                res.node_infeasible = True
                break
            if o0 is not ProbeOutcome.FEASIBLE:
                fixed[i] = 1
                lo[i] = 1.0
            elif o1 is not ProbeOutcome.FEASIBLE:
                fixed[i] = 0
                hi[i] = 0.0
        res.lps = counter[0]
        if res.node_infeasible:
            return sub, res
    before = sub.fixed
    res.fixed_to_0 = [int(j) for j in np.flatnonzero((before == FREE) & (fixed == 0))]
    res.fixed_to_1 = [int(j) for j in np.flatnonzero((before == FREE) & (fixed == 1))]
    out = sub.derive(fixed=fixed) if (res.fixed_to_0 or res.fixed_to_1) else sub
    if not np.any(fixed == FREE):
        x = fixed.astype(np.int64)
        if sub.inst.is_feasible(x):
            res.new_integer_solution = FeasibleSolution(sub.inst.image(x), tuple(int(v) for v in x))
    return out, res
