"""Branch-and-bound driver.

Depth-first and breadth-first search compute a node's lower bound set when the
node is selected.  The best-bound rules (weighted sum, normalized weighted
sum, gap) compute it when the node is created, so the open list can be
ordered by it; the dominance test is then repeated at selection because the
incumbent set may have grown in between.
"""
from __future__ import annotations

import enum
import heapq
import logging
import time
from collections import deque
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cuts as cutgen
from .benson import BoundStatus, LowerBoundSet, compute
from .branching import ObMode, cone_bound, dominated_lubs, fob_merge, subproblem_bounds
from .instances import MoilpInstance
from .lub import LocalUpperBoundSet, box_for_objectives
from .oracle import all_binary
from .probing import ProbingConfig, ProbingMode, probe_node, should_probe
from .subproblem import Subproblem, fractional_mask, is_integral
from .upper_bounds import FeasibleSolution, UpperBoundSet

log = logging.getLogger("mobb")


class NodeRule(enum.Enum):
    DF = "df"
    BF = "bf"
    BBWS = "bbws"
    BBWSN = "bbwsn"
    BBGAP = "bbgap"

    @property
    def bound_at_creation(self) -> bool:
        return self in (NodeRule.BBWS, NodeRule.BBWSN, NodeRule.BBGAP)


class VarRule(enum.Enum):
    MOF = "mof"
    PS = "ps"


@dataclass(frozen=True)
class SolveConfig:
    ob_mode: ObMode = ObMode.FOB
    probing: ProbingConfig = field(default_factory=ProbingConfig)
    node_rule: NodeRule = NodeRule.BBWSN
    var_rule: VarRule = VarRule.MOF
    cuts_enabled: bool = False
    enum_threshold: int = 14
    time_limit: float | None = None
    log_every: int = 0

    def __post_init__(self) -> None:
        if self.enum_threshold < 0:
            raise ValueError("enum_threshold must be nonnegative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    def as_dict(self) -> dict:
        return {
            "ob_mode": self.ob_mode.value,
            "probing": self.probing.mode.value,
            "node_rule": self.node_rule.value,
            "var_rule": self.var_rule.value,
            "cuts_enabled": self.cuts_enabled,
            "enum_threshold": self.enum_threshold,
            "time_limit": self.time_limit,
        }


@dataclass
class SolveStats:
    nodes_explored: int = 0
    nodes_created: int = 0
    lps_relaxation: int = 0
    lps_probing: int = 0
    time_total: float = 0.0
    time_lbs: float = 0.0
    time_probing: float = 0.0
    time_gap_update: float = 0.0
    fathomed_infeasible: int = 0
    fathomed_optimality: int = 0
    fathomed_dominance: int = 0
    gap_zero_dropped: int = 0
    enumerated_leaves: int = 0
    leaf_evaluations: int = 0
    variables_fixed: int = 0
    cuts_generated: int = 0
    max_open: int = 0
    complete: bool = True

    def as_dict(self) -> dict:
        return asdict(self)

    def counters(self) -> dict:
        """Everything except wall-clock timings (stable across reruns)."""
        return {k: v for k, v in asdict(self).items() if not k.startswith("time_")}


@dataclass
class SearchNode:
    id: int
    depth: int
    sub: Subproblem
    parent_slub: tuple[int, ...] | None
    lbs: LowerBoundSet | None = None
    score: float = 0.0
    gap_old: float = 0.0
    parent_score: float | None = None

    def __lt__(self, other: SearchNode) -> bool:
        return self.id < other.id


# ---------------------------------------------------------------------------
# trace records (filled only when a trace object is passed to solve)


@dataclass
class ObRecord:
    node_id: int
    S: list[tuple[int, ...]]
    merged: list[tuple[int, ...]]
    slubs: list[tuple[int, ...]]
    lbs: LowerBoundSet
    fathomed_dominance: bool
    # shifted local upper bounds the node was tested against
    shifted: np.ndarray | None = None


@dataclass
class ProbeRecord:
    node_id: int
    fixed_before: np.ndarray
    slub: tuple[int, ...]
    front: list[tuple[int, ...]]
    fixed_to_0: list[int]
    fixed_to_1: list[int]
    infeasible: bool


@dataclass
class CutRecord:
    fixed: np.ndarray
    slub: tuple[int, ...]
    cut: cutgen.CoverCut
    violated_by_generator: bool


@dataclass
class SearchTrace:
    ob: list[ObRecord] = field(default_factory=list)
    probes: list[ProbeRecord] = field(default_factory=list)
    cuts: list[CutRecord] = field(default_factory=list)
    gap_selections: list[tuple[float, float]] = field(default_factory=list)
    gap_updates: list[tuple[int, float, float]] = field(default_factory=list)
    leaf_sizes: list[int] = field(default_factory=list)
    # (parent score, child score) pairs under the weighted-sum rules
    scores: list[tuple[float, float]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# node measures


def score_ws(lbs: LowerBoundSet, lam: Sequence[float], ranges: Sequence[float] | None = None) -> float:
    """Minimum weighted sum over the bound set; ``ranges`` switches on
    normalization (``lam_k / range_k``)."""
    if lbs.infeasible:
        raise ValueError("no score for an infeasible bound set")
    w = np.asarray(lam, dtype=np.float64)
    if ranges is not None:
        w = w / np.asarray(ranges, dtype=np.float64)
    return lbs.min_weighted_sum(w)[1]


def gap(lbs: LowerBoundSet, lubset: LocalUpperBoundSet, ranges: Sequence[float] | None = None) -> float:
    """Largest distance from a covered local upper bound to the bound set.

    The distance to an extreme point only counts how far ``u`` sticks out
    above it, component by component, in normalized units.  Lowering ``u``
    can therefore never increase it, which keeps the gap monotone as the
    incumbent set grows.
    """
    if lbs.infeasible:
        return 0.0
    U = lubset.as_array().astype(np.float64)
    covered = U[lbs.covers_many(U)]
    if covered.shape[0] == 0:
        return 0.0
    r = np.ones(U.shape[1]) if ranges is None else np.asarray(ranges, dtype=np.float64)
    D = np.maximum(covered[:, None, :] - lbs.points[None, :, :], 0.0) / r
    return float(np.sqrt((D * D).sum(axis=2)).min(axis=1).max())


def normalization_ranges(lbs: LowerBoundSet) -> np.ndarray:
    if lbs.infeasible:
        return np.ones(0)
    P = lbs.points
    return np.maximum(1.0, P.max(axis=0) - P.min(axis=0))


def select_gap_node(heap: list, recompute) -> SearchNode:
    """Lazy largest-gap selection.

    ``heap`` holds ``(-gap_old, id, node)``; ``recompute(node)`` returns the
    current gap.  The top node is accepted once its fresh gap is at least the
    stale gap of the runner-up, which is an upper bound on that node's fresh
    gap because gaps only shrink.
    """
    while True:
        _, _, node = heapq.heappop(heap)
        g_new = recompute(node)
        if not heap or g_new >= -heap[0][0]:
            node.gap_old = g_new
            return node
        node.gap_old = g_new
        heapq.heappush(heap, (-g_new, node.id, node))


def branch_variable(lbs: LowerBoundSet | None, sub: Subproblem, rule: VarRule = VarRule.MOF) -> int:
    free = sub.free
    if free.size == 0:
        raise ValueError("no free variable to branch on")
    if rule is VarRule.PS:
        facilities = [j for j in free if sub.inst.labels[j] == "facility"]
        if facilities:
            free = np.asarray(facilities)
    if lbs is None or lbs.infeasible:
        return int(free[0])
    s = np.asarray(sub.slub, dtype=np.float64)
    inside = np.all(lbs.points <= s + 1e-6 * (1.0 + np.abs(s)), axis=1)
    X = lbs.preimages[inside][:, free]
    if X.shape[0] == 0:
        return int(free[0])
    counts = fractional_mask(X).sum(axis=0)
    closeness = np.abs(X.mean(axis=0) - 0.5)
    # lexsort: last key is primary
    order = np.lexsort((free, closeness, -counts))
    return int(free[order[0]])


def enumerate_leaf(sub: Subproblem) -> list[FeasibleSolution]:
    """All completions of the free variables that satisfy the original rows
    and the node's objective bound, Pareto-filtered."""
    inst = sub.inst
    free = sub.free
    X = np.tile(np.where(sub.fixed == 1, 1, 0).astype(np.int64), (1 << free.size, 1))
    if free.size:
        X[:, free] = all_binary(free.size)
    act = X @ inst.A.T if inst.m else np.zeros((X.shape[0], 0), dtype=np.int64)
    ok = np.ones(X.shape[0], dtype=bool)
    for i, s in enumerate(inst.senses):
        if s == "<=":
            ok &= act[:, i] <= inst.b[i]
        elif s == ">=":
            ok &= act[:, i] >= inst.b[i]
        else:
            ok &= act[:, i] == inst.b[i]
    Z = X @ inst.C.T
    ok &= np.all(Z <= np.asarray(sub.slub), axis=1)
    X, Z = X[ok], Z[ok]
    if X.shape[0] == 0:
        return []
    order = np.lexsort(Z.T[::-1])
    out: list[FeasibleSolution] = []
    best: list[np.ndarray] = []
    for i in order:
        z = Z[i]
        if any(np.all(b <= z) for b in best):
            continue
        best.append(z)
        out.append(FeasibleSolution(tuple(int(v) for v in z), tuple(int(v) for v in X[i])))
    return out


# ---------------------------------------------------------------------------


class _Solver:
    def __init__(self, inst: MoilpInstance, cfg: SolveConfig, trace: SearchTrace | None) -> None:
        self.inst = inst
        self.cfg = cfg
        self.trace = trace
        self.box = box_for_objectives(inst.C)
        self.U = UpperBoundSet()
        self.lubs = LocalUpperBoundSet(self.box)
        self.stats = SolveStats()
        self.ranges = np.ones(inst.p)
        self.next_id = 0
        self.start = time.perf_counter()
        self.deadline = None if cfg.time_limit is None else self.start + cfg.time_limit
        rule = cfg.node_rule
        if rule is NodeRule.DF:
            self.open: object = []
        elif rule is NodeRule.BF:
            self.open = deque()
        else:
            self.open = []

    # -- bookkeeping ---------------------------------------------------------

    def weights(self) -> np.ndarray:
        return 1.0 / self.ranges

    def insert(self, sol: FeasibleSolution) -> None:
        if self.U.insert(sol).accepted:
            self.lubs.update(sol.image)

    def harvest(self, lbs: LowerBoundSet) -> bool:
        """Push integer pre-images into the incumbent set.  Returns whether
        the first pre-image was integer and feasible (used for singletons)."""
        first_ok = False
        for i, x in enumerate(lbs.preimages):
            if not is_integral(x):
                continue
            xi = np.rint(x).astype(np.int64)
            if not self.inst.is_feasible(xi):
                continue
            self.insert(FeasibleSolution(self.inst.image(xi), tuple(int(v) for v in xi)))
            if i == 0:
                first_ok = True
        return first_ok

    def new_node(self, sub: Subproblem, depth: int, parent_slub) -> SearchNode:
        node = SearchNode(self.next_id, depth, sub, parent_slub)
        self.next_id += 1
        self.stats.nodes_created += 1
        return node

    def bound(self, node: SearchNode) -> bool:
        """Compute the bound set and apply the infeasibility and optimality
        tests.  Returns whether the node survives."""
        t0 = time.perf_counter()
        lbs = compute(node.sub.relaxation())
        self.stats.time_lbs += time.perf_counter() - t0
        self.stats.lps_relaxation += lbs.lp_count
        self.stats.nodes_explored += 1
        node.lbs = lbs
        if node.id == 0 and not lbs.infeasible:
            self.ranges = normalization_ranges(lbs)
        if lbs.infeasible:
            self.stats.fathomed_infeasible += 1
            return False
        integral = self.harvest(lbs)
        if lbs.status is BoundStatus.SINGLETON and integral:
            self.stats.fathomed_optimality += 1
            return False
        return True

    def push(self, node: SearchNode) -> None:
        rule = self.cfg.node_rule
        if rule.bound_at_creation:
            if not self.bound(node):
                return
            if rule is NodeRule.BBGAP:
                t0 = time.perf_counter()
                node.gap_old = gap(node.lbs, self.lubs, self.ranges)
                self.stats.time_gap_update += time.perf_counter() - t0
                if node.gap_old <= 0.0:
                    self.stats.gap_zero_dropped += 1
                    self.stats.nodes_explored -= 1
                    return
                heapq.heappush(self.open, (-node.gap_old, node.id, node))
            else:
                lam = np.ones(self.inst.p) if rule is NodeRule.BBWS else self.weights()
                node.score = node.lbs.min_weighted_sum(lam)[1]
                if self.trace is not None and node.parent_score is not None:
                    self.trace.scores.append((node.parent_score, node.score))
                heapq.heappush(self.open, (node.score, node.id, node))
        else:
            self.open.append(node)
        self.stats.max_open = max(self.stats.max_open, len(self.open))

    def pop(self) -> SearchNode:
        rule = self.cfg.node_rule
        if rule is NodeRule.DF:
            return self.open.pop()
        if rule is NodeRule.BF:
            return self.open.popleft()
        if rule is NodeRule.BBGAP:
            if self.trace is not None:
                eager = max(self._gap_now(entry[2], record=False) for entry in self.open)
            node = select_gap_node(self.open, self._gap_now)
            if self.trace is not None:
                self.trace.gap_selections.append((node.gap_old, eager))
            return node
        return heapq.heappop(self.open)[2]

    def _gap_now(self, node: SearchNode, record: bool = True) -> float:
        t0 = time.perf_counter()
        g = gap(node.lbs, self.lubs, self.ranges)
        self.stats.time_gap_update += time.perf_counter() - t0
        if record and self.trace is not None:
            self.trace.gap_updates.append((node.id, node.gap_old, g))
        return g

    def out_of_time(self) -> bool:
        return self.deadline is not None and time.perf_counter() > self.deadline

    # -- main loop -----------------------------------------------------------

    def run(self) -> tuple[UpperBoundSet, SolveStats]:
        root = self.new_node(Subproblem.root(self.inst, self.box), 0, None)
        self.push(root)
        while self.open:
            if self.out_of_time():
                self.stats.complete = False
                break
            node = self.pop()
            if not self.cfg.node_rule.bound_at_creation and not self.bound(node):
                continue
            self.process(node)
            if self.cfg.log_every and self.stats.nodes_explored % self.cfg.log_every == 0:
                log.info("nodes=%d open=%d front=%d", self.stats.nodes_explored, len(self.open), len(self.U))
        self.stats.time_total = time.perf_counter() - self.start
        return self.U, self.stats

    def process(self, node: SearchNode) -> None:
        lbs = node.lbs
        S = dominated_lubs(lbs, self.lubs)
        shifted = self.lubs.shifted_array().copy() if self.trace is not None else None
        if not S:
            self.stats.fathomed_dominance += 1
            if self.trace is not None:
                self.trace.ob.append(ObRecord(node.id, [], [], [], lbs, True, shifted))
            return
        slubs = subproblem_bounds(self.cfg.ob_mode, S, lbs, node.sub.slub)
        if self.trace is not None:
            mode = self.cfg.ob_mode
            merged = (fob_merge(S, lbs) if mode is ObMode.FOB
                      else [cone_bound(S)] if mode is ObMode.CB else [])
            self.trace.ob.append(ObRecord(node.id, S, merged, slubs, lbs, False, shifted))
        for s in slubs:
            self.expand(node, s)

    def expand(self, node: SearchNode, s: tuple[int, ...]) -> None:
        cfg = self.cfg
        sub = node.sub.derive(slub=s)
        if cfg.cuts_enabled:
            new = cutgen.generate(sub, node.lbs)
            if new:
                self.stats.cuts_generated += len(new)
                if self.trace is not None:
                    for c in new:
                        viol = any(c.violation(x) > cutgen.VIOLATION_TOL for x in node.lbs.preimages)
                        self.trace.cuts.append(CutRecord(sub.fixed.copy(), s, c, viol))
                sub = sub.derive(cuts=sub.cuts + tuple(new))
        mode = cfg.probing.mode
        parent_s = None if node.id == 0 else node.sub.slub
        if mode is not ProbingMode.NONE and should_probe(s, parent_s, always=cfg.ob_mode is ObMode.NOB):
            fixed_before = sub.fixed.copy()
            front = self.U.images() if self.trace is not None else []
            t0 = time.perf_counter()
            sub, res = probe_node(sub, cfg.probing, lbs=node.lbs, shifted_lubs=self.lubs.shifted_array(),
                                  weights=self.weights())
            self.stats.time_probing += time.perf_counter() - t0
            self.stats.lps_probing += res.lps
            self.stats.variables_fixed += len(res.fixed_to_0) + len(res.fixed_to_1)
            if self.trace is not None:
                self.trace.probes.append(ProbeRecord(node.id, fixed_before, s, front,
                                                     res.fixed_to_0, res.fixed_to_1, res.node_infeasible))
            if res.node_infeasible:
                self.stats.fathomed_infeasible += 1
                return
            if res.new_integer_solution is not None:
                self.insert(res.new_integer_solution)
        free = sub.free
        if free.size <= cfg.enum_threshold:
            self.stats.enumerated_leaves += 1
            self.stats.leaf_evaluations += 1 << free.size
            if self.trace is not None:
                self.trace.leaf_sizes.append(int(free.size))
            for sol in enumerate_leaf(sub):
                self.insert(sol)
            return
        j = branch_variable(node.lbs, sub, cfg.var_rule)
        for v in (0, 1):
            fixed = sub.fixed.copy()
            fixed[j] = v
            child = self.new_node(sub.derive(fixed=fixed), node.depth + 1, s)
            child.parent_score = node.score
            self.push(child)


def solve(inst: MoilpInstance, cfg: SolveConfig | None = None,
          trace: SearchTrace | None = None) -> tuple[UpperBoundSet, SolveStats]:
    """Compute the nondominated set of ``inst``.

    On a time limit the returned set is partial and ``stats.complete`` is
    false.
    """
    return _Solver(inst, cfg or SolveConfig(), trace).run()
