import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobb.benson import compute
from mobb.instances import MoilpInstance, build_kp, generate_random
from mobb.lub import LocalUpperBoundSet, box_for_objectives
from mobb.oracle import feasible_points
from mobb.probing import (
    ProbeOutcome,
    ProbingConfig,
    ProbingMode,
    WitnessCache,
    inspection_fix,
    probe_node,
    probe_variable,
    should_probe,
)
from mobb.subproblem import FREE, Subproblem


def test_should_probe_examples():
    assert should_probe((5, 9, 7), (8, 9, 7))
    assert not should_probe((8, 9, 7), (8, 9, 7))
    assert should_probe((8, 9, 7), None)
    assert should_probe((8, 9, 7), (8, 9, 7), always=True)


def fx(*vals):
    return np.array(vals, dtype=np.int8)


def test_inspection_examples():
    G, h = np.array([[2, 3]]), np.array([4])
    fixed, bad = inspection_fix(G, h, fx(1, FREE))
    assert not bad and fixed.tolist() == [1, 0]
    # x1 + x2 >= 2 written as -x1 - x2 <= -2
    G, h = np.array([[-1, -1]]), np.array([-2])
    fixed, bad = inspection_fix(G, h, fx(1, FREE))
    assert not bad and fixed.tolist() == [1, 1]
    assert inspection_fix(G, h, fx(0, FREE))[1]
    assert inspection_fix(G, h, fx(FREE, 0))[1]
    # knapsack already full: every other positive-weight item goes to zero
    G, h = np.array([[3, 4, 2, 5, 1]]), np.array([7])
    fixed, bad = inspection_fix(G, h, fx(1, 1, FREE, FREE, FREE))
    assert not bad and fixed.tolist() == [1, 1, 0, 0, 0]


def _kp_sub(w, cap, values, fixed=None):
    inst = build_kp(w, cap, values)
    sub = Subproblem.root(inst, box_for_objectives(inst.C))
    if fixed is not None:
        sub = sub.derive(fixed=np.array(fixed, dtype=np.int8))
    return inst, sub


def test_witness_cache_skips_the_lp():
    _inst, sub = _kp_sub([2, 3, 4], 5, [[1, 2, 3], [3, 2, 1]])
    lo, hi = sub.bounds()
    cache = WitnessCache(last1=np.array([1.0, 0.0, 0.0]))
    counter = [0]
    out = probe_variable(sub, 0, 1, ProbingMode.VF, cache, lo, hi, counter=counter)
    assert out is ProbeOutcome.FEASIBLE and counter == [0]
    out = probe_variable(sub, 1, 1, ProbingMode.VF, cache, lo, hi, counter=counter)
    assert out is ProbeOutcome.FEASIBLE and counter == [1]
    assert cache.last1[1] == pytest.approx(1.0)


def test_infeasible_one_fixes_to_zero():
    # x1 = 1 forces x2 = x3 = 1 via the >= row, which breaks the knapsack row
    inst = MoilpInstance([[1, 1, 1], [1, 2, 3]], [[4, 3, 3], [-1, 1, 1]], ("<=", ">="), [8, 1])
    sub = Subproblem.root(inst, box_for_objectives(inst.C))
    lo, hi = sub.bounds()
    out = probe_variable(sub, 0, 1, ProbingMode.VF, WitnessCache(), lo, hi)
    assert out is ProbeOutcome.INFEASIBLE
    sub2, res = probe_node(sub, ProbingConfig(ProbingMode.VF))
    assert res.fixed_to_0 == [0] and sub2.fixed[0] == 0


def test_vfd_dominated_probe():
    # two objectives, two variables, both costs positive: x = (0, 0) has image (0, 0)
    inst = MoilpInstance([[5, 1], [1, 5]], np.zeros((0, 2)), (), [])
    lubs = LocalUpperBoundSet.init(box_for_objectives(inst.C))
    lubs.update((0, 0))
    sub = Subproblem.root(inst, lubs.box)
    lo, hi = sub.bounds()
    w = np.ones(2)
    out = probe_variable(sub, 0, 1, ProbingMode.VFD, WitnessCache(), lo, hi,
                         shifted_lubs=lubs.shifted_array(), weights=w)
    assert out is ProbeOutcome.DOMINATED
    # brute force: every completion with x0 = 1 is weakly dominated by (0, 0)
    for x1 in (0, 1):
        img = inst.image([1, x1])
        assert all(a >= 0 for a in img)


def test_probe_node_examples():
    inst, sub = _kp_sub([2, 3, 4], 9, [[1, 2, 3], [3, 2, 1]])
    sub2, res = probe_node(sub, ProbingConfig(ProbingMode.VF))
    assert res.fixed_to_0 == [] and res.fixed_to_1 == [] and not res.node_infeasible
    assert sub2 is sub

    inst = MoilpInstance([[1, 1], [2, 1]], [[1, 1], [1, -1]], ("<=", "="), [2, 1])
    sub = Subproblem.root(inst, box_for_objectives(inst.C))
    sub = sub.derive(fixed=np.array([FREE, 1], dtype=np.int8))
    _, res = probe_node(sub, ProbingConfig(ProbingMode.VF))
    assert res.node_infeasible

    inst, sub = _kp_sub([2, 3], 4, [[1, 2], [2, 1]], fixed=[1, FREE])
    sub2, res = probe_node(sub, ProbingConfig(ProbingMode.VF))
    assert res.fixed_to_0 == [1]
    assert res.new_integer_solution is not None
    assert res.new_integer_solution.preimage == (1, 0)
    assert res.new_integer_solution.image == inst.image([1, 0])


def test_none_mode_runs_only_inspection():
    _inst, sub = _kp_sub([2, 3], 4, [[1, 2], [2, 1]], fixed=[1, FREE])
    _, res = probe_node(sub, ProbingConfig(ProbingMode.NONE))
    assert res.fixed_to_0 == [1] and res.lps == 0


def test_weights_validation():
    with pytest.raises(ValueError):
        ProbingConfig(ProbingMode.VFD, (0.0, 0.0))
    with pytest.raises(ValueError):
        ProbingConfig(ProbingMode.VF, (1.0, -1.0))


@settings(max_examples=60)
@given(st.sampled_from([("kp", 3, 8), ("kp", 2, 9), ("uflp", 3, (2, 2)), ("cflp", 3, (2, 2))]),
       st.integers(0, 10_000), st.sampled_from([ProbingMode.VF, ProbingMode.VFD]), st.data())
def test_fixings_never_cut_off_a_relevant_completion(case, seed, mode, data):
    kind, p, size = case
    inst = generate_random(kind, p, size, seed)
    rng = np.random.default_rng(seed)
    X, Y = feasible_points(inst)
    box = box_for_objectives(inst.C)
    lubs = LocalUpperBoundSet(box)
    # a random incumbent set drawn from feasible images
    for idx in rng.choice(len(X), size=min(len(X), data.draw(st.integers(0, 4))), replace=False):
        lubs.update(Y[idx])
    fixed = np.where(rng.random(inst.n) < 0.2, rng.integers(0, 2, inst.n), FREE).astype(np.int8)
    lo_y, hi_y = Y.min(axis=0), Y.max(axis=0)
    s = tuple(int(min(b, rng.integers(l, h + 2))) for l, h, b in zip(lo_y, hi_y, box))
    sub = Subproblem.root(inst, box).derive(fixed=fixed, slub=s)
    lbs = compute(sub.relaxation())
    _out, res = probe_node(sub, ProbingConfig(mode), lbs=None if lbs.infeasible else lbs,
                          shifted_lubs=lubs.shifted_array(), weights=np.ones(p))
    shifted = lubs.shifted_array()
    node = np.all((fixed == FREE) | (X == fixed), axis=1) & np.all(Y <= np.asarray(s), axis=1)
    if mode is ProbingMode.VFD:
        # potentially new: strictly inside some local upper bound
        node &= np.any(np.all(Y[:, None, :] <= shifted[None, :, :], axis=2), axis=1)
    if res.node_infeasible:
        assert not node.any()
        return
    for j in res.fixed_to_0:
        assert not np.any(node & (X[:, j] == 1))
    for j in res.fixed_to_1:
        assert not np.any(node & (X[:, j] == 0))
