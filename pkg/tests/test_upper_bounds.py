import random

from hypothesis import given
from hypothesis import strategies as st

from mobb.geometry import dominates, pareto_filter
from mobb.upper_bounds import (
    FeasibleSolution,
    UpperBoundSet,
    front_from_csv,
    front_to_csv,
    front_to_json,
    reported_image,
)


def _set(*imgs):
    U = UpperBoundSet()
    for z in imgs:
        U.insert(FeasibleSolution(z, ()))
    return U


def test_insert_examples():
    U = _set((1, 4), (4, 1))
    rep = U.insert(FeasibleSolution((2, 2), ()))
    assert rep.accepted and rep.removed == []

    U = _set((2, 2))
    assert not U.insert(FeasibleSolution((3, 3), ())).accepted

    U = _set((1, 4), (4, 1))
    rep = U.insert(FeasibleSolution((1, 1), ()))
    assert rep.accepted and sorted(rep.removed) == [(1, 4), (4, 1)]
    assert U.images() == [(1, 1)]


def test_duplicate_image_keeps_first_preimage():
    U = UpperBoundSet()
    U.insert(FeasibleSolution((1, 2), (1, 0)))
    rep = U.insert(FeasibleSolution((1, 2), (0, 1)))
    assert not rep.accepted and rep.removed == []
    assert U.solutions[0].preimage == (1, 0)


pts = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9), st.integers(0, 9)), max_size=40)


@given(pts, st.randoms())
def test_result_is_pareto_filter_and_order_free(points, rnd):
    U = _set(*points)
    assert sorted(U.images()) == pareto_filter(points)
    shuffled = list(points)
    rnd.shuffle(shuffled)
    assert sorted(_set(*shuffled).images()) == sorted(U.images())
    imgs = U.images()
    assert len(set(imgs)) == len(imgs)
    assert not any(dominates(a, b) for a in imgs for b in imgs)


def test_csv_and_json_round_trip():
    sols = [FeasibleSolution((-5, 3), (1, 0, 1)), FeasibleSolution((-7, 1), (0, 1, 1))]
    text = front_to_csv(sols, (True, False))
    lines = text.splitlines()
    assert lines[0] == "z1,z2,x1,x2,x3"
    assert lines[1:] == ["5,3,1,0,1", "7,1,0,1,1"]
    back = front_from_csv(text, 2)
    assert [s.preimage for s in back] == [(1, 0, 1), (0, 1, 1)]
    assert [reported_image(s.image, (True, False)) for s in back] == [(-5, 3), (-7, 1)]
    assert '"objectives": [5, 3]' in front_to_json(sols, (True, False))
    # independent of input order
    assert front_to_csv(list(reversed(sols)), (True, False)) == text
    random.shuffle(sols)
