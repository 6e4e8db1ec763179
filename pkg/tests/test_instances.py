import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mobb.instances import (
    InstanceFormatError,
    MoilpInstance,
    build_cflp,
    build_kp,
    build_uflp,
    generate_random,
    parse_generic,
    read_generic,
    write_generic,
)
from mobb.oracle import brute_force_front, feasible_points


def feasible_set(inst):
    return {x for x in itertools.product((0, 1), repeat=inst.n) if inst.is_feasible(x)}


def test_kp_examples():
    assert feasible_set(build_kp([2], 1, [[1], [1]])) == {(0,)}
    assert feasible_set(build_kp([2, 3], 4, [[1, 1], [2, 2]])) == {(0, 0), (1, 0), (0, 1)}
    with pytest.raises(ValueError):
        build_kp([2, 0], 4, [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        build_kp([2, -1], 4, [[1, 1], [1, 1]])


def test_kp_orientations():
    vals = [[4, 1], [1, 4]]
    mx = build_kp([1, 1], 1, vals)
    mn = build_kp([1, 1], 1, vals, maximize=False)
    assert mx.reported(mx.image([1, 0])) == (4, 1)
    assert mn.image([1, 0]) == (4, 1)
    # maximizing never prefers the empty knapsack, minimizing always does
    assert {s.image for s in brute_force_front(mx)} == {(-4, -1), (-1, -4)}
    assert {s.image for s in brute_force_front(mn)} == {(0, 0)}


def test_uflp_single_facility():
    c = [[[3], [5]], [[2], [7]]]
    inst = build_uflp(c, [[10], [1]])
    front = [s.image for s in brute_force_front(inst)]
    assert front == [(3 + 5 + 10, 2 + 7 + 1)]
    assert inst.indices_with_label("facility") == [0]


@pytest.mark.parametrize("l,r", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_uflp_shape(l, r):
    inst = generate_random("uflp", 3, (l, r), 0)
    assert inst.n == l + r * l
    assert inst.m == r + r * l
    assert inst.senses.count("=") == r


def test_uflp_tiny_front_by_enumeration():
    inst = build_uflp([[[1, 9], [9, 1]], [[5, 5], [5, 5]]], [[1, 1], [1, 20]])
    X, _Y = feasible_points(inst)
    # an assignment row per customer makes every feasible x serve each one exactly once
    assert all(x[2] + x[3] == 1 and x[4] + x[5] == 1 for x in X)
    front = {s.image for s in brute_force_front(inst)}
    # facility 1 alone serves both; opening both gives the cheap assignments
    assert front == {(1 + 9 + 1, 5 + 5 + 1), (1 + 1 + 1 + 1, 5 + 5 + 1 + 20)}


def test_cflp_structure_and_sign():
    inst = build_cflp([[3, 4], [5, 6]], [7, 8], [5, 6], [10, 10])
    assert inst.p == 3 and inst.maximize == (False, False, True)
    assert inst.n == 2 + 4 + 2
    x = [1, 1, 1, 0, 0, 1, 1, 1]
    assert inst.is_feasible(x)
    assert not inst.is_feasible([1, 0, 1, 0, 1, 0, 1, 1])  # 11 units on capacity 10
    stored = inst.image(x)
    assert stored == (3 + 6, 7 + 8, -11)
    assert inst.reported(stored) == (9, 15, 11)


def test_cflp_zero_capacities_keep_the_all_closed_solution():
    inst = build_cflp([[3, 4]], [7, 8], [5], [0, 0])
    assert {s.image for s in brute_force_front(inst)} == {(0, 0, 0)}
    with pytest.raises(ValueError):
        build_cflp([[3, 4]], [7, 8], [0], [5, 5])


def test_cflp_tiny_oracle():
    inst = build_cflp([[2], [3]], [4], [5, 6], [8])
    # one facility of capacity 8 can serve either customer but not both
    front = {inst.reported(s.image) for s in brute_force_front(inst)}
    assert front == {(0, 0, 0), (2, 4, 5), (3, 4, 6)}


@given(st.data())
def test_sign_flag_round_trip(data):
    p = data.draw(st.integers(2, 4))
    n = data.draw(st.integers(1, 6))
    V = np.array(data.draw(st.lists(st.integers(-50, 50), min_size=p * n, max_size=p * n))).reshape(p, n)
    flags = data.draw(st.lists(st.booleans(), min_size=p, max_size=p))
    C = np.where(np.array(flags)[:, None], -V, V)
    inst = MoilpInstance(C, np.zeros((0, n)), (), [], maximize=flags)
    x = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    assert inst.reported(inst.image(x)) == tuple(int(v) for v in V @ np.array(x))


def test_instance_invariants():
    with pytest.raises(ValueError):
        MoilpInstance([[1, 2]], [[1, 1]], ("<=",), [1])
    with pytest.raises(ValueError):
        MoilpInstance(np.zeros((2, 0)), np.zeros((0, 0)), (), [])
    with pytest.raises(ValueError):
        MoilpInstance([[1], [1]], [[1]], ("<",), [1])
    with pytest.raises(ValueError):
        MoilpInstance([[1], [1]], [[1]], ("<=",), [1, 2])


# -- text format --------------------------------------------------------------


def test_minimal_file():
    inst = parse_generic("2 1 1\nmin 3\nmax 4\n<= 1 1\n")
    assert inst.C.tolist() == [[3], [-4]] and inst.maximize == (False, True)
    assert inst.senses == ("<=",) and inst.b.tolist() == [1]


def test_comments_and_tags():
    text = "# header comment\n2 2 0  # p n m\nmin 1 2\nmin 2 1\n\ntags 0:facility 1:assignment\n"
    inst = parse_generic(text)
    assert inst.labels == ("facility", "assignment")


@pytest.mark.parametrize("seed", range(50))
def test_round_trip(seed):
    kind = ("kp", "uflp", "cflp")[seed % 3]
    size = 5 + seed % 7 if kind == "kp" else (1 + seed % 3, 1 + seed % 4)
    p = 3 if kind == "cflp" else 2 + seed % 3
    inst = generate_random(kind, p, size, seed)
    text = write_generic(inst)
    back = parse_generic(text)
    assert back == inst
    assert write_generic(back) == text.replace(f"# {inst.name}\n", "")


def test_read_from_disk(tmp_path):
    inst = generate_random("uflp", 2, (2, 2), 3)
    path = tmp_path / "a.txt"
    path.write_text(write_generic(inst))
    assert read_generic(path) == inst


@pytest.mark.parametrize(
    "text,section",
    [
        ("", "header"),
        ("2 3 1\nmin 1 2 3\n", "objective"),
        ("2 3 2\nmin 1 2 3\nmin 1 1 1\n<= 4 1 1 1\n", "constraint"),
    ],
)
def test_truncated_files_name_the_missing_section(text, section):
    with pytest.raises(InstanceFormatError, match=section):
        parse_generic(text)


@pytest.mark.parametrize(
    "text,line",
    [
        ("2 x 1\n", 1),
        ("2 2\n", 1),
        ("2 2 0\nmin 1 2\n\nmin 1 q\n", 4),
        ("2 2 1\nmin 1 2\nmin 1 2\n< 1 1 1\n", 4),
        ("2 2 1\nmin 1 2\nmin 1 2\n<= 1 1\n", 4),
        ("2 2 0\nmin 1 2\nmin 1 2\ntags 5:facility\n", 4),
        ("2 2 0\nmin 1 2\nmin 1 2\ntags 0:facility\nextra\n", 5),
        ("2 2 0\nfoo 1 2\nmin 1 2\n", 2),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(InstanceFormatError) as err:
        parse_generic(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


# -- generators -----------------------------------------------------------------


@pytest.mark.parametrize("kind,p,size", [("kp", 3, 10), ("uflp", 3, (2, 3)), ("cflp", 3, (2, 3))])
def test_generators_are_deterministic(kind, p, size):
    assert generate_random(kind, p, size, 7) == generate_random(kind, p, size, 7)
    for s in range(10):
        assert generate_random(kind, p, size, s) != generate_random(kind, p, size, s + 100)


@pytest.mark.parametrize("seed", range(10))
def test_kp_generator_contract(seed):
    inst = generate_random("kp", 4, 12, seed)
    w = inst.A[0]
    assert inst.b[0] == math.ceil(w.sum() / 2)
    assert w.min() >= 10 and w.max() <= 100
    assert (-inst.C).min() >= 10 and (-inst.C).max() <= 100
    assert inst.maximize == (True,) * 4 and inst.name == f"kp_p4_12_s{seed}"


def test_cflp_generator_contract():
    inst = generate_random("cflp", 3, (3, 4), 2)
    d = -inst.C[2, -4:]
    assert d.min() >= 5 and d.max() <= 20
    caps = -inst.A[-3:, :3].diagonal()
    assert abs(caps.sum() - 0.6 * d.sum()) <= 3
    with pytest.raises(ValueError):
        generate_random("cflp", 4, (2, 2), 0)


def test_unsupported_class():
    with pytest.raises(ValueError):
        generate_random("tsp", 3, 5, 0)
