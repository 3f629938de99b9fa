import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import inst_of
from mvtsp.core import (INF, DemandMismatch, EmptyInstance, FdcsInstance, InstanceError,
                        MvtspInstance, NegativeCost, NotEulerian, ZeroVisit, check_solution,
                        cost_of, instance_to_json, is_feasible, is_feasible_mvtsp,
                        is_outtree_sequence, madd, reconstruct_tour, tour_edges, validate, zeros)
from mvtsp.oracle import enumerate_out_trees


def test_validate_reads_fields():
    inst = validate({"n": 2, "costs": [[None, 2], [3, None]], "visits": [1, 1]})
    assert isinstance(inst, MvtspInstance)
    assert inst.D == 3 and inst.ell == 2 and inst.d[0][0] == INF


def test_validate_single_city():
    inst = validate({"n": 1, "costs": [[4]], "visits": [3]})
    assert inst.ell == 3 and inst.D == 4


def test_validate_rejections():
    with pytest.raises(DemandMismatch):
        validate({"n": 2, "costs": [[1, 1], [1, 1]], "in": [1, 1], "out": [2, 1]})
    with pytest.raises(NegativeCost):
        validate({"n": 1, "costs": [[-1]], "visits": [1]})
    with pytest.raises(ZeroVisit):
        validate({"n": 2, "costs": [[1, 1], [1, 1]], "visits": [1, 0]})
    with pytest.raises(EmptyInstance):
        validate({"n": 0, "costs": [], "visits": []})
    with pytest.raises(InstanceError):
        validate({"n": 1, "costs": [[1]], "visits": [1], "in": [1], "out": [1]})
    with pytest.raises(InstanceError):
        validate({"n": 2, "costs": [[1]], "visits": [1, 1]})


def test_validate_fdcs_families():
    base = {"n": 2, "costs": [[1, 1], [1, 1]], "in": [1, 1], "out": [1, 1]}
    assert validate(base).root is None
    assert validate({**base, "family": "outbranching"}).root == 0
    assert validate({**base, "root": 1}).family == "outbranching"
    with pytest.raises(InstanceError):
        validate({**base, "root": 5})


def test_json_round_trip(I2L):
    assert validate(instance_to_json(I2L)) == I2L
    fd = FdcsInstance(I2L.d, (1, 2), (2, 1), 1)
    assert validate(instance_to_json(fd)) == FdcsInstance(I2L.d, (1, 2), (2, 1), 1)


def test_cost_of_examples(I2, I2L):
    assert cost_of(zeros(2), I2.d) == 0
    assert cost_of([[0, 1], [1, 0]], I2.d) == 5
    assert cost_of([[1, 1], [1, 0]], I2L.d) == 10
    assert cost_of([[1, 0], [0, 0]], I2.d) == INF


def test_cost_of_wide_values():
    d = [[2 ** 40, 2 ** 40], [2 ** 40, 2 ** 40]]
    m = [[2 ** 20, 2 ** 20], [2 ** 20, 2 ** 20]]
    assert cost_of(m, d) == 4 * 2 ** 60


def test_feasibility_examples(I2, T3):
    assert is_feasible_mvtsp(I2, [[0, 1], [1, 0]])
    assert check_solution(inst_of([[1, 1], [1, 1]], [1, 1]), [[1, 0], [0, 1]]) == "not-connected"
    assert is_feasible_mvtsp(T3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert check_solution(I2, [[0, 1], [0, 0]]) == "degree-mismatch"
    assert check_solution(I2, [[1, 0], [0, 1]]) == "infinite-edge"
    assert check_solution(I2, [[0, 1]]) == "shape-mismatch"
    assert is_feasible_mvtsp(inst_of([[3]], [2]), [[2]])


def test_outbranching_family_needs_reachability():
    d = [[1, 1, 1]] * 3
    fd = FdcsInstance(d, (1, 1, 1), (1, 1, 1), 1)
    # 0 -> 2 -> 1 -> 0 cycle reaches everything from 1
    assert is_feasible(fd, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    fd = FdcsInstance(d, (0, 1, 1), (2, 0, 0), 0)
    assert is_feasible(fd, [[0, 1, 1], [0, 0, 0], [0, 0, 0]])
    fd = FdcsInstance(d, (0, 1, 1), (2, 0, 0), 1)
    assert check_solution(fd, [[0, 1, 1], [0, 0, 0], [0, 0, 0]]) == "not-outbranching"


def test_reconstruct_tour_examples(T3, I2L):
    tour = reconstruct_tour(T3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert tour == [0, 1, 2]
    tour = reconstruct_tour(I2L, [[1, 1], [1, 0]])
    assert sorted(tour) == [0, 0, 1] and tour_edges(tour, 2) == [[1, 1], [1, 0]]
    assert reconstruct_tour(inst_of([[4]], [3]), [[3]]) == [0, 0, 0]
    with pytest.raises(NotEulerian):
        reconstruct_tour(T3, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=12).map(
        lambda extra: (n, list(range(n)) + extra))), st.randoms())
def test_tour_pairs_match_multiplicity(case, rnd):
    n, seq = case
    rnd.shuffle(seq)
    m = tour_edges(seq, n)
    k = [seq.count(v) for v in range(n)]
    inst = inst_of([[1] * n for _ in range(n)], k)
    tour = reconstruct_tour(inst, m)
    assert len(tour) == len(seq)
    assert tour_edges(tour, n) == m


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(0, 50), min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(0, 5), min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(0, 5), min_size=n, max_size=n), min_size=n, max_size=n))))
def test_cost_is_linear(case):
    d, m1, m2 = case
    assert cost_of(madd(m1, m2), d) == cost_of(m1, d) + cost_of(m2, d)


def test_outtree_sequence_examples():
    assert is_outtree_sequence(3, (2, 0, 0), 0)
    assert not is_outtree_sequence(3, (0, 1, 1), 0)
    assert not is_outtree_sequence(3, (1, 1, 1), 0)


@pytest.mark.parametrize("size", [2, 3, 4, 5])
def test_outtree_sequence_matches_enumeration(size):
    X = list(range(size))
    for delta in itertools.product(range(size + 1), repeat=size):
        if sum(delta) > size:
            continue
        exists = next(enumerate_out_trees(X, delta, 0), None) is not None
        assert exists == is_outtree_sequence(size, delta, 0), delta
