import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import inst_of
from mvtsp.core import INF, FdcsInstance, NoSolution, check_solution, cost_of, zeros
from mvtsp.dp import solve_expspace
from mvtsp.flow import Infeasible
from mvtsp.kernel import family_size, kernelize, lift
from mvtsp.oracle import brute_force


def test_family_size():
    assert [family_size(n) for n in (1, 2, 5)] == [0, 1, 4]


def test_small_demands_are_untouched(T3):
    kr = kernelize(T3.to_fdcs(None))
    assert kr.f == zeros(3)
    assert kr.reduced.ins == (1, 1, 1)


def test_large_triangle():
    big = 10 ** 6
    inst = inst_of([[INF, 1, 1], [1, INF, 1], [1, 1, INF]], [big] * 3)
    kr = kernelize(inst.to_fdcs(None))
    assert max(kr.reduced.ins + kr.reduced.outs) <= 9
    _, m = solve_expspace(kr.reduced.with_root(0))
    full = lift(m, kr.f)
    assert check_solution(inst, full) is None
    assert cost_of(full, inst.d) == 3 * big


def test_lift_adds():
    assert lift([[1, 0], [0, 1]], [[2, 3], [4, 5]]) == [[3, 3], [4, 6]]


def test_infeasible_relaxation_propagates():
    with pytest.raises(Infeasible):
        kernelize(FdcsInstance(((INF, 1), (INF, INF)), (1, 1), (1, 1)))


def _random_fdcs(seed, big):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    d = tuple(tuple(INF if rng.random() < 0.2 else rng.randint(0, 9) for _ in range(n))
              for _ in range(n))
    outs = [rng.randint(1, big) for _ in range(n)]
    ins = outs[:]
    rng.shuffle(ins)
    return FdcsInstance(d, tuple(ins), tuple(outs), None)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_reduced_demands_are_bounded(seed):
    fd = _random_fdcs(seed, 10 ** 6)
    try:
        kr = kernelize(fd)
    except Infeasible:
        return
    n = fd.n
    assert all(0 <= x <= n * n for x in kr.reduced.ins + kr.reduced.outs)
    assert all(x >= 0 for row in kr.f for x in row)
    for v in range(n):
        assert kr.reduced.outs[v] + sum(kr.f[v]) == fd.outs[v]
        assert kr.reduced.ins[v] + sum(kr.f[u][v] for u in range(n)) == fd.ins[v]


@pytest.mark.parametrize("seed", range(40))
def test_reduction_preserves_optimum(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    d = [[INF if rng.random() < 0.2 else rng.randint(0, 9) for _ in range(n)] for _ in range(n)]
    inst = inst_of(d, [rng.randint(n * n, 12) for _ in range(n)])
    try:
        expect = brute_force(inst)[0]
    except NoSolution:
        expect = None
    try:
        got = solve_expspace(inst, kernel=True)[0]
    except NoSolution:
        got = None
    assert got == expect
