import itertools
import math
import random

import pytest

from conftest import inst_of, random_instance
from mvtsp.core import INF, FdcsInstance, NoSolution, check_solution, cost_of
from mvtsp.dp import (ExpspaceStats, Memo, NotReachable, OutTree, best_outbranching,
                      count_extended_sequences, enumerate_outbranching_sequences,
                      is_reachable_state, pack, solve_expspace, unpack)
from mvtsp.flow import Infeasible
from mvtsp.oracle import brute_force, enumerate_out_trees


def test_reachable_state_examples():
    assert is_reachable_state(0b111, (2, 0, 0), 3)
    assert is_reachable_state(0b111, (1, 1, 0), 3)
    assert not is_reachable_state(0b111, (0, 1, 1), 3)
    assert not is_reachable_state(0b111, (1, 0, 0), 3)


def test_pack_round_trip():
    assert unpack(pack((3, 0, 63, 1)), 4) == (3, 0, 63, 1)
    with pytest.raises(ValueError):
        pack((64,))


def test_best_outbranching_examples():
    d = [[INF, 1, 5], [1, INF, 1], [1, 1, INF]]
    assert best_outbranching(0b111, (2, 0, 0), d).edges == ((0, 1), (0, 2))
    assert best_outbranching(0b111, (1, 1, 0), d).edges == ((0, 1), (1, 2))
    with pytest.raises(NotReachable):
        best_outbranching(0b111, (0, 1, 1), d)
    d[0][2] = INF
    with pytest.raises(Infeasible):
        best_outbranching(0b111, (2, 0, 0), d)


@pytest.mark.parametrize("seed", range(25))
def test_best_outbranching_is_cheapest(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    d = [[rng.randint(0, 20) if rng.random() > 0.15 else INF for _ in range(n)]
         for _ in range(n)]
    memo = Memo(d)
    for delta in enumerate_outbranching_sequences(n):
        costs = [sum(d[p][c] for p, c in t) for t in enumerate_out_trees(range(n), delta, 0)]
        expect = min(costs, default=INF)
        try:
            tree = best_outbranching((1 << n) - 1, delta, d, memo)
        except Infeasible:
            assert expect == INF
            continue
        assert tree.is_valid(range(n))
        assert tree.outdegrees(n) == list(delta)
        assert tree.cost(d) == expect


@pytest.mark.parametrize("n", range(2, 7))
def test_memo_keys_are_reachable(n):
    inst = inst_of([[1] * n for _ in range(n)], [n] * n)
    stats = ExpspaceStats()
    solve_expspace(inst, stats=stats, keep_keys=True)
    assert stats.memo_states == len(stats.memo_keys) > 0
    for S, key in stats.memo_keys:
        assert is_reachable_state(S, unpack(key, n), n)


def test_outtree_validation():
    assert OutTree(((0, 1), (1, 2)), 0).is_valid([0, 1, 2])
    assert not OutTree(((1, 2), (2, 1)), 0).is_valid([0, 1, 2])
    assert not OutTree(((0, 1),), 0).is_valid([0, 1, 2])


@pytest.mark.parametrize("n", range(2, 8))
def test_sequence_enumeration(n):
    seqs = list(enumerate_outbranching_sequences(n))
    assert len(seqs) == len(set(seqs)) == math.comb(2 * n - 3, n - 1)
    for s in seqs:
        assert sum(s) == n - 1 and s[0] >= 1


@pytest.mark.parametrize("n", range(1, 13))
def test_extended_sequence_count(n):
    assert count_extended_sequences(n) == math.comb(2 * n - 1, n)
    brute = sum(1 for s in itertools.product(range(n), repeat=n) if sum(s) <= n - 1) if n <= 6 else None
    if brute is not None:
        assert brute == count_extended_sequences(n)


def test_expspace_examples(I2, I2L, T3):
    assert solve_expspace(I2) == (5, [[0, 1], [1, 0]])
    assert solve_expspace(I2L)[0] == 10
    assert solve_expspace(T3)[0] == 3
    assert solve_expspace(inst_of([[4]], [3])) == (12, [[3]])
    with pytest.raises(NoSolution):
        solve_expspace(inst_of([[1, INF], [INF, 1]], [1, 1]))


def test_connected_family_rejected():
    with pytest.raises(ValueError):
        solve_expspace(FdcsInstance(((1,),), (1,), (1,), None))


@pytest.mark.parametrize("seed", range(200))
def test_expspace_matches_brute_force(seed):
    inst = random_instance(seed)
    try:
        expect = brute_force(inst)[0]
    except NoSolution:
        with pytest.raises(NoSolution):
            solve_expspace(inst)
        return
    for kernel in (False, True):
        cost, m = solve_expspace(inst, kernel=kernel)
        assert cost == expect
        assert check_solution(inst, m) is None and cost_of(m, inst.d) == cost


@pytest.mark.parametrize("seed", range(40))
def test_rooted_family(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    d = tuple(tuple(rng.randint(0, 9) if rng.random() > 0.2 else INF for _ in range(n))
              for _ in range(n))
    outs = [rng.randint(0, 2) for _ in range(n)]
    ins = [rng.randint(0, 2) for _ in range(n)]
    diff = sum(outs) - sum(ins)
    if diff > 0:
        ins[0] += diff
    else:
        outs[0] -= diff
    root = rng.randrange(n)
    fd = FdcsInstance(d, tuple(ins), tuple(outs), root)
    try:
        expect = brute_force(fd)[0]
    except NoSolution:
        with pytest.raises(NoSolution):
            solve_expspace(fd)
        return
    cost, m = solve_expspace(fd)
    assert cost == expect and check_solution(fd, m) is None
