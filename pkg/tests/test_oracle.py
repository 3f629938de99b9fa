import random

import pytest

from conftest import inst_of, random_instance
from mvtsp.algebraic import build_blowup
from mvtsp.core import INF, NoSolution, check_solution, cost_of
from mvtsp.oracle import (BudgetExceeded, brute_force, enumerate_connected_pms,
                          enumerate_out_trees, has_hamiltonian_cycle, perfect_matchings,
                          psaraftis_cost)


def test_brute_force_examples(I2, I2L, T3):
    assert brute_force(I2) == (5, [[0, 1], [1, 0]])
    assert brute_force(I2L) == (10, [[1, 1], [1, 0]])
    assert brute_force(T3)[0] == 3
    with pytest.raises(NoSolution):
        brute_force(inst_of([[1, INF], [INF, 1]], [1, 1]))


def test_budget():
    with pytest.raises(BudgetExceeded):
        brute_force(inst_of([[1] * 3] * 3, [100, 100, 100]), budget=1000)


def test_brute_force_is_deterministic_and_lexmin():
    inst = inst_of([[1, 1], [1, 1]], [2, 2])
    cost, m = brute_force(inst)
    assert cost == 4 and m == [[0, 2], [2, 0]]  # row-major smallest among optima
    assert brute_force(inst) == (cost, m)


@pytest.mark.parametrize("seed", range(60))
def test_count_vector_dp_agrees(seed):
    inst = random_instance(seed, n_max=4, k_max=2)
    try:
        cost, m = brute_force(inst)
    except NoSolution:
        with pytest.raises(NoSolution):
            psaraftis_cost(inst)
        return
    assert check_solution(inst, m) is None and cost_of(m, inst.d) == cost
    assert psaraftis_cost(inst) == cost


def test_out_tree_enumeration():
    trees = list(enumerate_out_trees([0, 1, 2], (2, 0, 0), 0))
    assert trees == [((0, 1), (0, 2))]
    chains = list(enumerate_out_trees([0, 1, 2], (1, 1, 0), 0))
    assert chains == [((0, 1), (1, 2))]
    assert list(enumerate_out_trees([0, 1, 2], (0, 1, 1), 0)) == []
    # 4 labelled vertices: every outdegree sequence summed gives 4^2 trees
    total = sum(1 for delta in [(a, b, c, 3 - a - b - c) for a in range(4) for b in range(4)
                                for c in range(4) if a + b + c <= 3]
                for _ in enumerate_out_trees([0, 1, 2, 3], delta, 0))
    assert total == 16


def test_matchings_of_small_blowups(I2, T3):
    B = build_blowup(I2.d, I2.k, I2.k)
    assert len(list(perfect_matchings(B))) == 1
    assert len(list(enumerate_connected_pms(B))) == 1
    B = build_blowup(T3.d, T3.k, T3.k)
    # derangements of 3 elements: both 3-cycles, both connected
    assert len(list(perfect_matchings(B))) == 2
    assert len(list(enumerate_connected_pms(B))) == 2
    loops = build_blowup([[1, INF], [INF, 1]], (1, 1), (1, 1))
    assert len(list(perfect_matchings(loops))) == 1
    assert list(enumerate_connected_pms(loops)) == []


def test_hamiltonian_cycles():
    cyc = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert has_hamiltonian_cycle(cyc)
    assert not has_hamiltonian_cycle([[0, 1, 0], [1, 0, 1], [0, 0, 0]])
    assert has_hamiltonian_cycle([[1]]) and not has_hamiltonian_cycle([[0]])
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 6)
        adj = [[int(u != v and rng.random() < 0.5) for v in range(n)] for u in range(n)]
        d = [[0 if adj[u][v] else INF for v in range(n)] for u in range(n)]
        try:
            brute_force(inst_of(d, [1] * n))
            expect = True
        except NoSolution:
            expect = False
        assert has_hamiltonian_cycle(adj) == expect
