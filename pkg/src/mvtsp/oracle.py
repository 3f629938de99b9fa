"""Brute-force reference solvers and enumerators.

Nothing here is fast. These are the independent answers the engines are
checked against.
"""

from __future__ import annotations

import itertools
import math

from .core import INF, MvtspInstance, NoSolution, check_solution, support_connected


class BudgetExceeded(RuntimeError):
    pass


DEFAULT_BUDGET = 10 ** 7


def _demands(inst):
    if isinstance(inst, MvtspInstance):
        return inst.k, inst.k
    return inst.ins, inst.outs


def brute_force(inst, budget: int = DEFAULT_BUDGET):
    """Exact optimum by enumerating every degree-feasible multiplicity matrix.

    Cells are filled row-major with ascending values and only strict
    improvements replace the incumbent, so among optimal matrices the
    lexicographically smallest is returned.
    """
    ins, outs = _demands(inst)
    n = inst.n
    size = math.prod(max(a, b) + 1 for a, b in zip(ins, outs))
    if size > budget:
        raise BudgetExceeded(f"search space {size} exceeds budget {budget}")
    d = inst.d
    if sum(ins) != sum(outs):
        raise NoSolution("demand totals differ")
    m = [[0] * n for _ in range(n)]
    rowrem = list(outs)
    colrem = list(ins)
    best = [INF, None]

    def rec(cell, partial):
        if partial >= best[0]:
            return
        if cell == n * n:
            if check_solution(inst, m) is None:
                best[0] = partial
                best[1] = [row[:] for row in m]
            return
        u, v = divmod(cell, n)
        hi = min(rowrem[u], colrem[v])
        if d[u][v] == INF:
            hi = 0
        if v == n - 1:
            lo = rowrem[u]
            if lo > hi:
                return
        elif u == n - 1:
            lo = colrem[v]
            if lo > hi:
                return
        else:
            lo = 0
        c = d[u][v] if d[u][v] != INF else 0
        for x in range(lo, hi + 1):
            m[u][v] = x
            rowrem[u] -= x
            colrem[v] -= x
            rec(cell + 1, partial + c * x)
            rowrem[u] += x
            colrem[v] += x
        m[u][v] = 0

    rec(0, 0)
    if best[1] is None:
        raise NoSolution("no feasible multiplicity")
    return best[0], best[1]


def brute_force_mvtsp(inst: MvtspInstance, budget: int = DEFAULT_BUDGET):
    return brute_force(inst, budget)


def psaraftis_cost(inst: MvtspInstance, budget: int = DEFAULT_BUDGET):
    """Optimal tour cost by DP over visit-count vectors (no matrix returned)."""
    n, k, d = inst.n, inst.k, inst.d
    if math.prod(x + 1 for x in k) * n > budget:
        raise BudgetExceeded("count-vector DP too large")
    start = tuple(1 if v == 0 else 0 for v in range(n))
    layer = {(start, 0): 0}
    for _ in range(inst.ell - 1):
        nxt = {}
        for (c, u), val in layer.items():
            for w in range(n):
                if c[w] < k[w] and d[u][w] != INF:
                    c2 = c[:w] + (c[w] + 1,) + c[w + 1:]
                    key = (c2, w)
                    cand = val + d[u][w]
                    if cand < nxt.get(key, INF):
                        nxt[key] = cand
        layer = nxt
    best = INF
    for (c, u), val in layer.items():
        if d[u][0] != INF:
            best = min(best, val + d[u][0])
    if best == INF:
        raise NoSolution("no tour")
    return best


def enumerate_out_trees(X, delta, root):
    """Every out-tree spanning ``X`` rooted at ``root`` with outdegrees ``delta``.

    ``delta`` maps each vertex of ``X`` to its outdegree (dict or sequence
    aligned with ``X``). Yields sorted edge tuples ``((parent, child), ...)``.
    """
    X = list(X)
    if not isinstance(delta, dict):
        delta = dict(zip(X, delta))
    others = [v for v in X if v != root]
    for parents in itertools.product(X, repeat=len(others)):
        par = dict(zip(others, parents))
        if any(p == v for v, p in par.items()):
            continue
        outdeg = {v: 0 for v in X}
        for p in parents:
            outdeg[p] += 1
        if outdeg != delta:
            continue
        ok = True
        for v in others:
            seen = set()
            while v != root:
                if v in seen:
                    ok = False
                    break
                seen.add(v)
                v = par[v]
            if not ok:
                break
        if ok:
            yield tuple(sorted((p, v) for v, p in par.items()))


def perfect_matchings(B):
    """All perfect matchings of a blow-up graph, as sorted edge-index tuples."""
    No, Ni = len(B.o_owner), len(B.i_owner)
    if No != Ni:
        return
    by_o = [[] for _ in range(No)]
    for e, (o, i) in enumerate(B.edges):
        by_o[o].append((i, e))
    used = [False] * Ni
    chosen = []

    def rec(o):
        if o == No:
            yield tuple(sorted(chosen))
            return
        for i, e in by_o[o]:
            if not used[i]:
                used[i] = True
                chosen.append(e)
                yield from rec(o + 1)
                chosen.pop()
                used[i] = False

    yield from rec(0)


def contraction(B, matching):
    m = [[0] * B.n for _ in range(B.n)]
    for e in matching:
        o, i = B.edges[e]
        m[B.o_owner[o]][B.i_owner[i]] += 1
    return m


def enumerate_connected_pms(B):
    for pm in perfect_matchings(B):
        if support_connected(contraction(B, pm)):
            yield pm


def connected_pm_sum(ctx, B, x):
    """Field sum over connected perfect matchings of the product of ``x_e``."""
    total = 0
    for pm in enumerate_connected_pms(B):
        prod = 1
        for e in pm:
            prod = ctx.mul(prod, int(x[e]))
        total ^= prod
    return total


def has_hamiltonian_cycle(adj) -> bool:
    """Directed Hamiltonian cycle by Held-Karp reachability over bitmasks."""
    n = len(adj)
    if n == 1:
        return bool(adj[0][0])
    full = (1 << n) - 1
    reach = [0] * (1 << n)  # bitmask of end vertices for paths from 0 covering mask
    reach[1] = 1
    for mask in range(1, 1 << n):
        if not mask & 1 or not reach[mask]:
            continue
        ends = reach[mask]
        for u in range(n):
            if ends >> u & 1:
                for v in range(n):
                    if not mask >> v & 1 and adj[u][v]:
                        reach[mask | 1 << v] |= 1 << v
    ends = reach[full]
    return any(ends >> u & 1 and adj[u][0] for u in range(n))
