"""Layered-guessing engine.

Strip the leaves of an optimal outbranching K times: the stripped layers
``L_1..L_K`` shrink, and the survivors ``R`` form a core out-tree. We guess
``R``, the leaves ``L_{K+1}`` of that core, its outdegree sequence and the
layer partition, take the cheapest core tree from the DP, and let one flow
network both fill the degrees and attach every layer vertex to a parent in
a later layer (or in ``R``) through a dedicated unit-capacity node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import INF, FdcsInstance, MvtspInstance, NoSolution, cost_of, zeros
from .dp import ROOT, Memo, OutTree, _solve_state, _tree_edges, pack
from .flow import FlowNetwork, Infeasible, fixed_degree_duals, min_cost_max_flow
from .kernel import kernelize, lift


class PreconditionViolated(ValueError):
    pass


@dataclass
class PolyspaceStats:
    guesses: int = 0
    skipped: int = 0
    flows: int = 0
    accepted: int = 0


def leaf_layers(T: OutTree, K: int, n: int):
    """``([L_1, ..., L_{K+1}], R)`` for an outbranching ``T`` of ``range(n)``."""
    children = {v: set() for v in range(n)}
    for p, c in T.edges:
        children[p].add(c)
    alive = set(range(n))
    layers = []
    R = None
    for i in range(K + 1):
        if len(alive) > 1:
            leaves = {v for v in alive if not (children[v] & alive)}
        else:
            leaves = set()
        if i == K:
            R = set(alive)
        layers.append(leaves)
        if i < K:
            alive -= leaves
    return layers, R


def create_network(d, R, out_res, in_res, layers):
    """Degree-filling network plus one attachment node per non-core vertex.

    Returns ``(net, arcs)`` where ``arcs`` maps ``("I"|"C", u, v)`` to arc ids.
    """
    n = len(d)
    R = set(R)
    outside = [v for v in range(n) if v not in R]
    if any(x < 0 for x in out_res) or any(x < 0 for x in in_res):
        raise PreconditionViolated("negative residual demand")
    if any(in_res[v] < 1 for v in outside):
        raise PreconditionViolated("a layer vertex needs an incoming edge")
    # node ids: s=0, t=1, v^O=2+v, v^I=2+n+v, v^C follow
    c_id = {v: 2 + 2 * n + j for j, v in enumerate(outside)}
    net = FlowNetwork(2 + 2 * n + len(outside), 0, 1)
    for v in range(n):
        net.add_arc(0, 2 + v, out_res[v], 0)
    for v in range(n):
        net.add_arc(2 + n + v, 1, in_res[v] if v in R else in_res[v] - 1, 0)
    for v in outside:
        net.add_arc(c_id[v], 1, 1, 0)
    arcs = {}
    for u in range(n):
        for v in range(n):
            if d[u][v] != INF:
                arcs["I", u, v] = net.add_arc(2 + u, 2 + n + v, INF, d[u][v])
    later = set(R)
    for layer in reversed(layers):
        for v in sorted(layer):
            for u in sorted(later):
                if d[u][v] != INF:
                    arcs["C", u, v] = net.add_arc(2 + u, c_id[v], INF, d[u][v])
        later |= set(layer)
    return net, arcs


def ordered_partitions(items, K):
    """Ordered partitions of ``items`` into ``K`` labelled, possibly empty,
    parts with non-increasing sizes."""
    items = list(items)
    for labels in itertools.product(range(K), repeat=len(items)):
        sizes = [0] * K
        for lab in labels:
            sizes[lab] += 1
        if any(sizes[i] < sizes[i + 1] for i in range(K - 1)):
            continue
        parts = [set() for _ in range(K)]
        for v, lab in zip(items, labels):
            parts[lab].add(v)
        yield parts


def _core_sequences(R, leaves):
    """Outdegree sequences on sorted ``R`` with zeros exactly on ``leaves``."""
    R = sorted(R)
    if len(R) == 1:
        yield {ROOT: 0}
        return
    inner = [v for v in R if v not in leaves]  # includes the root
    spare = len(R) - 1 - len(inner)
    if spare < 0:
        return
    for extra in itertools.combinations_with_replacement(inner, spare):
        delta = {v: 0 for v in R}
        for v in inner:
            delta[v] = 1
        for v in extra:
            delta[v] += 1
        yield delta


def _guesses(n, K):
    others = list(range(1, n))
    for r in range(1, n + 1):
        budget = (n - r) // K
        for rest in itertools.combinations(others, r - 1):
            R = (ROOT,) + rest
            top = min(budget, r - 1)
            for c in range(top + 1):
                if r >= 2 and c == 0:
                    continue  # a core with two or more vertices has a leaf
                for leaves in itertools.combinations(rest, c):
                    for delta in _core_sequences(R, set(leaves)):
                        yield R, set(leaves), delta


def solve_polyspace(inst, K: int = 4, kernel=False, stats: PolyspaceStats | None = None):
    """Optimal ``(cost, m)`` for MVTSP or the outbranching family."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if isinstance(inst, MvtspInstance):
        fd = FdcsInstance(inst.d, inst.k, inst.k, 0, inst.name)
    else:
        fd = inst
        if fd.root is None:
            raise ValueError("the polyspace engine needs a rooted instance")
    stats = PolyspaceStats() if stats is None else stats
    if kernel:
        try:
            kr = kernelize(fd)
        except Infeasible as exc:
            raise NoSolution(str(exc)) from None
        _, m = _solve_rooted(kr.reduced, K, stats)
        m = lift(m, kr.f)
        return cost_of(m, fd.d), m
    return _solve_rooted(fd, K, stats)


def _solve_rooted(fd, K, stats):
    n = fd.n
    if n == 1:
        c = fd.outs[0]
        if c and fd.d[0][0] == INF:
            raise NoSolution("single vertex without a usable loop")
        return (c * fd.d[0][0] if c else 0), [[c]]
    order = [fd.root] + [v for v in range(n) if v != fd.root]
    d = [[fd.d[a][b] for b in order] for a in order]
    ins = [fd.ins[v] for v in order]
    outs = [fd.outs[v] for v in order]
    try:
        _, a, b = fixed_degree_duals(d, ins, outs)
    except Infeasible as exc:
        raise NoSolution(str(exc)) from None
    memo = Memo(d)
    best, best_m = INF, None
    for R, leaves, delta in _guesses(n, K):
        stats.guesses += 1
        res = _evaluate_guess(d, ins, outs, R, leaves, delta, K, memo, a, b, best, stats)
        if res is not None and res[0] < best:
            best, best_m = res
    if best_m is None:
        raise NoSolution("no guess admits a full flow")
    m = zeros(n)
    for i, u in enumerate(order):
        for j, v in enumerate(order):
            m[u][v] = best_m[i][j]
    return best, m


def core_tree(d, R, delta, memo=None):
    """Cheapest out-tree on ``R`` with outdegrees ``delta``; ``None`` if none
    is finite. A single-vertex core is the empty tree."""
    if len(R) == 1:
        return OutTree((), ROOT), 0
    n = len(d)
    memo = Memo(d) if memo is None else memo
    S = sum(1 << v for v in R)
    key = pack(delta.get(v, 0) for v in range(n))
    c = _solve_state(memo, S, key)
    if c == INF:
        return None, INF
    return OutTree(_tree_edges(memo, S, key), ROOT), c


def _evaluate_guess(d, ins, outs, R, leaves, delta, K, memo, a=None, b=None,
                    best=INF, stats=None):
    """Best candidate ``(cost, m)`` for one core guess, over all layerings.

    The dual bound (when ``a``, ``b`` are given) skips flows that cannot beat
    ``best``; it never changes which candidate is returned first.
    """
    n = len(d)
    tree, tcost = core_tree(d, R, delta, memo)
    if tree is None:
        if stats:
            stats.skipped += 1
        return None
    out_res = list(outs)
    in_res = list(ins)
    for p, c in tree.edges:
        out_res[p] -= 1
        in_res[c] -= 1
    outside = [v for v in range(n) if v not in set(R)]
    if min(out_res) < 0 or min(in_res) < 0 or any(in_res[v] < 1 for v in outside):
        if stats:
            stats.skipped += 1
        return None
    if a is not None:
        bound = tcost + sum(x * y for x, y in zip(out_res, a)) + sum(x * y for x, y in zip(in_res, b))
        if bound >= best:
            if stats:
                stats.skipped += 1
            return None
    found = None
    for layers in ordered_partitions(outside, K):
        if len(layers[K - 1]) < len(leaves):
            continue
        net, arcs = create_network(d, R, out_res, in_res, layers)
        if stats:
            stats.flows += 1
        fr = min_cost_max_flow(net)
        if fr.value != sum(out_res):
            continue
        total = tcost + fr.cost
        if found is None or total < found[0]:
            m = zeros(n)
            for (kind, u, v), arc in arcs.items():
                m[u][v] += fr.flows[arc]
            for p, c in tree.edges:
                m[p][c] += 1
            found = (total, m)
            if stats:
                stats.accepted += 1
    return found
