"""Integral min-cost max-flow and the Fixed Degree Subgraph solver.

Successive shortest augmenting paths with Dijkstra on reduced costs. All arc
costs are nonnegative, so zero initial potentials are valid.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .core import INF, NoSolution


class Infeasible(NoSolution):
    """No degree-exact subgraph exists within the finite-cost edges."""


@dataclass
class FlowNetwork:
    num_nodes: int
    source: int
    sink: int
    arcs: list = field(default_factory=list)  # (u, v, cap, cost)

    def add_arc(self, u: int, v: int, cap, cost: int) -> int:
        if cost < 0:
            raise ValueError("arc costs must be nonnegative")
        self.arcs.append((u, v, cap, cost))
        return len(self.arcs) - 1


@dataclass
class FlowResult:
    value: int
    cost: int
    flows: list


class _Residual:
    def __init__(self, net: FlowNetwork):
        finite = sum(c for u, _, c, _ in net.arcs if u == net.source and c != INF)
        if finite == 0:
            finite = sum(c for _, _, c, _ in net.arcs if c != INF)
        self.n = net.num_nodes
        self.adj = [[] for _ in range(self.n)]
        self.to = []
        self.cap = []
        self.cost = []
        for u, v, c, w in net.arcs:
            c = finite if c == INF else c
            self.adj[u].append(len(self.to))
            self.to.append(v)
            self.cap.append(c)
            self.cost.append(w)
            self.adj[v].append(len(self.to))
            self.to.append(u)
            self.cap.append(0)
            self.cost.append(-w)


def min_cost_max_flow(net: FlowNetwork) -> FlowResult:
    """Maximum flow of minimum cost among maximum flows; integral."""
    res = _Residual(net)
    n, s, t = res.n, net.source, net.sink
    adj, to, cap, cost = res.adj, res.to, res.cap, res.cost
    h = [0] * n
    value = 0
    total = 0
    big = float("inf")
    while True:
        dist = [big] * n
        prev = [-1] * n
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            du, u = heapq.heappop(heap)
            if du > dist[u]:
                continue
            hu = h[u]
            for e in adj[u]:
                if cap[e] > 0:
                    v = to[e]
                    nd = du + cost[e] + hu - h[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = e
                        heapq.heappush(heap, (nd, v))
        dt = dist[t]
        if dt == big:
            break
        for v in range(n):
            h[v] += dist[v] if dist[v] < dt else dt
        push = big
        v = t
        while v != s:
            e = prev[v]
            if cap[e] < push:
                push = cap[e]
            v = to[e ^ 1]
        v = t
        while v != s:
            e = prev[v]
            cap[e] -= push
            cap[e ^ 1] += push
            total += push * cost[e]
            v = to[e ^ 1]
        value += push
    flows = [cap[2 * i + 1] for i in range(len(net.arcs))]
    return FlowResult(value, total, flows)


def degree_network(d, ins, outs):
    """Bipartite network ``s -> u^O -> v^I -> t``; returns (net, edge arc map)."""
    n = len(ins)
    net = FlowNetwork(2 * n + 2, 0, 1)
    for u in range(n):
        net.add_arc(0, 2 + u, outs[u], 0)
    for v in range(n):
        net.add_arc(2 + n + v, 1, ins[v], 0)
    edge_arc = {}
    for u in range(n):
        for v in range(n):
            if d[u][v] != INF:
                edge_arc[u, v] = net.add_arc(2 + u, 2 + n + v, INF, d[u][v])
    return net, edge_arc


def solve_fixed_degree_subgraph(d, ins, outs):
    """Minimum-cost degree-exact multiplicity, ignoring connectivity."""
    if sum(ins) != sum(outs):
        raise Infeasible("in/out demand totals differ")
    n = len(ins)
    net, edge_arc = degree_network(d, ins, outs)
    res = min_cost_max_flow(net)
    if res.value != sum(outs):
        raise Infeasible("no degree-exact subgraph on finite edges")
    m = [[0] * n for _ in range(n)]
    for (u, v), a in edge_arc.items():
        m[u][v] = res.flows[a]
    return m


def fixed_degree_duals(d, ins, outs):
    """Optimal relaxed solution plus dual potentials.

    Returns ``(m, a, b)`` with ``d[u][v] >= a[u] + b[v]`` on every finite edge
    and ``cost(m) == sum(outs[u]*a[u]) + sum(ins[v]*b[v])``.
    """
    m = solve_fixed_degree_subgraph(d, ins, outs)
    n = len(ins)
    # residual arcs between the two sides only; source/sink arcs do not
    # constrain the (a, b) certificate
    arcs = []
    for u in range(n):
        for v in range(n):
            if d[u][v] != INF:
                arcs.append((u, n + v, d[u][v]))
                if m[u][v] > 0:
                    arcs.append((n + v, u, -d[u][v]))
    p = [0] * (2 * n)
    for _ in range(2 * n + 1):
        changed = False
        for x, y, c in arcs:
            if p[x] + c < p[y]:
                p[y] = p[x] + c
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - optimal flows have no negative cycles
        raise RuntimeError("negative cycle in optimal residual graph")
    a = [-p[u] for u in range(n)]
    b = [p[n + v] for v in range(n)]
    return m, a, b
