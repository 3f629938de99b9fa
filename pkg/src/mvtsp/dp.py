"""Exponential-space engine: cheapest out-tree per outdegree sequence plus flow.

For every outdegree sequence of an outbranching rooted at vertex 0, the
cheapest spanning out-tree with exactly that sequence is found by a memoized
recursion that always detaches the smallest leaf. The remaining degrees are
then filled by the connectivity-free flow, whose in/out demands depend only
on the sequence and not on the tree.

States ``(S, delta)`` are packed as a bitmask and a 6-bit-per-vertex integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .core import INF, FdcsInstance, MvtspInstance, NoSolution, cost_of, madd, zeros
from .flow import Infeasible, fixed_degree_duals, solve_fixed_degree_subgraph
from .kernel import kernelize, lift

ROOT = 0
_BITS = 6
_MASK = (1 << _BITS) - 1


class NotReachable(AssertionError):
    pass


@dataclass(frozen=True)
class OutTree:
    edges: tuple  # (parent, child) pairs
    root: int

    def outdegrees(self, n):
        deg = [0] * n
        for p, _ in self.edges:
            deg[p] += 1
        return deg

    def cost(self, d):
        return sum(d[p][c] for p, c in self.edges)

    def is_valid(self, vertices) -> bool:
        vertices = set(vertices)
        parent = {}
        for p, c in self.edges:
            if c in parent or c == self.root or p not in vertices or c not in vertices:
                return False
            parent[c] = p
        if set(parent) != vertices - {self.root}:
            return False
        for v in parent:
            seen = set()
            while v != self.root:
                if v in seen:
                    return False
                seen.add(v)
                v = parent[v]
        return True


def pack(delta) -> int:
    key = 0
    for v, x in enumerate(delta):
        if x > _MASK:
            raise ValueError("outdegree too large to pack")
        key |= x << (_BITS * v)
    return key


def unpack(key: int, n: int) -> tuple:
    return tuple((key >> (_BITS * v)) & _MASK for v in range(n))


def _as_mask(S) -> int:
    if isinstance(S, int):
        return S
    mask = 0
    for v in S:
        mask |= 1 << v
    return mask


def last_removed(S: int, n: int) -> int:
    for v in range(n - 1, -1, -1):
        if not S >> v & 1:
            return v
    return -1


def is_reachable_state(S, delta, n) -> bool:
    S = _as_mask(S)
    if not S & 1:
        raise ValueError("root must belong to S")
    members = [v for v in range(n) if S >> v & 1]
    if delta[ROOT] < 1:
        return False
    if sum(delta[v] for v in members) != len(members) - 1:
        return False
    last = last_removed(S, n)
    bad = [v for v in members if v < last and delta[v] == 0]
    return len(bad) <= 1


class Memo:
    """Memo table for the out-tree recursion over a fixed cost matrix."""

    def __init__(self, d):
        self.d = d
        self.n = len(d)
        self.table = {}  # (S, packed delta) -> (cost, parent of v_first, v_first)

    def __len__(self):
        return len(self.table)

    def keys(self):
        return self.table.keys()


def _solve_state(memo: Memo, S: int, key: int):
    hit = memo.table.get((S, key))
    if hit is not None:
        return hit[0]
    n, d = memo.n, memo.d
    vfirst = -1
    size = 0
    for v in range(n):
        if S >> v & 1:
            size += 1
            if vfirst < 0 and not (key >> (_BITS * v)) & _MASK:
                vfirst = v
    if size == 2:
        c = d[ROOT][vfirst]
        memo.table[S, key] = (c, ROOT, vfirst)
        return c
    best, arg = INF, -1
    rest = S & ~(1 << vfirst)
    for w in range(n):
        if not rest >> w & 1:
            continue
        dw = (key >> (_BITS * w)) & _MASK
        if dw >= 2 or (dw == 1 and w != ROOT):
            edge = d[w][vfirst]
            if edge == INF:
                continue
            sub = _solve_state(memo, rest, key - (1 << (_BITS * w)))
            if edge + sub < best:
                best, arg = edge + sub, w
    memo.table[S, key] = (best, arg, vfirst)
    return best


def _tree_edges(memo: Memo, S: int, key: int):
    edges = []
    while True:
        c, w, vfirst = memo.table[S, key]
        edges.append((w, vfirst))
        if w == ROOT and bin(S).count("1") == 2:
            break
        S &= ~(1 << vfirst)
        key -= 1 << (_BITS * w)
    return tuple(sorted(edges))


def best_outbranching(S, delta, d, memo: Memo | None = None) -> OutTree:
    """Cheapest out-tree rooted at 0 spanning ``S`` with outdegrees ``delta``.

    Raises ``Infeasible`` when every such tree uses an infinite edge.
    """
    n = len(d)
    S = _as_mask(S)
    delta = tuple(delta) + (0,) * (n - len(delta))
    if bin(S).count("1") < 2 or not is_reachable_state(S, delta, n):
        raise NotReachable("state is not reachable")
    if memo is None:
        memo = Memo(d)
    key = pack(delta[v] if S >> v & 1 else 0 for v in range(n))
    if _solve_state(memo, S, key) == INF:
        raise Infeasible("no finite out-tree with this sequence")
    return OutTree(_tree_edges(memo, S, key), ROOT)


def enumerate_outbranching_sequences(n):
    """All outdegree sequences of outbranchings on ``n`` vertices rooted at 0."""
    if n < 2:
        return
    extra = n - 2  # units left after giving the root its mandatory one
    for bars in itertools.combinations(range(extra + n - 1), n - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(extra + n - 2 - prev)
        parts[0] += 1
        yield tuple(parts)


def count_extended_sequences(n) -> int:
    """Length-``n`` nonnegative sequences with sum at most ``n - 1``, counted
    by a DP over positions."""
    ways = [1] + [0] * (n - 1)  # ways[s]: prefixes summing to s
    for _ in range(n):
        acc = 0
        nxt = []
        for s in range(n):
            acc += ways[s]
            nxt.append(acc)
        ways = nxt
    return sum(ways)


@dataclass
class ExpspaceStats:
    sequences: int = 0
    skipped: int = 0
    flows: int = 0
    memo_states: int = 0
    memo_keys: list = field(default_factory=list)


def _relabel(inst, root):
    n = inst.n
    order = [root] + [v for v in range(n) if v != root]
    d = [[inst.d[a][b] for b in order] for a in order]
    return order, d


def solve_expspace(inst, kernel=False, stats: ExpspaceStats | None = None,
                   keep_keys=False):
    """Optimal ``(cost, m)`` for MVTSP or the outbranching family."""
    if isinstance(inst, MvtspInstance):
        fd = FdcsInstance(inst.d, inst.k, inst.k, 0, inst.name)
    else:
        fd = inst
        if fd.root is None:
            raise ValueError("the exp-space engine needs a rooted instance")
    stats = ExpspaceStats() if stats is None else stats
    if kernel:
        try:
            kr = kernelize(fd)
        except Infeasible as exc:
            raise NoSolution(str(exc)) from None
        cost, m = _solve_rooted(kr.reduced, stats, keep_keys)
        m = lift(m, kr.f)
        return cost_of(m, fd.d), m
    return _solve_rooted(fd, stats, keep_keys)


def _solve_rooted(fd: FdcsInstance, stats, keep_keys):
    n = fd.n
    if n == 1:
        c = fd.outs[0]
        if c and fd.d[0][0] == INF:
            raise NoSolution("single vertex without a usable loop")
        return (c * fd.d[0][0] if c else 0), [[c]]
    order, d = _relabel(fd, fd.root)
    ins = [fd.ins[v] for v in order]
    outs = [fd.outs[v] for v in order]
    try:
        _, a, b = fixed_degree_duals(d, ins, outs)
    except Infeasible as exc:
        raise NoSolution(str(exc)) from None
    if any(ins[v] < 1 for v in range(1, n)):
        raise NoSolution("a non-root vertex has no incoming demand")
    in_res = [ins[0]] + [x - 1 for x in ins[1:]]
    base_b = sum(x * y for x, y in zip(in_res, b))
    memo = Memo(d)
    full = (1 << n) - 1
    best, best_m = INF, None
    for delta in enumerate_outbranching_sequences(n):
        stats.sequences += 1
        if any(outs[v] < delta[v] for v in range(n)):
            stats.skipped += 1
            continue
        key = pack(delta)
        tree_cost = _solve_state(memo, full, key)
        if tree_cost == INF:
            stats.skipped += 1
            continue
        out_res = [outs[v] - delta[v] for v in range(n)]
        bound = tree_cost + base_b + sum(x * y for x, y in zip(out_res, a))
        if bound >= best:
            stats.skipped += 1
            continue
        stats.flows += 1
        try:
            r = solve_fixed_degree_subgraph(d, in_res, out_res)
        except Infeasible:
            continue
        total = tree_cost + cost_of(r, d)
        if total < best:
            for p, c in _tree_edges(memo, full, key):
                r[p][c] += 1
            best, best_m = total, r
    stats.memo_states = len(memo)
    if keep_keys:
        stats.memo_keys = list(memo.keys())
    if best_m is None:
        raise NoSolution("no outbranching sequence admits a solution")
    m = zeros(n)
    for i, u in enumerate(order):
        for j, v in enumerate(order):
            m[u][v] = best_m[i][j]
    return best, m
