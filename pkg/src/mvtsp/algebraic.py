"""Randomized exact engine: cut-and-count over a bipartite blow-up graph.

Each vertex ``v`` gets ``out(v)`` out-copies and ``in(v)`` in-copies; a
perfect matching between them is a degree-exact multigraph. Summing the
matching polynomial of ``B[X]`` times that of ``B[V - X]`` over all cuts with
a fixed vertex on one side counts a matching ``2^(components - 1)`` times, so
over GF(2^t) only connected matchings survive. Matching polynomials are
evaluated as determinants (characteristic 2 makes the sign irrelevant).

Edge weights enter as powers of a second variable ``y``; evaluating at the
``N``-th roots of unity and transforming back yields one coefficient per
total weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (INF, MvtspInstance, FdcsInstance, NoSolution, check_solution,
                   col_sums, cost_of, madd, row_sums, support_connected, zeros)
from .flow import Infeasible, fixed_degree_duals, solve_fixed_degree_subgraph
from .gf import (FieldCtx, det_batch, det_char2, field_new, first_nonzero_coeff,
                 subgroup_coeffs, subgroup_coeffs_all, subgroup_order)
from .kernel import kernelize, lift


class FieldTooSmall(ValueError):
    pass


class ExtractionStalled(RuntimeError):
    pass


class RetriesExhausted(NoSolution):
    pass


# Floor on the field degree used inside the solver. The formula alone can
# give GF(4) for tiny weight ranges, where half the oracle answers are wrong.
MIN_SOLVER_T = 10

# elements per batched determinant call; bounds peak memory to a few tens of MB
_BATCH_ELEMENTS = 1 << 21


def make_rng(seed):
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class BlowupGraph:
    n: int
    ins: tuple
    outs: tuple
    o_owner: np.ndarray  # owner vertex of each out-copy
    i_owner: np.ndarray
    edges: list  # (out-copy index, in-copy index)
    weight: np.ndarray  # per edge

    @property
    def size(self) -> int:
        return len(self.i_owner)

    @property
    def max_weight(self) -> int:
        return int(self.weight.max()) if len(self.weight) else 0

    def copy_label(self, side, idx):
        owner = self.o_owner if side == "O" else self.i_owner
        v = int(owner[idx])
        first = int(np.searchsorted(owner, v))
        return (v, side, idx - first + 1)


@dataclass
class Assignment:
    ctx: FieldCtx
    x: np.ndarray  # one field element per blow-up edge
    seed: object = None


def build_blowup(d, ins, outs) -> BlowupGraph:
    n = len(ins)
    o_owner = np.repeat(np.arange(n), outs).astype(np.int64)
    i_owner = np.repeat(np.arange(n), ins).astype(np.int64)
    o_start = np.concatenate([[0], np.cumsum(outs)]).astype(int)
    i_start = np.concatenate([[0], np.cumsum(ins)]).astype(int)
    edges, weight = [], []
    for u in range(n):
        for v in range(n):
            if d[u][v] == INF:
                continue
            for o in range(o_start[u], o_start[u + 1]):
                for i in range(i_start[v], i_start[v + 1]):
                    edges.append((o, i))
                    weight.append(d[u][v])
    return BlowupGraph(n, tuple(ins), tuple(outs), o_owner, i_owner, edges,
                       np.array(weight, dtype=np.int64))


def random_assignment(B: BlowupGraph, ctx: FieldCtx, rng) -> Assignment:
    return Assignment(ctx, ctx.random(rng, len(B.edges)))


def contract_matching(M, B: BlowupGraph):
    m = zeros(B.n)
    for e in M:
        o, i = B.edges[e]
        m[int(B.o_owner[o])][int(B.i_owner[i])] += 1
    return m


def is_connected_perfect_matching(B: BlowupGraph, Y) -> bool:
    Y = list(Y)
    if len(B.o_owner) != len(B.i_owner) or len(Y) != len(B.o_owner):
        return False
    os_ = {B.edges[e][0] for e in Y}
    is_ = {B.edges[e][1] for e in Y}
    if len(os_) != len(Y) or len(is_) != len(Y):
        return False
    return support_connected(contract_matching(Y, B))


def _members(X, n):
    if isinstance(X, int):
        return [v for v in range(n) if X >> v & 1]
    return sorted(X)


def eval_PX(B: BlowupGraph, X, asg: Assignment) -> int:
    """Matching polynomial of ``B[X]`` at the assignment, as a determinant."""
    inside = set(_members(X, B.n))
    rows = [o for o in range(len(B.o_owner)) if int(B.o_owner[o]) in inside]
    cols = [i for i in range(len(B.i_owner)) if int(B.i_owner[i]) in inside]
    if len(rows) != len(cols):
        return 0
    r_at = {o: k for k, o in enumerate(rows)}
    c_at = {i: k for k, i in enumerate(cols)}
    A = [[0] * len(cols) for _ in rows]
    for e, (o, i) in enumerate(B.edges):
        if o in r_at and i in c_at:
            A[r_at[o]][c_at[i]] = int(asg.x[e])
    return det_char2(asg.ctx, A)


def eval_P(B: BlowupGraph, asg: Assignment, v_star: int = 0) -> int:
    """Cut-and-count sum, one pair of determinants per cut."""
    n = B.n
    full = (1 << n) - 1
    total = 0
    for X in range(1 << n):
        if X >> v_star & 1:
            total ^= asg.ctx.mul(eval_PX(B, X, asg), eval_PX(B, full ^ X, asg))
    return total


# -- batched evaluation -----------------------------------------------------

def cut_sides(n, v_star=0, together=()):
    """Bitmasks X containing ``v_star`` that keep each pair in ``together`` on
    one side."""
    out = []
    for X in range(1 << n):
        if not X >> v_star & 1:
            continue
        if all((X >> u & 1) == (X >> v & 1) for u, v in together):
            out.append(X)
    return out


def _balanced(B: BlowupGraph, subsets):
    keep = []
    for X in subsets:
        a = sum(B.outs[v] for v in range(B.n) if X >> v & 1)
        b = sum(B.ins[v] for v in range(B.n) if X >> v & 1)
        if a == b:
            keep.append(X)
    return keep


def _evaluate(B: BlowupGraph, ctx: FieldCtx, x, subsets, N=None):
    """Cut-and-count values of the weighted matrix.

    The product of the two sides' determinants equals one determinant of the
    full matrix with every cross-cut entry zeroed. Without ``N`` this returns
    a length-1 array (``y = 1``); with ``N`` it returns the values at the
    ``N`` powers of an element of order ``N``.
    """
    subsets = _balanced(B, subsets)
    P = 1 if N is None else N
    if not subsets:
        return np.zeros(P, dtype=np.int64)
    size = B.size
    E = len(B.edges)
    S = len(subsets)
    if size == 0:
        return np.full(P, S & 1, dtype=np.int64)
    X = np.array(subsets, dtype=np.int64)
    o_idx = np.array([o for o, _ in B.edges], dtype=np.int64).reshape(E)
    i_idx = np.array([i for _, i in B.edges], dtype=np.int64).reshape(E)
    o_side = (X[:, None] >> B.o_owner[None, :]) & 1
    i_side = (X[:, None] >> B.i_owner[None, :]) & 1
    keep = (o_side[:, o_idx] == i_side[:, i_idx]).astype(np.int64)  # (S, E)
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(P, dtype=np.int64)
    chunk = max(1, _BATCH_ELEMENTS // (S * size * size))
    for p0 in range(0, P, chunk):
        pts = np.arange(p0, min(P, p0 + chunk), dtype=np.int64)
        if N is None:
            ent = x[None, :]
        else:
            step = (ctx.q - 1) // N
            ypow = ctx.vpow_gen(step * ((pts[:, None] * B.weight[None, :]) % N))
            ent = ctx.vmul(x[None, :], ypow)
        T = np.zeros((len(pts), S, size, size), dtype=np.int64)
        T[:, :, o_idx, i_idx] = ent[:, None, :] * keep[None, :, :]
        dets = det_batch(ctx, T.reshape(-1, size, size)).reshape(len(pts), S)
        out[p0:p0 + len(pts)] = np.bitwise_xor.reduce(dets, axis=1)
    return out


def eval_P_fast(B: BlowupGraph, asg: Assignment, v_star: int = 0) -> int:
    return int(_evaluate(B, asg.ctx, asg.x, cut_sides(B.n, v_star))[0])


def decision_field_degree(n, M) -> int:
    t = math.ceil(1 + math.log2(n) + (math.log2(M) if M > 0 else 0))
    return max(2, t)


def weighted_field_degree(size, D) -> int:
    t = math.ceil(math.log2(max(2 * size * (D + 1), size * D + 2)))
    return max(2, t)


def decide_connected_pm(B: BlowupGraph, trials: int, seed, v_star: int = 0) -> bool:
    """One-sided test: True means a connected perfect matching certainly exists."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    M = max(max(B.ins, default=0), max(B.outs, default=0))
    ctx = field_new(decision_field_degree(B.n, M))
    subsets = cut_sides(B.n, v_star)
    for _ in range(trials):
        x = ctx.random(rng, len(B.edges))
        if _evaluate(B, ctx, x, subsets)[0]:
            return True
    return False


def eval_weighted_coeffs(B: BlowupGraph, asg: Assignment, v_star: int = 0) -> list:
    """All y-coefficients ``0..|I|*D`` of the cut-and-count sum at ``asg``."""
    ctx = asg.ctx
    deg = B.size * B.max_weight
    if ctx.q < max(2 * B.size * (B.max_weight + 1), deg + 2):
        raise FieldTooSmall(f"GF(2^{ctx.t}) too small for degree {deg}")
    N = subgroup_order(ctx, deg + 1)
    values = _evaluate(B, ctx, asg.x, cut_sides(B.n, v_star), N)
    return [int(c) for c in subgroup_coeffs_all(ctx, values, N, deg + 1)]


# -- witness extraction -----------------------------------------------------

def extract_witness(B: BlowupGraph, inclusion_oracle, seed, strategy="pass"):
    """Shrink the full edge set to a connected perfect matching.

    ``inclusion_oracle(Y)`` answers whether a wanted witness lies within the
    edge-index set ``Y``. ``strategy`` is ``"pass"`` (drop edges one at a
    time in random order) or ``"halving"`` (try to drop blocks first).
    """
    rng = make_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    Y = set(range(len(B.edges)))
    target = B.size
    while len(Y) > target:
        removed = 0
        order = [int(e) for e in rng.permutation(sorted(Y))]
        if strategy == "halving":
            removed += _drop_blocks(Y, order, inclusion_oracle, target)
        else:
            for e in order:
                if len(Y) == target:
                    break
                if inclusion_oracle(Y - {e}):
                    Y.discard(e)
                    removed += 1
        if not removed:
            raise ExtractionStalled("a full pass removed nothing")
    if not is_connected_perfect_matching(B, Y):
        raise ExtractionStalled("result is not a connected perfect matching")
    return frozenset(Y)


def _drop_blocks(Y, order, oracle, target):
    removed = 0
    stack = [order]
    while stack and len(Y) > target:
        block = [e for e in stack.pop() if e in Y]
        if not block:
            continue
        if len(Y) - len(block) >= target and oracle(Y - set(block)):
            Y.difference_update(block)
            removed += len(block)
        elif len(block) > 1:
            mid = len(block) // 2
            stack.append(block[mid:])
            stack.append(block[:mid])
    return removed


def weight_oracle(B: BlowupGraph, w_star: int, rng, amplify: int = 2, v_star: int = 0):
    """Inclusion oracle: does an edge subset carry a connected matching of
    total weight exactly ``w_star``?"""
    subsets = cut_sides(B.n, v_star)
    deg = B.size * B.max_weight
    ctx = field_new(weighted_field_degree(B.size, B.max_weight))
    N = subgroup_order(ctx, deg + 1)

    def oracle(Y):
        mask = np.zeros(len(B.edges), dtype=np.int64)
        mask[list(Y)] = 1
        for _ in range(amplify):
            x = ctx.random(rng, len(B.edges)) * mask
            vals = _evaluate(B, ctx, x, subsets, N)
            if subgroup_coeffs(ctx, vals, N, [w_star])[0]:
                return True
        return False

    return oracle


# -- solver -----------------------------------------------------------------

def _runs_for(confidence, error=0.5):
    """Repetitions for the requested confidence at per-run error ``error``."""
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    worst = max(1, math.ceil(math.log2(1 / (1 - confidence))))
    if error <= 0:
        return 1
    if error >= 0.5:
        return worst
    return min(worst, max(1, math.ceil(math.log(1 - confidence) / math.log(error))))


def _prune(w, limit):
    return [[c if c != INF and c <= limit else INF for c in row] for row in w]


def _weight_window(w, ins, outs):
    """Smallest and largest total weight of any degree-exact multiplicity, or
    ``None`` if there is none. Two flows; the second on flipped weights."""
    try:
        low = solve_fixed_degree_subgraph(w, ins, outs)
    except Infeasible:
        return None
    top = max((c for row in w for c in row if c != INF), default=0)
    flipped = [[top - c if c != INF else INF for c in row] for row in w]
    high = solve_fixed_degree_subgraph(flipped, ins, outs)
    return cost_of(low, w), sum(outs) * top - cost_of(high, flipped)


class _Weighted:
    """Evaluations of the weighted cut-and-count sum on a pruned blow-up.

    Every monomial has total weight inside ``[lo, hi]``, so ``hi - lo + 1``
    roots of unity separate the coefficients (indices alias mod ``N``).
    """

    def __init__(self, w, ins, outs, limit, together=()):
        pruned = _prune(w, limit)
        self.window = _weight_window(pruned, ins, outs)
        self.B = build_blowup(pruned, ins, outs)
        self.subsets = cut_sides(len(ins), 0, together)
        B = self.B
        t = max(weighted_field_degree(B.size, B.max_weight), MIN_SOLVER_T)
        self.ctx = field_new(t)
        if self.window is not None:
            lo, hi = self.window
            self.N = subgroup_order(self.ctx, hi - lo + 1)
        # Schwartz-Zippel: each coefficient is homogeneous of degree |I| in x
        self.error = B.size / self.ctx.q

    def values(self, rng):
        x = self.ctx.random(rng, len(self.B.edges))
        return _evaluate(self.B, self.ctx, x, self.subsets, self.N)


def _least_weight(w, ins, outs, rng, confidence, stats, start=0):
    """Least total weight of a connected degree-exact solution, or None.

    Thresholds double, so early rounds only see cheap edges and need few
    interpolation points. A coefficient found at or below the threshold is
    final because every cheaper solution lives in the pruned graph.
    """
    top = max((c for row in w for c in row if c != INF), default=0)
    W = min(start, top)
    while True:
        full = W >= top
        ev = _Weighted(w, ins, outs, W)
        best = None
        if ev.window is not None and (full or ev.window[0] <= W):
            lo, hi = ev.window
            # only indices up to the threshold matter until every edge is in
            stop = hi + 1 if full else min(W, hi) + 1
            for _ in range(_runs_for(confidence, ev.error)):
                vals = ev.values(rng)
                stats["evaluations"] = stats.get("evaluations", 0) + 1
                j = first_nonzero_coeff(ev.ctx, vals, ev.N, lo, stop if best is None else best)
                if j is not None:
                    best = j
        if best is not None:
            return best
        if full:
            return None
        W = min(top, max(1, 2 * W))


def _pair_oracle(w, ins, outs, F, target, rng, amplify):
    """Is there a connected solution containing multiset ``F`` whose
    remaining edges weigh exactly ``target``?"""
    n = len(ins)
    rin = [ins[v] - s for v, s in enumerate(col_sums(F))]
    rout = [outs[v] - s for v, s in enumerate(row_sums(F))]
    if min(rin) < 0 or min(rout) < 0 or target < 0:
        return False
    together = [(u, v) for u in range(n) for v in range(n) if u != v and F[u][v]]
    ev = _Weighted(w, rin, rout, target, together)
    if ev.window is None or not ev.window[0] <= target <= ev.window[1]:
        return False
    for _ in range(amplify):
        if subgroup_coeffs(ev.ctx, ev.values(rng), ev.N, [target])[0]:
            return True
    return False


def _extract_pairs(w, ins, outs, w_star, rng, amplify, stats):
    """Grow the solution one edge copy at a time, keeping the oracle happy."""
    n = len(ins)
    F = zeros(n)
    used = 0
    rout, rin = list(outs), list(ins)
    for u in range(n):
        for v in range(n):
            c = w[u][v]
            if c == INF or c > w_star:
                continue
            while rout[u] and rin[v] and used + c <= w_star:
                F[u][v] += 1
                stats["queries"] = stats.get("queries", 0) + 1
                if _pair_oracle(w, ins, outs, F, w_star - used - c, rng, amplify):
                    used += c
                    rout[u] -= 1
                    rin[v] -= 1
                else:
                    F[u][v] -= 1
                    break
    if any(rout) or any(rin) or used != w_star:
        raise ExtractionStalled("pair extraction did not reach a full solution")
    return F


def _extract_edges(w, ins, outs, w_star, rng, amplify, strategy):
    B = build_blowup(_prune(w, w_star), ins, outs)
    oracle = weight_oracle(B, w_star, rng, amplify)
    Y = extract_witness(B, oracle, rng, strategy)
    return contract_matching(Y, B)


def solve_connected(d, ins, outs, rng, confidence=0.99, amplify=2,
                    extraction="pairs", retries=8, stats=None, hint=None):
    """Cheapest weakly connected degree-exact multiplicity over ``d``.

    Edge costs are first replaced by reduced costs from an optimal dual of
    the connectivity-free problem. Every degree-exact solution then differs
    from its original cost by the same constant, so optima are preserved
    while the weights that enter the polynomial shrink.

    ``hint`` may be any feasible solution; its weight caps the search.
    """
    stats = {} if stats is None else stats
    n = len(ins)
    try:
        _, a, b = fixed_degree_duals(d, ins, outs)
    except Infeasible as exc:
        raise NoSolution(str(exc)) from None
    w = [[d[u][v] - a[u] - b[v] if d[u][v] != INF else INF for v in range(n)]
         for u in range(n)]
    inst = FdcsInstance(tuple(map(tuple, d)), tuple(ins), tuple(outs))
    start = 0
    if hint is not None and check_solution(inst, hint) is None:
        start = cost_of(hint, w)
    w_star = _least_weight(w, ins, outs, rng, confidence, stats, start)
    if w_star is None:
        raise NoSolution("no connected degree-exact solution detected")
    stats["w_star"] = w_star
    # a nonzero coefficient proves a solution of weight w_star exists, so
    # failed extractions retry with the same target
    for _ in range(retries):
        try:
            if extraction == "pairs":
                m = _extract_pairs(w, ins, outs, w_star, rng, amplify, stats)
            else:
                m = _extract_edges(w, ins, outs, w_star, rng, amplify, extraction)
        except ExtractionStalled:
            stats["stalls"] = stats.get("stalls", 0) + 1
            continue
        if check_solution(inst, m) is None:
            return m
        stats["stalls"] = stats.get("stalls", 0) + 1
    raise RetriesExhausted(f"no verified witness after {retries} attempts")


def solve_algebraic(inst, seed=0, confidence=0.99, amplify=2, extraction="pairs",
                    retries=8, kernel=True, stats=None):
    """Returns ``(cost, m)`` for an MVTSP or connected-family FDCS instance."""
    if isinstance(inst, FdcsInstance) and inst.root is not None:
        raise ValueError("the algebraic engine handles the connected family only")
    if isinstance(inst, MvtspInstance):
        fd = FdcsInstance(inst.d, inst.k, inst.k, None, inst.name)
    else:
        fd = inst
    rng = make_rng(seed)
    stats = {} if stats is None else stats
    if kernel:
        try:
            kr = kernelize(fd)
        except Infeasible as exc:
            raise NoSolution(str(exc)) from None
        red, f = kr.reduced, kr.f
    else:
        red, f = fd, zeros(fd.n)
    if fd.n == 1:
        m = [[fd.outs[0]]] if fd.outs[0] == 0 or fd.d[0][0] != INF else None
        if m is None:
            raise NoSolution("single vertex without a usable loop")
    else:
        m = lift(solve_connected(red.d, red.ins, red.outs, rng, confidence,
                                 amplify, extraction, retries, stats), f)
    if check_solution(inst, m) is not None:  # pragma: no cover - guarded above
        raise RetriesExhausted("lifted solution failed verification")
    return cost_of(m, inst.d), m
