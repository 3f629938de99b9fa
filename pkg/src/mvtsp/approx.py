"""(1+eps)-approximation by guessing the most expensive edge and rounding.

With the guess ``E`` fixed, edges above ``E`` are dropped and the rest are
scaled so that the largest becomes ``ceil(C n^3 / eps)``. Rounding loses at
most one unit per used edge, which the scale makes an ``eps`` fraction of
``E`` and hence of the optimum. The rounded instance has small integer
weights, which is the regime the algebraic engine is efficient in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebraic import make_rng, solve_connected
from .core import INF, FdcsInstance, MvtspInstance, NoSolution, cost_of, support_connected, zeros
from .flow import Infeasible, solve_fixed_degree_subgraph
from .kernel import kernelize, lift


@dataclass(frozen=True)
class RoundedInstance:
    d: tuple
    E: int
    scale: Fraction


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def round_costs(d, E, eps, C, n) -> RoundedInstance:
    eps = _frac(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if E <= 0:
        # nothing to scale by: keep the free edges only
        rd = tuple(tuple(0 if c == 0 else INF for c in row) for row in d)
        return RoundedInstance(rd, E, Fraction(0))
    scale = Fraction(C * n ** 3) / (eps * E)
    rd = tuple(tuple(math.ceil(scale * c) if c != INF and c <= E else INF for c in row)
               for row in d)
    return RoundedInstance(rd, E, scale)


def scale_bound(eps, C, n) -> int:
    return math.ceil(Fraction(C * n ** 3) / _frac(eps))


def _edges_connect(d, E):
    m = [[1 if c != INF and c <= E else 0 for c in row] for row in d]
    return support_connected(m)


def solve_approx(inst, eps, seed=0, confidence=0.99, kernel=True, stats=None):
    """``(cost, m)`` with cost at most ``(1+eps)`` times optimal (w.h.p.)."""
    if isinstance(inst, MvtspInstance):
        fd = FdcsInstance(inst.d, inst.k, inst.k, None, inst.name)
    else:
        fd = inst
        if fd.root is not None:
            raise ValueError("the approximation handles the connected family only")
    stats = {} if stats is None else stats
    n = fd.n
    if n == 1:
        c = fd.outs[0]
        if c and fd.d[0][0] == INF:
            raise NoSolution("single vertex without a usable loop")
        return (c * fd.d[0][0] if c else 0), [[c]]
    try:
        if kernel:
            kr = kernelize(fd)
            red, f = kr.reduced, kr.f
        else:
            solve_fixed_degree_subgraph(fd.d, fd.ins, fd.outs)
            red, f = fd, zeros(n)
    except Infeasible as exc:
        raise NoSolution(str(exc)) from None
    C = max(1, math.ceil(max(max(red.ins), max(red.outs)) / n ** 2))
    rng = make_rng(seed)
    guesses = sorted({c for row in red.d for c in row if c != INF})
    best, best_m = INF, None
    stats.setdefault("guesses", 0)
    stats.setdefault("solved", 0)
    for E in guesses:
        if E > best:
            break  # an optimum this cheap cannot use an edge costlier than itself
        stats["guesses"] += 1
        if not _edges_connect(red.d, E):
            continue
        capped = [[c if c != INF and c <= E else INF for c in row] for row in red.d]
        try:
            relaxed = solve_fixed_degree_subgraph(capped, red.ins, red.outs)
        except Infeasible:
            continue
        if cost_of(relaxed, capped) >= best:
            continue
        rounded = round_costs(red.d, E, eps, C, n)
        try:
            m = solve_connected(rounded.d, red.ins, red.outs, rng, confidence, hint=best_m)
        except NoSolution:
            continue
        stats["solved"] += 1
        c = cost_of(m, red.d)
        if c < best:
            best, best_m = c, m
    if best_m is None:
        raise NoSolution("no guess produced a solution")
    m = lift(best_m, f)
    return cost_of(m, fd.d), m
