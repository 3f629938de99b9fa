"""Demand reduction: shift a bulk offset out of the demands.

An optimal relaxed (connectivity-free) solution ``r`` is computed by flow.
Every optimal connected solution can be chosen within ``s_n = n - 1`` of
``r`` entrywise, so ``f = max(r - s_n - 1, 0)`` can be fixed in advance and
the residual demands become at most ``n * (1 + s_n) = n^2`` per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import FdcsInstance, madd
from .flow import solve_fixed_degree_subgraph


@dataclass(frozen=True)
class KernelResult:
    reduced: FdcsInstance
    f: list


def family_size(n: int) -> int:
    """Max edge count of a spanning oriented tree / outbranching on n vertices."""
    return n - 1


def kernelize(inst: FdcsInstance) -> KernelResult:
    n = inst.n
    s = family_size(n)
    r = solve_fixed_degree_subgraph(inst.d, inst.ins, inst.outs)
    f = [[max(max(r[v][w] - s, 0) - 1, 0) for w in range(n)] for v in range(n)]
    ins = tuple(inst.ins[v] - sum(f[w][v] for w in range(n)) for v in range(n))
    outs = tuple(inst.outs[v] - sum(f[v]) for v in range(n))
    reduced = FdcsInstance(inst.d, ins, outs, inst.root, inst.name)
    return KernelResult(reduced, f)


def lift(m_star, f):
    return madd(m_star, f)
