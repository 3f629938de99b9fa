"""Instances, solutions and the feasibility checks shared by every engine.

Costs are Python ints (arbitrary precision) with ``INF`` marking a missing
edge. A solution is a multiplicity matrix ``m`` where ``m[u][v]`` counts how
many times the edge ``(u, v)`` is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

INF = math.inf

Matrix = list  # list[list[int]]


class InstanceError(ValueError):
    """Raised when a raw instance description is rejected."""

    reason = "invalid-instance"


class NegativeCost(InstanceError):
    reason = "negative-cost"


class DemandMismatch(InstanceError):
    reason = "demand-mismatch"


class ZeroVisit(InstanceError):
    reason = "zero-visit"


class EmptyInstance(InstanceError):
    reason = "empty-instance"


class NoSolution(Exception):
    """The instance has no feasible solution (or none was found)."""


class NotEulerian(ValueError):
    pass


def is_inf(x) -> bool:
    return x == INF


def max_finite(d) -> int:
    vals = [c for row in d for c in row if c != INF]
    return max(vals) if vals else 0


@dataclass(frozen=True)
class MvtspInstance:
    d: tuple
    k: tuple
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def D(self) -> int:
        return max_finite(self.d)

    @property
    def ell(self) -> int:
        return sum(self.k)

    def to_fdcs(self, root: int = 0) -> "FdcsInstance":
        return FdcsInstance(self.d, self.k, self.k, root=root, name=self.name)


@dataclass(frozen=True)
class FdcsInstance:
    """Fixed Degree Connected Subgraph instance.

    ``root is None`` selects the connected family (a spanning oriented tree
    must be contained); otherwise the solution must contain an outbranching
    rooted at ``root``.
    """

    d: tuple
    ins: tuple
    outs: tuple
    root: Optional[int] = None
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.ins)

    @property
    def D(self) -> int:
        return max_finite(self.d)

    @property
    def M(self) -> int:
        return max(max(self.ins, default=0), max(self.outs, default=0))

    @property
    def ell(self) -> int:
        return sum(self.outs)

    @property
    def family(self) -> str:
        return "connected" if self.root is None else "outbranching"

    def with_root(self, root: int = 0) -> "FdcsInstance":
        return FdcsInstance(self.d, self.ins, self.outs, root, self.name)


def _freeze(d) -> tuple:
    return tuple(tuple(row) for row in d)


def _read_costs(n, raw_costs):
    if not isinstance(raw_costs, (list, tuple)) or len(raw_costs) != n:
        raise InstanceError(f"costs must be an {n}x{n} array")
    d = []
    for row in raw_costs:
        if not isinstance(row, (list, tuple)) or len(row) != n:
            raise InstanceError(f"costs must be an {n}x{n} array")
        out = []
        for c in row:
            if c is None or c == INF:
                out.append(INF)
                continue
            if isinstance(c, bool) or not isinstance(c, int):
                if isinstance(c, float) and c.is_integer():
                    c = int(c)
                else:
                    raise InstanceError(f"cost {c!r} is not an integer")
            if c < 0:
                raise NegativeCost(f"negative cost {c}")
            out.append(c)
        d.append(tuple(out))
    return tuple(d)


def _read_vector(n, raw, what):
    if not isinstance(raw, (list, tuple)) or len(raw) != n:
        raise InstanceError(f"{what} must have length {n}")
    vec = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, int):
            raise InstanceError(f"{what} entry {x!r} is not an integer")
        if x < 0:
            raise InstanceError(f"{what} entry {x} is negative")
        vec.append(x)
    return tuple(vec)


def validate(raw: dict):
    """Turn a parsed JSON-shaped description into an instance.

    Exactly one of ``visits`` (MVTSP) or ``in``/``out`` (FDCS, optional
    ``root``/``family``) must be present.
    """
    if not isinstance(raw, dict):
        raise InstanceError("instance must be a JSON object")
    n = raw.get("n")
    if n is None and "costs" in raw:
        n = len(raw["costs"])
    if isinstance(n, bool) or not isinstance(n, int):
        raise InstanceError("n must be an integer")
    if n < 1:
        raise EmptyInstance("instance has no vertices")
    d = _read_costs(n, raw.get("costs"))
    name = raw.get("name")
    has_visits = "visits" in raw
    has_degrees = "in" in raw or "out" in raw
    if has_visits == has_degrees:
        raise InstanceError("give exactly one of 'visits' or 'in'/'out'")
    if has_visits:
        k = _read_vector(n, raw["visits"], "visits")
        if any(x == 0 for x in k):
            raise ZeroVisit("every vertex must be visited at least once")
        return MvtspInstance(d, k, name)
    ins = _read_vector(n, raw.get("in"), "in")
    outs = _read_vector(n, raw.get("out"), "out")
    if sum(ins) != sum(outs):
        raise DemandMismatch(f"sum(in)={sum(ins)} != sum(out)={sum(outs)}")
    root = raw.get("root")
    family = raw.get("family")
    if family not in (None, "connected", "outbranching"):
        raise InstanceError(f"unknown family {family!r}")
    if family == "outbranching" and root is None:
        root = 0
    if family == "connected":
        root = None
    if root is not None:
        if isinstance(root, bool) or not isinstance(root, int) or not 0 <= root < n:
            raise InstanceError(f"root {root!r} out of range")
    return FdcsInstance(d, ins, outs, root, name)


def instance_to_json(inst) -> dict:
    doc = {"n": inst.n}
    if inst.name is not None:
        doc["name"] = inst.name
    doc["costs"] = [[None if c == INF else c for c in row] for row in inst.d]
    if isinstance(inst, MvtspInstance):
        doc["visits"] = list(inst.k)
    else:
        doc["in"] = list(inst.ins)
        doc["out"] = list(inst.outs)
        if inst.root is not None:
            doc["root"] = inst.root
            doc["family"] = "outbranching"
        else:
            doc["family"] = "connected"
    return doc


def as_fdcs(inst, root=0) -> FdcsInstance:
    if isinstance(inst, MvtspInstance):
        return inst.to_fdcs(root)
    return inst


# -- multiplicities ---------------------------------------------------------

def zeros(n: int) -> Matrix:
    return [[0] * n for _ in range(n)]


def madd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def row_sums(m: Matrix) -> list:
    return [sum(row) for row in m]


def col_sums(m: Matrix) -> list:
    n = len(m)
    return [sum(m[u][v] for u in range(n)) for v in range(n)]


def cost_of(m: Matrix, d) -> int:
    """Total cost ``sum d(u,v) * m(u,v)``; ``INF`` if a used edge is missing."""
    total = 0
    for mrow, drow in zip(m, d):
        for x, c in zip(mrow, drow):
            if x:
                if c == INF:
                    return INF
                total += c * x
    return total


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            return True
        return False


def support_connected(m: Matrix) -> bool:
    """Weak connectivity of the support of ``m`` over all vertices."""
    n = len(m)
    dsu = _DSU(n)
    comps = n
    for u in range(n):
        for v in range(n):
            if u != v and m[u][v] > 0 and dsu.union(u, v):
                comps -= 1
    return comps == 1


def reaches_all(m: Matrix, root: int) -> bool:
    """True iff every vertex is reachable from ``root`` in the support of ``m``."""
    n = len(m)
    seen = [False] * n
    seen[root] = True
    stack = [root]
    while stack:
        u = stack.pop()
        for v in range(n):
            if m[u][v] > 0 and not seen[v]:
                seen[v] = True
                stack.append(v)
    return all(seen)


def _degrees_ok(m, ins, outs) -> bool:
    return row_sums(m) == list(outs) and col_sums(m) == list(ins)


def _shape_ok(m, n) -> bool:
    return len(m) == n and all(len(row) == n for row in m) and all(
        isinstance(x, int) and x >= 0 for row in m for x in row)


def check_solution(inst, m: Matrix) -> Optional[str]:
    """Return ``None`` if ``m`` is feasible for ``inst``, else a failure reason."""
    n = inst.n
    if not _shape_ok(m, n):
        return "shape-mismatch"
    if isinstance(inst, MvtspInstance):
        ins = outs = inst.k
        root = None
    else:
        ins, outs, root = inst.ins, inst.outs, inst.root
    if not _degrees_ok(m, ins, outs):
        return "degree-mismatch"
    if cost_of(m, inst.d) == INF:
        return "infinite-edge"
    if root is not None:
        if not reaches_all(m, root):
            return "not-outbranching"
    elif not support_connected(m):
        return "not-connected"
    return None


def is_feasible_mvtsp(inst: MvtspInstance, m: Matrix) -> bool:
    return check_solution(inst, m) is None


def is_feasible(inst, m: Matrix) -> bool:
    return check_solution(inst, m) is None


def reconstruct_tour(inst: MvtspInstance, m: Matrix) -> list:
    """Eulerian circuit of the multigraph ``G_m`` as a vertex sequence."""
    if not is_feasible_mvtsp(inst, m):
        raise NotEulerian("multiplicity is not a connected balanced multigraph")
    n = inst.n
    remaining = [row[:] for row in m]
    ptr = [0] * n
    stack = [0]
    circuit = []
    while stack:
        u = stack[-1]
        row = remaining[u]
        p = ptr[u]
        while p < n and row[p] == 0:
            p += 1
        ptr[u] = p
        if p == n:
            circuit.append(stack.pop())
        else:
            row[p] -= 1
            stack.append(p)
    circuit.reverse()
    circuit.pop()  # closing copy of the start vertex
    if len(circuit) != inst.ell:
        raise NotEulerian("circuit does not cover every edge")
    return circuit


def tour_edges(seq: Sequence[int], n: int) -> Matrix:
    """Multiplicity matrix of the cyclic consecutive pairs of ``seq``."""
    m = zeros(n)
    for i, u in enumerate(seq):
        m[u][seq[(i + 1) % len(seq)]] += 1
    return m


def is_outtree_sequence(size_of_x: int, delta: Sequence[int], r: int) -> bool:
    """Out-tree outdegree sequence test: root degree >= 1 and sum |X|-1.

    ``delta`` is indexed by position in X and ``r`` is the root's position.
    """
    return delta[r] >= 1 and sum(delta) == size_of_x - 1
