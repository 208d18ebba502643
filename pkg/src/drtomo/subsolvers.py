"""Single-value subproblems: place exactly nu ones in every listed block.

Each subproblem lives on a set I of 2x2 block corners with prescribed
pair sums per strip.  nu = 1 has a closed-form placement, nu = 3 is its
complement, nu = 2 reduces to a unit-capacity flow, nu in {0, 4} is a
constant fill.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .model import Corner

Cell = tuple[int, int]

# below this many blocks the handwritten augmenting-path search beats the
# cost of assembling a sparse matrix for scipy
_SCIPY_THRESHOLD = 64


@dataclass(frozen=True)
class SubInstance:
    """Blocks I with target nu ones each, plus per-strip line sum pairs.

    pair_row_sums[j] = (r_j, r_{j+1}) for each j occurring as a corner row
    of I; pair_col_sums[i] = (c_i, c_{i+1}) likewise for corner columns.
    """

    m: int
    n: int
    nu: int
    I: frozenset[Corner]
    pair_row_sums: dict[int, tuple[int, int]]
    pair_col_sums: dict[int, tuple[int, int]]

    def rho(self, j: int) -> int:
        """Blocks of I in the horizontal strip with corner row j."""
        return self.rho_map().get(j, 0)

    def sigma(self, i: int) -> int:
        """Blocks of I in the vertical strip with corner column i."""
        return self.sigma_map().get(i, 0)

    def rho_map(self) -> dict[int, int]:
        return Counter(j for _, j in self.I)

    def sigma_map(self) -> dict[int, int]:
        return Counter(i for i, _ in self.I)


@dataclass
class PartialImage:
    """Bit assignment on the cells covered by a block set."""

    bits: dict[Cell, int] = field(default_factory=dict)

    def set_block(self, corner: Corner, ones: set[tuple[int, int]]) -> None:
        i, j = corner
        for dx in (0, 1):
            for dy in (0, 1):
                self.bits[(i + dx, j + dy)] = 1 if (dx, dy) in ones else 0

    def merge(self, other: "PartialImage") -> None:
        self.bits.update(other.bits)


@dataclass(frozen=True)
class TwoColorSystem:
    """Pick per block at most one of two colors so each strip meets its target.

    row_targets[j] counts blocks of strip j to be colored zeta;
    col_targets[i] counts blocks of strip i to be colored eta.
    """

    I: frozenset[Corner]
    row_targets: dict[int, int]
    col_targets: dict[int, int]


class FlowNetwork:
    """source -> strip (capacity = target) -> block (1) -> sink (1)."""

    def __init__(self, sys: TwoColorSystem):
        rows = sorted(sys.row_targets)
        cols = sorted(sys.col_targets)
        blocks = sorted(sys.I)
        self.source = 0
        self.sink = 1
        self.row_node = {j: 2 + idx for idx, j in enumerate(rows)}
        self.col_node = {i: 2 + len(rows) + idx for idx, i in enumerate(cols)}
        self.block_node = {b: 2 + len(rows) + len(cols) + idx for idx, b in enumerate(blocks)}
        self.size = 2 + len(rows) + len(cols) + len(blocks)
        self.arcs: list[tuple[int, int, int]] = []  # (u, v, capacity)
        for j in rows:
            self.arcs.append((self.source, self.row_node[j], sys.row_targets[j]))
        for i in cols:
            self.arcs.append((self.source, self.col_node[i], sys.col_targets[i]))
        for i, j in blocks:
            node = self.block_node[(i, j)]
            if j in self.row_node:
                self.arcs.append((self.row_node[j], node, 1))
            if i in self.col_node:
                self.arcs.append((self.col_node[i], node, 1))
            self.arcs.append((node, self.sink, 1))
        self.demand = sum(sys.row_targets.values()) + sum(sys.col_targets.values())


def _max_flow_python(net: FlowNetwork) -> dict[tuple[int, int], int]:
    """BFS augmenting paths; fine for the handful-of-blocks case."""
    cap: dict[tuple[int, int], int] = {}
    adj: dict[int, list[int]] = {u: [] for u in range(net.size)}
    for u, v, c in net.arcs:
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)
        adj[u].append(v)
        adj[v].append(u)
    flow: dict[tuple[int, int], int] = {e: 0 for e in cap}
    while True:
        prev: dict[int, int] = {net.source: net.source}
        queue = [net.source]
        while queue and net.sink not in prev:
            u = queue.pop(0)
            for v in adj[u]:
                if v not in prev and cap[(u, v)] - flow[(u, v)] > 0:
                    prev[v] = u
                    queue.append(v)
        if net.sink not in prev:
            return flow
        path = []
        v = net.sink
        while v != net.source:
            path.append((prev[v], v))
            v = prev[v]
        push = min(cap[e] - flow[e] for e in path)
        for e in path:
            flow[e] += push
            flow[(e[1], e[0])] -= push


def _max_flow_scipy(net: FlowNetwork) -> dict[tuple[int, int], int]:
    us = np.fromiter((a[0] for a in net.arcs), dtype=np.int32)
    vs = np.fromiter((a[1] for a in net.arcs), dtype=np.int32)
    cs = np.fromiter((a[2] for a in net.arcs), dtype=np.int32)
    graph = csr_matrix((cs, (us, vs)), shape=(net.size, net.size))
    result = maximum_flow(graph, net.source, net.sink)
    res = result.flow
    return {(u, v): int(res[u, v]) for u, v, _ in net.arcs}


def solve_two_color(sys: TwoColorSystem) -> Optional[tuple[set[Corner], set[Corner]]]:
    """Return (zeta blocks, eta blocks) meeting every strip target, or None."""
    if any(t < 0 for t in sys.row_targets.values()) or any(
        t < 0 for t in sys.col_targets.values()
    ):
        return None
    net = FlowNetwork(sys)
    if net.demand == 0:
        return set(), set()
    if len(sys.I) < _SCIPY_THRESHOLD:
        flow = _max_flow_python(net)
    else:
        flow = _max_flow_scipy(net)
    value = sum(flow[(net.source, net.row_node[j])] for j in net.row_node) + sum(
        flow[(net.source, net.col_node[i])] for i in net.col_node
    )
    if value < net.demand:
        return None
    zeta, eta = set(), set()
    for (i, j), node in net.block_node.items():
        if j in net.row_node and flow.get((net.row_node[j], node), 0) > 0:
            zeta.add((i, j))
        elif i in net.col_node and flow.get((net.col_node[i], node), 0) > 0:
            eta.add((i, j))
    return zeta, eta


# --------------------------------------------------------------------------
# nu = 1 and its complement nu = 3
# --------------------------------------------------------------------------

def _dr1_feasible(sub: SubInstance) -> bool:
    rho, sigma = sub.rho_map(), sub.sigma_map()
    for j, (rj, rj1) in sub.pair_row_sums.items():
        if rj < 0 or rj1 < 0 or rj + rj1 != rho.get(j, 0):
            return False
    for i, (ci, ci1) in sub.pair_col_sums.items():
        if ci < 0 or ci1 < 0 or ci + ci1 != sigma.get(i, 0):
            return False
    return True


def solve_dr1(sub: SubInstance) -> Optional[PartialImage]:
    """Place one one per block; closed form, deterministic.

    Within the vertical strip of column i, the first c_i blocks counted
    from the bottom use column i and the rest column i+1; rows likewise.
    """
    assert sub.nu == 1
    if not _dr1_feasible(sub):
        return None
    rank_in_col: dict[Corner, int] = {}
    rank_in_row: dict[Corner, int] = {}
    by_col: dict[int, list[int]] = {}
    by_row: dict[int, list[int]] = {}
    for i, j in sub.I:
        by_col.setdefault(i, []).append(j)
        by_row.setdefault(j, []).append(i)
    for i, js in by_col.items():
        for rank, j in enumerate(sorted(js), start=1):
            rank_in_col[(i, j)] = rank
    for j, cols in by_row.items():
        for rank, i in enumerate(sorted(cols), start=1):
            rank_in_row[(i, j)] = rank
    out = PartialImage()
    for i, j in sub.I:
        a = i if rank_in_col[(i, j)] <= sub.pair_col_sums[i][0] else i + 1
        b = j if rank_in_row[(i, j)] <= sub.pair_row_sums[j][0] else j + 1
        out.set_block((i, j), {(a - i, b - j)})
    return out


def unique_dr1(sub: SubInstance) -> bool:
    assert sub.nu == 1
    return all(r[0] * r[1] == 0 for r in sub.pair_row_sums.values()) and all(
        c[0] * c[1] == 0 for c in sub.pair_col_sums.values()
    )


def _invert(sub: SubInstance) -> SubInstance:
    """Complementary sums: a block holds 3 ones iff its complement holds 1."""
    rho, sigma = sub.rho_map(), sub.sigma_map()
    return SubInstance(
        m=sub.m,
        n=sub.n,
        nu=1,
        I=sub.I,
        pair_row_sums={
            j: (2 * rho.get(j, 0) - r[0], 2 * rho.get(j, 0) - r[1])
            for j, r in sub.pair_row_sums.items()
        },
        pair_col_sums={
            i: (2 * sigma.get(i, 0) - c[0], 2 * sigma.get(i, 0) - c[1])
            for i, c in sub.pair_col_sums.items()
        },
    )


def solve_dr3(sub: SubInstance) -> Optional[PartialImage]:
    assert sub.nu == 3
    inner = solve_dr1(_invert(sub))
    if inner is None:
        return None
    return PartialImage({cell: 1 - bit for cell, bit in inner.bits.items()})


def unique_dr3(sub: SubInstance) -> bool:
    assert sub.nu == 3
    return unique_dr1(_invert(sub))


# --------------------------------------------------------------------------
# nu = 2
# --------------------------------------------------------------------------

def _two_color_system(sub: SubInstance) -> Optional[TwoColorSystem]:
    rho, sigma = sub.rho_map(), sub.sigma_map()
    row_targets, col_targets = {}, {}
    for j, (rj, rj1) in sub.pair_row_sums.items():
        if rj < rj1:
            raise ValueError(f"row pair sums at strip {j} not ordered")
        if (rj - rj1) % 2 or rj + rj1 != 2 * rho.get(j, 0):
            return None
        row_targets[j] = (rj - rj1) // 2
    for i, (ci, ci1) in sub.pair_col_sums.items():
        if ci < ci1:
            raise ValueError(f"column pair sums at strip {i} not ordered")
        if (ci - ci1) % 2 or ci + ci1 != 2 * sigma.get(i, 0):
            return None
        col_targets[i] = (ci - ci1) // 2
    return TwoColorSystem(I=sub.I, row_targets=row_targets, col_targets=col_targets)


_BOTTOM_PAIR = {(0, 0), (1, 0)}  # both ones in the bottom line
_LEFT_PAIR = {(0, 0), (0, 1)}  # both ones in the left line
_DIAGONAL = {(0, 0), (1, 1)}


def solve_dr2(sub: SubInstance) -> Optional[PartialImage]:
    """Place two ones per block; requires in-strip ordered pair sums.

    A block colored zeta puts both ones in its lower line, eta in its
    left line, and every uncolored block falls back to the diagonal.
    """
    assert sub.nu == 2
    sys = _two_color_system(sub)
    if sys is None:
        return None
    colored = solve_two_color(sys)
    if colored is None:
        return None
    zeta, eta = colored
    out = PartialImage()
    for corner in sub.I:
        if corner in zeta:
            out.set_block(corner, _BOTTOM_PAIR)
        elif corner in eta:
            out.set_block(corner, _LEFT_PAIR)
        else:
            out.set_block(corner, _DIAGONAL)
    return out


def unique_dr2(sub: SubInstance, sol: PartialImage) -> bool:
    """True iff no other coloring meets the same strip targets.

    Runs a min-cost max-flow whose unit costs sit exactly on the
    strip-to-block arcs the given solution uses; the minimum equals the
    number of colored blocks only when every feasible coloring reuses
    those arcs, which pins the coloring.
    """
    assert sub.nu == 2
    sys = _two_color_system(sub)
    if sys is None:
        raise ValueError("solution given for an infeasible subproblem")
    net = FlowNetwork(sys)
    if net.demand == 0:
        return True
    used: set[tuple[int, int]] = set()
    labeled = 0
    for i, j in sub.I:
        block_ones = {
            (dx, dy)
            for dx in (0, 1)
            for dy in (0, 1)
            if sol.bits.get((i + dx, j + dy))
        }
        node = net.block_node[(i, j)]
        if block_ones == _BOTTOM_PAIR:
            used.add((net.row_node[j], node))
            labeled += 1
        elif block_ones == _LEFT_PAIR:
            used.add((net.col_node[i], node))
            labeled += 1

    g = nx.DiGraph()
    for u, v, c in net.arcs:
        g.add_edge(u, v, capacity=c, weight=1 if (u, v) in used else 0)
    flow_dict = nx.max_flow_min_cost(g, net.source, net.sink)
    value = sum(flow_dict[net.source].values())
    if value < net.demand:
        raise ValueError("solution given for an infeasible subproblem")
    cost = sum(
        flow * g[u][v]["weight"] for u, nbrs in flow_dict.items() for v, flow in nbrs.items()
    )
    return cost == labeled


# --------------------------------------------------------------------------
# nu in {0, 4}
# --------------------------------------------------------------------------

def fill_trivial(sub: SubInstance) -> Optional[PartialImage]:
    """Constant fill for the forced block values 0 and 4."""
    assert sub.nu in (0, 4)
    bit = sub.nu // 4
    rho, sigma = sub.rho_map(), sub.sigma_map()
    for j, (rj, rj1) in sub.pair_row_sums.items():
        want = 2 * rho.get(j, 0) * bit
        if rj != want or rj1 != want:
            return None
    for i, (ci, ci1) in sub.pair_col_sums.items():
        want = 2 * sigma.get(i, 0) * bit
        if ci != want or ci1 != want:
            return None
    out = PartialImage()
    full = {(0, 0), (1, 0), (0, 1), (1, 1)}
    for corner in sub.I:
        out.set_block(corner, full if bit else set())
    return out
