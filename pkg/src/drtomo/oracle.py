"""Exhaustive reference solver: exact answers at small scale, by search.

This is the ground truth the fast solver is measured against, and the only
way in this package to decide noisy or k > 2 instances exactly.  Nothing
here tries to be fast beyond pruning and pre-elimination.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .model import BinaryImage, Instance


@dataclass(frozen=True)
class SearchBudget:
    """Caps for a single search run."""

    max_solutions: int = 1_000_000
    max_nodes: int = 50_000_000

    def __post_init__(self):
        if self.max_solutions <= 0 or self.max_nodes <= 0:
            raise ValueError("budget caps must be positive")


class _Search:
    """One depth-first enumeration over the undecided cells of an instance."""

    def __init__(self, inst: Instance, budget: SearchBudget, collect: bool):
        self.inst = inst
        self.budget = budget
        self.collect = collect
        self.solutions: list[BinaryImage] = []
        self.count = 0
        self.nodes = 0
        self.exhausted = True

        k, m, n = inst.k, inst.m, inst.n
        self.k = k
        self.grid = [[-1] * (m + 1) for _ in range(n + 1)]  # grid[q][p] in {-1,0,1}
        self.row_need = list(inst.row_sums)  # remaining ones wanted per row
        self.col_need = list(inst.col_sums)
        self.row_free = [m] * n  # undecided cells per row
        self.col_free = [n] * m
        bw, bh = m // k, n // k
        self.bw = bw
        self.windows = [inst.window(k * (b % bw) + 1, k * (b // bw) + 1) for b in range(bw * bh)]
        self.blk_used = [0] * (bw * bh)
        self.blk_free = [k * k] * (bw * bh)
        self.contradiction = False

    def _blk(self, p: int, q: int) -> int:
        return ((q - 1) // self.k) * self.bw + (p - 1) // self.k

    def _set(self, p: int, q: int, bit: int) -> bool:
        """Fix one cell; False on an immediate capacity violation."""
        self.grid[q][p] = bit
        self.row_free[q - 1] -= 1
        self.col_free[p - 1] -= 1
        b = self._blk(p, q)
        self.blk_free[b] -= 1
        if bit:
            self.row_need[q - 1] -= 1
            self.col_need[p - 1] -= 1
            self.blk_used[b] += 1
        lo, hi = self.windows[b]
        return (
            0 <= self.row_need[q - 1] <= self.row_free[q - 1]
            and 0 <= self.col_need[p - 1] <= self.col_free[p - 1]
            and self.blk_used[b] <= hi
            and self.blk_used[b] + self.blk_free[b] >= lo
        )

    def _unset(self, p: int, q: int) -> None:
        bit = self.grid[q][p]
        self.grid[q][p] = -1
        self.row_free[q - 1] += 1
        self.col_free[p - 1] += 1
        b = self._blk(p, q)
        self.blk_free[b] += 1
        if bit:
            self.row_need[q - 1] += 1
            self.col_need[p - 1] += 1
            self.blk_used[b] -= 1

    def preeliminate(self) -> None:
        """Fix every cell forced by rows, columns or block windows, to fixpoint."""
        inst = self.inst
        changed = True
        while changed and not self.contradiction:
            changed = False
            for q in range(1, inst.n + 1):
                changed |= self._force_line(
                    [(p, q) for p in range(1, inst.m + 1)], self.row_need[q - 1]
                )
            for p in range(1, inst.m + 1):
                changed |= self._force_line(
                    [(p, q) for q in range(1, inst.n + 1)], self.col_need[p - 1]
                )
            for b, (lo, hi) in enumerate(self.windows):
                i = self.k * (b % self.bw) + 1
                j = self.k * (b // self.bw) + 1
                cells = [
                    (i + dx, j + dy) for dy in range(self.k) for dx in range(self.k)
                ]
                free = [c for c in cells if self.grid[c[1]][c[0]] < 0]
                used = self.blk_used[b]
                if used > hi or used + len(free) < lo:
                    self.contradiction = True
                    return
                if free and used == hi:
                    changed |= self._force_cells(free, 0)
                elif free and used + len(free) == lo:
                    changed |= self._force_cells(free, 1)

    def _force_line(self, cells: list[tuple[int, int]], need: int) -> bool:
        free = [c for c in cells if self.grid[c[1]][c[0]] < 0]
        if need < 0 or need > len(free):
            self.contradiction = True
            return False
        if free and need == 0:
            return self._force_cells(free, 0)
        if free and need == len(free):
            return self._force_cells(free, 1)
        return False

    def _force_cells(self, cells: list[tuple[int, int]], bit: int) -> bool:
        for p, q in cells:
            if not self._set(p, q, bit):
                self.contradiction = True
        return True

    def run(self) -> None:
        if self.contradiction:
            return
        free = [
            (p, q)
            for q in range(1, self.inst.n + 1)
            for p in range(1, self.inst.m + 1)
            if self.grid[q][p] < 0
        ]
        limit = sys.getrecursionlimit()
        if len(free) + 100 > limit:
            sys.setrecursionlimit(len(free) + 200)
        try:
            self._dfs(free, 0)
        finally:
            sys.setrecursionlimit(limit)

    def _dfs(self, free: list[tuple[int, int]], depth: int) -> bool:
        """Returns False when the budget is spent and the search must stop."""
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            self.exhausted = False
            return False
        if depth == len(free):
            self.count += 1
            if self.collect:
                a = np.array(
                    [row[1:] for row in self.grid[1:]], dtype=np.uint8
                )
                self.solutions.append(BinaryImage(a))
            if self.count >= self.budget.max_solutions:
                self.exhausted = False
                return False
            return True
        p, q = free[depth]
        for bit in (0, 1):
            ok = self._set(p, q, bit)
            if ok:
                if not self._dfs(free, depth + 1):
                    self._unset(p, q)
                    return False
            self._unset(p, q)
        return True


def oracle_solve(
    inst: Instance, budget: SearchBudget = SearchBudget()
) -> tuple[list[BinaryImage], bool]:
    """Enumerate solutions of an arbitrary instance by pruned search.

    Returns the solutions found (deterministic order: cells are tried in
    row-major order from the bottom row up, zero before one) and a flag
    that is True iff the whole space was covered within budget, so the
    list is complete up to max_solutions.
    """
    if sum(inst.row_sums) != sum(inst.col_sums):
        return [], True
    s = _Search(inst, budget, collect=True)
    s.preeliminate()
    s.run()
    return s.solutions, s.exhausted


def constrained_solve(
    inst: Instance,
    fixed: dict[tuple[int, int], int],
    budget: SearchBudget = SearchBudget(),
) -> tuple[list[BinaryImage], bool]:
    """oracle_solve with some cells pinned to given bits beforehand.

    Useful when outside knowledge says certain cells must hold a known
    value in every solution; the search then only branches on the rest.
    """
    if sum(inst.row_sums) != sum(inst.col_sums):
        return [], True
    s = _Search(inst, budget, collect=True)
    for (p, q), bit in fixed.items():
        if not s._set(p, q, bit):
            return [], True
    s.preeliminate()
    s.run()
    return s.solutions, s.exhausted


def oracle_count(
    inst: Instance, budget: SearchBudget = SearchBudget()
) -> tuple[int, bool]:
    """Count solutions without materializing them; same search as oracle_solve."""
    if sum(inst.row_sums) != sum(inst.col_sums):
        return 0, True
    s = _Search(inst, budget, collect=False)
    s.preeliminate()
    s.run()
    return s.count, s.exhausted
