"""Shared helpers for the test suite."""

import itertools

import numpy as np
import pytest

from drtomo.model import BinaryImage, Instance


def image_from_code(code: int, m: int = 4, n: int = 4) -> BinaryImage:
    """Bit r*m+c of code becomes cell (c+1, r+1); enumerates all m*n images."""
    a = np.zeros((n, m), dtype=np.uint8)
    for r in range(n):
        for c in range(m):
            if (code >> (r * m + c)) & 1:
                a[r, c] = 1
    return BinaryImage(a)


def single_block_instance(
    v: int,
    row_pair: tuple[int, int],
    col_pair: tuple[int, int],
    epsilon: int = 0,
) -> Instance:
    """A 2x2 instance with one block of value v and the given line sums."""
    reliable = frozenset({(1, 1)}) if epsilon == 0 else frozenset()
    return Instance(
        k=2,
        epsilon=epsilon,
        m=2,
        n=2,
        row_sums=row_pair,
        col_sums=col_pair,
        blocks=((v,),),
        reliable=reliable,
    )


def iter_block_patterns(nu: int):
    """All subsets of a 2x2 cell with nu ones, as offset sets."""
    cells = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for combo in itertools.combinations(cells, nu):
        yield frozenset(combo)


def brute_force_sub(sub) -> list[dict]:
    """All bit assignments solving a SubInstance, by block-pattern enumeration."""
    blocks = sorted(sub.I)
    patterns = list(iter_block_patterns(sub.nu))
    out = []
    for choice in itertools.product(patterns, repeat=len(blocks)):
        bits = {}
        for (i, j), ones in zip(blocks, choice):
            for dx in (0, 1):
                for dy in (0, 1):
                    bits[(i + dx, j + dy)] = 1 if (dx, dy) in ones else 0
        if _sub_sums_ok(sub, bits):
            out.append(bits)
    return out


def _sub_sums_ok(sub, bits: dict) -> bool:
    for j, (rj, rj1) in sub.pair_row_sums.items():
        got_j = sum(b for (p, q), b in bits.items() if q == j)
        got_j1 = sum(b for (p, q), b in bits.items() if q == j + 1)
        if (got_j, got_j1) != (rj, rj1):
            return False
    for i, (ci, ci1) in sub.pair_col_sums.items():
        got_i = sum(b for (p, q), b in bits.items() if p == i)
        got_i1 = sum(b for (p, q), b in bits.items() if p == i + 1)
        if (got_i, got_i1) != (ci, ci1):
            return False
    return True
