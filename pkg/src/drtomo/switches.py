"""Local block rewrites that preserve all row, column and block sums.

Seven rewrite classes exist per orientation.  Classes 1 to 6 touch two
blocks sharing a strip, class 7 flips a single anti-diagonal block to the
main diagonal.  Forward application drives an image toward the reduced
form; the existence of an applicable reversed rewrite on a solution
certifies that the solution is not unique.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .model import BinaryImage, BlockType, Corner, Instance, classify_block, verify_solution

_T = BlockType

# Each rule is (class, slot A map, slot B map): a pair of same-strip blocks
# matches when one block's type is a key of slot A and the other's a key of
# slot B; applying the rule rewrites both blocks to their mapped types.
# Slot key sets are disjoint within every rule.
_H_RULES: list[tuple[int, dict, dict]] = [
    (1, {_T.A11: _T.A21, _T.A12: _T.A22}, {_T.B2: _T.B33}),
    (2, {_T.A21: _T.A11, _T.A22: _T.A12}, {_T.B1: _T.B33}),
    (3, {_T.B1: _T.B33}, {_T.B2: _T.B33}),
    (4, {_T.C21: _T.C11, _T.C22: _T.C12}, {_T.B2: _T.B33}),
    (5, {_T.C11: _T.C21, _T.C12: _T.C22}, {_T.B1: _T.B33}),
    (6, {_T.A11: _T.A21, _T.A12: _T.A22}, {_T.C11: _T.C21, _T.C12: _T.C22}),
]
_V_RULES: list[tuple[int, dict, dict]] = [
    (1, {_T.A11: _T.A12, _T.A21: _T.A22}, {_T.B32: _T.B33}),
    (2, {_T.A12: _T.A11, _T.A22: _T.A21}, {_T.B31: _T.B33}),
    (3, {_T.B32: _T.B33}, {_T.B31: _T.B33}),
    (4, {_T.C12: _T.C11, _T.C22: _T.C21}, {_T.B32: _T.B33}),
    (5, {_T.C11: _T.C12, _T.C21: _T.C22}, {_T.B31: _T.B33}),
    (6, {_T.A11: _T.A12, _T.A21: _T.A22}, {_T.C11: _T.C12, _T.C21: _T.C22}),
]
_CLASS7 = {_T.B34: _T.B33}

FORWARD = "forward"
REVERSED = "reversed"


@dataclass(frozen=True)
class SwitchMove:
    orientation: str  # "horizontal" | "vertical"
    cls: int  # 1..7
    direction: str  # FORWARD | REVERSED
    corners: tuple[Corner, ...]  # one corner for class 7, two otherwise
    sources: tuple[BlockType, ...]  # current types, aligned with corners
    targets: tuple[BlockType, ...]  # rewritten types


def _invert(rule_map: dict) -> dict:
    return {v: k for k, v in rule_map.items()}


def _rules(orientation: str, direction: str) -> list[tuple[int, dict, dict]]:
    rules = _H_RULES if orientation == "horizontal" else _V_RULES
    if direction == FORWARD:
        return rules
    return [(cls, _invert(a), _invert(b)) for cls, a, b in rules]


def _type_grid(img: BinaryImage) -> dict[Corner, BlockType]:
    return {
        (i, j): classify_block(img, (i, j))
        for j in range(1, img.n, 2)
        for i in range(1, img.m, 2)
    }


def _strips(m: int, n: int, orientation: str) -> list[list[Corner]]:
    """Block corners per strip, in scan order within each strip."""
    if orientation == "horizontal":
        return [[(i, j) for i in range(1, m, 2)] for j in range(1, n, 2)]
    return [[(i, j) for j in range(1, n, 2)] for i in range(1, m, 2)]


def _pair_moves_in_strip(
    strip: list[Corner],
    types: dict[Corner, BlockType],
    cls: int,
    slot_a: dict,
    slot_b: dict,
    orientation: str,
    direction: str,
) -> Iterator[SwitchMove]:
    for idx1, b1 in enumerate(strip):
        t1 = types[b1]
        if t1 in slot_a:
            other, mine = slot_b, slot_a
        elif t1 in slot_b:
            other, mine = slot_a, slot_b
        else:
            continue
        for b2 in strip[idx1 + 1 :]:
            t2 = types[b2]
            if t2 in other:
                yield SwitchMove(
                    orientation,
                    cls,
                    direction,
                    (b1, b2),
                    (t1, t2),
                    (mine[t1], other[t2]),
                )


def _moves(img_or_types, m: int, n: int, direction: str) -> Iterator[SwitchMove]:
    """All applicable moves in the deterministic scan order.

    Order: class ascending; within a class horizontal strips before
    vertical; strips bottom-to-top (left-to-right for vertical); block
    pairs within a strip in lexicographic order.  Class 7 visits single
    blocks in horizontal strip order.
    """
    types = img_or_types
    cls7 = _CLASS7 if direction == FORWARD else _invert(_CLASS7)
    layout = {o: _strips(m, n, o) for o in ("horizontal", "vertical")}
    present = {
        o: [{types[c] for c in strip} for strip in layout[o]] for o in layout
    }
    for cls in range(1, 8):
        for orientation in ("horizontal", "vertical"):
            if cls == 7:
                if orientation == "vertical":
                    continue  # the single-block flip is orientation-free
                for j in range(1, n, 2):
                    for i in range(1, m, 2):
                        t = types[(i, j)]
                        if t in cls7:
                            yield SwitchMove(
                                orientation, 7, direction, ((i, j),), (t,), (cls7[t],)
                            )
                continue
            _, slot_a, slot_b = _rules(orientation, direction)[cls - 1]
            for strip, here in zip(layout[orientation], present[orientation]):
                if not (here & slot_a.keys() and here & slot_b.keys()):
                    continue
                yield from _pair_moves_in_strip(
                    strip, types, cls, slot_a, slot_b, orientation, direction
                )


def find_switch(img: BinaryImage, direction: str = FORWARD) -> Optional[SwitchMove]:
    """First applicable rewrite under the documented scan order, if any."""
    if img.m % 2 or img.n % 2:
        raise ValueError("image dimensions must be even")
    return next(_moves(_type_grid(img), img.m, img.n, direction), None)


def all_switches(img: BinaryImage, direction: str = FORWARD) -> list[SwitchMove]:
    return list(_moves(_type_grid(img), img.m, img.n, direction))


def _write_block(a, corner: Corner, t: BlockType) -> None:
    i, j = corner
    a[j - 1 : j + 1, i - 1 : i + 1] = 0
    for dx, dy in t.cells:
        a[j - 1 + dy, i - 1 + dx] = 1


def apply_switch(img: BinaryImage, move: SwitchMove) -> BinaryImage:
    """Rewrite the move's blocks; every line and block sum is unchanged."""
    for corner, src in zip(move.corners, move.sources):
        if classify_block(img, corner) != src:
            raise ValueError(f"block at {corner} is not of type {src.name}")
    a = img.mutable()
    for corner, tgt in zip(move.corners, move.targets):
        _write_block(a, corner, tgt)
    return BinaryImage(a)


class _ReduceEngine:
    """Incremental search for the first forward move.

    Mirrors the scan order of find_switch but keeps per-strip type
    counters up to date across applications, so finding the next move
    does not reclassify the whole image.
    """

    def __init__(self, img: BinaryImage):
        self.m, self.n = img.m, img.n
        self.a = img.mutable()
        self.types = _type_grid(img)
        self.layout = {o: _strips(self.m, self.n, o) for o in ("horizontal", "vertical")}
        self.counts = {
            o: [Counter(self.types[c] for c in strip) for strip in self.layout[o]]
            for o in self.layout
        }
        self.b34 = {c for c, t in self.types.items() if t is _T.B34}
        # strips currently holding both slot types, per class and orientation;
        # when both are present some pair matches, so membership here is
        # exactly "this strip admits a move of that class"
        self.active: dict[str, list[set[int]]] = {
            o: [set() for _ in range(6)] for o in self.layout
        }
        for o in self.layout:
            for idx in range(len(self.layout[o])):
                self._refresh(o, idx)

    def _refresh(self, orientation: str, idx: int) -> None:
        count = self.counts[orientation][idx]
        rules = _H_RULES if orientation == "horizontal" else _V_RULES
        for cls, slot_a, slot_b in rules:
            hit = any(count.get(t, 0) for t in slot_a) and any(
                count.get(t, 0) for t in slot_b
            )
            bucket = self.active[orientation][cls - 1]
            if hit:
                bucket.add(idx)
            else:
                bucket.discard(idx)

    def find(self) -> Optional[SwitchMove]:
        for cls in range(1, 7):
            for orientation in ("horizontal", "vertical"):
                bucket = self.active[orientation][cls - 1]
                if not bucket:
                    continue
                idx = min(bucket)
                _, slot_a, slot_b = _rules(orientation, FORWARD)[cls - 1]
                return next(
                    _pair_moves_in_strip(
                        self.layout[orientation][idx],
                        self.types,
                        cls,
                        slot_a,
                        slot_b,
                        orientation,
                        FORWARD,
                    )
                )
        if self.b34:
            corner = min(self.b34, key=lambda c: (c[1], c[0]))
            return SwitchMove("horizontal", 7, FORWARD, (corner,), (_T.B34,), (_T.B33,))
        return None

    def apply(self, move: SwitchMove) -> None:
        touched: set[tuple[str, int]] = set()
        for corner, src, tgt in zip(move.corners, move.sources, move.targets):
            _write_block(self.a, corner, tgt)
            self.types[corner] = tgt
            i, j = corner
            h_idx, v_idx = (j - 1) // 2, (i - 1) // 2
            for o, idx in (("horizontal", h_idx), ("vertical", v_idx)):
                c = self.counts[o][idx]
                c[src] -= 1
                c[tgt] = c.get(tgt, 0) + 1
                touched.add((o, idx))
            if src is _T.B34:
                self.b34.discard(corner)
            if tgt is _T.B34:
                self.b34.add(corner)
        for o, idx in touched:
            self._refresh(o, idx)


def reduce(img: BinaryImage) -> BinaryImage:
    """Apply forward rewrites until none applies.  Deterministic.

    Equivalent to repeatedly applying find_switch's first forward move;
    a step cap guards against a (provably impossible) endless loop.
    """
    if img.m % 2 or img.n % 2:
        raise ValueError("image dimensions must be even")
    engine = _ReduceEngine(img)
    cap = 16 * len(engine.types) + 16
    for _ in range(cap):
        move = engine.find()
        if move is None:
            return BinaryImage(engine.a)
        engine.apply(move)
    raise RuntimeError("reduction did not terminate within the step cap")


def has_reversed_switch(img: BinaryImage) -> bool:
    return find_switch(img, REVERSED) is not None


# --------------------------------------------------------------------------
# Total variation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TVValue:
    """Exact total variation a + b*sqrt(2), kept in integer counts."""

    a: int
    b: int

    def _cmp(self, other: "TVValue") -> int:
        """Sign of (self - other) without floating point."""
        da = self.a - other.a
        db = self.b - other.b
        if da >= 0 and db >= 0:
            return 1 if (da or db) else 0
        if da <= 0 and db <= 0:
            return -1
        # mixed signs: compare da^2 against 2*db^2 on the dominant side
        lhs = da * da
        rhs = 2 * db * db
        if da > 0:  # db < 0: positive iff da > -db*sqrt(2)
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1  # da < 0, db > 0

    def __lt__(self, other: "TVValue") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "TVValue") -> bool:
        return self._cmp(other) <= 0

    def value(self) -> float:
        return self.a + self.b * 2 ** 0.5


def tv(img: BinaryImage) -> TVValue:
    """Count gradient sites: a with one forward difference, b with both."""
    x = img.a.astype(np.int8)
    dx = np.zeros_like(x)
    dy = np.zeros_like(x)
    dx[:, :-1] = x[:, 1:] - x[:, :-1]
    dy[:-1, :] = x[1:, :] - x[:-1, :]
    nx_ = dx != 0
    ny_ = dy != 0
    both = int((nx_ & ny_).sum())
    return TVValue(a=int(nx_.sum()) + int(ny_.sum()) - 2 * both, b=both)


def tv_descend(inst: Instance, img: BinaryImage, on_step=None) -> BinaryImage:
    """Greedy steepest descent of total variation over all rewrites.

    Both rewrite directions preserve the constraints, so every step keeps
    the image a solution; ties break toward the scan order and the loop
    stops at the first local optimum.
    """
    if not verify_solution(inst, img).satisfied:
        raise ValueError("input image does not solve the instance")
    current = img
    current_tv = tv(current)
    while True:
        best: Optional[tuple[TVValue, SwitchMove]] = None
        for direction in (FORWARD, REVERSED):
            for move in all_switches(current, direction):
                candidate = apply_switch(current, move)
                t = tv(candidate)
                if t < current_tv and (best is None or t < best[0]):
                    best = (t, move)
        if best is None:
            return current
        current = apply_switch(current, best[1])
        current_tv = best[0]
        if on_step is not None:
            on_step(best[1], current_tv)
