"""Gadget boards encoding 1-in-3 satisfiability as noisy reconstruction.

A formula over T variables with S clauses becomes a square board of side
S(6T+2) + 2T.  Truth values live in 2x2 "chips": ones in the bottom row
mean True, ones in the left column mean False.  A diagonal of connectors
copies each variable and its negation across the board, every clause
gets a chip whose two verifier lines admit exactly one crossing one, and
the uncertain (value 1, plus or minus epsilon) blocks sit exactly where
a one may or may not pass through.

Also here: the lifting that embeds a 2x2-block instance into one with
larger blocks while preserving feasibility.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

from .model import BinaryImage, BlockType, Corner, Instance, classify_block
from .oracle import SearchBudget, constrained_solve

Cell = tuple[int, int]

EXACT = "="
NOISY = "~"


@dataclass(frozen=True)
class OneInThreeInstance:
    """Clauses of three literals; satisfaction = exactly one true literal."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("need at least one variable")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError(f"clause {clause} does not have three literals")
            if any(lit == 0 or abs(lit) > self.num_vars for lit in clause):
                raise ValueError(f"clause {clause} references a bad variable")
            if len({abs(lit) for lit in clause}) != 3:
                raise ValueError(f"clause {clause} repeats a variable")

    def unnegated(self, s: int) -> set[int]:
        """Variable indices appearing positively in clause s (1-based)."""
        return {lit for lit in self.clauses[s - 1] if lit > 0}

    def negated(self, s: int) -> set[int]:
        return {-lit for lit in self.clauses[s - 1] if lit < 0}

    def satisfied_by(self, assignment: tuple[bool, ...]) -> bool:
        for s in range(1, len(self.clauses) + 1):
            true_lits = sum(1 for t in self.unnegated(s) if assignment[t - 1]) + sum(
                1 for t in self.negated(s) if not assignment[t - 1]
            )
            if true_lits != 1:
                return False
        return True


def parse_sat(text: str) -> OneInThreeInstance:
    """Read the `p 1in3 <vars> <clauses>` header format."""
    clauses = []
    header: Optional[tuple[int, int]] = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "1in3":
                raise ValueError(f"line {no}: bad header {line!r}")
            header = (int(fields[2]), int(fields[3]))
            continue
        lits = tuple(int(x) for x in line.split())
        if len(lits) != 3:
            raise ValueError(f"line {no}: expected three literals")
        clauses.append(lits)
    if header is None:
        raise ValueError("missing 'p 1in3' header")
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise ValueError(f"header promises {num_clauses} clauses, found {len(clauses)}")
    return OneInThreeInstance(num_vars=num_vars, clauses=tuple(clauses))


def write_sat(sat: OneInThreeInstance) -> str:
    lines = [f"p 1in3 {sat.num_vars} {len(sat.clauses)}"]
    lines += [" ".join(str(lit) for lit in clause) for clause in sat.clauses]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BoardSpec:
    """All component positions of one gadget board.

    Chip coordinates are the lower-left cell of the 2x2 chip box.
    Initializer and connector chips are block-aligned; collector chips
    straddle two blocks.  candidate_cells is the set of cells that may
    carry a one in some solution; everything else is forced to zero.
    """

    sat: OneInThreeInstance
    side: int
    anchors: tuple[int, ...]  # a_1 .. a_{S+1}
    init_chips: dict[int, Cell] = field(default_factory=dict)  # t -> cell
    connector_chips: dict[tuple[int, int], Cell] = field(default_factory=dict)
    vcollector_chips: dict[tuple[int, int], Cell] = field(default_factory=dict)
    hcollector_chips: dict[tuple[int, int], Cell] = field(default_factory=dict)
    config_points: dict[tuple[int, int], frozenset[Cell]] = field(default_factory=dict)

    @property
    def candidate_cells(self) -> frozenset[Cell]:
        cells: set[Cell] = set()
        for chip in (
            list(self.init_chips.values())
            + list(self.connector_chips.values())
            + list(self.vcollector_chips.values())
            + list(self.hcollector_chips.values())
        ):
            x, y = chip
            cells.update((x + dx, y + dy) for dx in (0, 1) for dy in (0, 1))
        for points in self.config_points.values():
            cells.update(points)
        return frozenset(cells)


def build_board(sat: OneInThreeInstance) -> BoardSpec:
    """Component coordinates for a formula's board."""
    S, T = len(sat.clauses), sat.num_vars
    side = S * (6 * T + 2) + 2 * T
    anchors = tuple((6 * T + 2) * (s - 1) + 1 for s in range(1, S + 2))
    a_last = anchors[S]
    spec = BoardSpec(sat=sat, side=side, anchors=anchors)
    for t in range(1, T + 1):
        spec.init_chips[t] = (a_last + 2 * (T - t), 2 * t - 1)
    for s in range(1, S + 2):
        a = anchors[s - 1]
        for t in range(1, T + 1):
            spec.connector_chips[(s, t)] = (a + 2 * (T - t), a + 2 * (t - 1))
    for s in range(1, S + 1):
        a = anchors[s - 1]
        U, N = sat.unnegated(s), sat.negated(s)
        for t in range(1, T + 1):
            spec.vcollector_chips[(s, t)] = (a + 2 * (T - t), a + 2 * T + 4 * t - 3)
            spec.hcollector_chips[(s, t)] = (a + 2 * T + 4 * t - 1, a + 6 * T + 2 * t)
            base = (a + 2 * T, a + 2 * T)
            if t in U:
                offsets = [(1, 4 * t - 2), (4 * t, 4 * t - 3), (4 * t - 1, 4 * T)]
            elif t in N:
                offsets = [(1, 4 * t - 3), (4 * t - 1, 4 * t - 2), (4 * t, 4 * T)]
            else:
                offsets = [(4 * t - 1, 4 * t - 2), (4 * t, 4 * t - 3)]
            spec.config_points[(s, t)] = frozenset(
                (base[0] + dx, base[1] + dy) for dx, dy in offsets
            )
    return spec


def _board_constraints(spec: BoardSpec) -> tuple[dict[Corner, tuple[str, int]], list[int], list[int]]:
    """Block constraint function f plus row and column sums."""
    sat = spec.sat
    S, T, N = len(sat.clauses), sat.num_vars, spec.side
    f: dict[Corner, tuple[str, int]] = {}

    def set_f(i: int, j: int, kind: str, value: int) -> None:
        prev = f.get((i, j))
        if prev is not None and prev != (kind, value):
            raise AssertionError(f"conflicting block constraint at ({i},{j})")
        f[(i, j)] = (kind, value)

    a_last = spec.anchors[S]
    # initializer: uncertain single ones on its anti-diagonal
    for u in range(T):
        for v in range(T):
            if u + v == T - 1:
                set_f(a_last + 2 * u, 1 + 2 * v, NOISY, 1)
            else:
                set_f(a_last + 2 * u, 1 + 2 * v, EXACT, 0)
    # connectors: exact pairs on their anti-diagonals
    for s in range(1, S + 2):
        a = spec.anchors[s - 1]
        for u in range(T):
            for v in range(T):
                set_f(a + 2 * u, a + 2 * v, EXACT, 2 if u + v == T - 1 else 0)
    for s in range(1, S + 1):
        a = spec.anchors[s - 1]
        U, N_s = sat.unnegated(s), sat.negated(s)
        # vertical collector columns: two uncertain blocks around each chip
        for t in range(1, T + 1):
            lo, hi = 3 - 4 * t, 4 * (T - t) + 1
            for v_t in range(lo, hi + 1):
                if v_t % 2 == 0:
                    continue
                kind = (NOISY, 1) if v_t in (-1, 1) else (EXACT, 0)
                set_f(a + 2 * (T - t), a + 2 * T + 4 * t - 3 + v_t, *kind)
        # horizontal collector rows
        for t in range(1, T + 1):
            lo, hi = 3 - 4 * t, 4 * (T - t) + 1
            for u_t in range(lo, hi + 1):
                if u_t % 2 == 0:
                    continue
                kind = (NOISY, 1) if u_t in (-1, 1) else (EXACT, 0)
                set_f(a + 2 * T + 4 * t - 1 + u_t, a + 6 * T + 2 * t, *kind)
        # unused corner of the clause chip, above the vertical collector
        for u in range(T):
            for v in range(T):
                set_f(a + 2 * u, a + 6 * T + 2 * v, EXACT, 0)
        # vertical verifier: a one may cross only at the clause's literals
        for t in range(1, T + 1):
            for v in (1, 2):
                hit = (t in U and v == 1) or (t in N_s and v == 2)
                set_f(a + 2 * T, a + 2 * T + 4 * t - 2 * v, NOISY if hit else EXACT, 1 if hit else 0)
        # horizontal verifier
        for t in range(1, T + 1):
            for u in (1, 2):
                hit = (t in U and u == 2) or (t in N_s and u == 1)
                set_f(a + 2 * T + 2 + 4 * t - 2 * u, a + 6 * T, NOISY if hit else EXACT, 1 if hit else 0)
        # transmitter: the two off-diagonals carry the signal.  A variable
        # absent from the clause needs both side blocks open so its value
        # can pass straight through; a clause variable needs only the one
        # its configuration uses.
        for u in range(1, 2 * T):
            t = (u + 1) // 2
            open_plus = u % 2 == 1 and t not in N_s
            open_minus = u % 2 == 1 and t not in U
            set_f(
                a + 2 * T + 2 + 2 * u,
                a + 2 * T + 2 * (u - 1),
                NOISY if open_plus else EXACT,
                1 if open_plus else 0,
            )
            set_f(
                a + 2 * T + 2 + 2 * (u - 1),
                a + 2 * T + 2 * u,
                NOISY if open_minus else EXACT,
                1 if open_minus else 0,
            )
        for u in range(2 * T):
            for v in range(2 * T):
                if u - v not in (-1, 1):
                    set_f(a + 2 * T + 2 + 2 * u, a + 2 * T + 2 * v, EXACT, 0)

    # every block not claimed by a component is zero
    for i in range(1, N, 2):
        for j in range(1, N, 2):
            f.setdefault((i, j), (EXACT, 0))

    rows = [0] * N
    cols = [0] * N
    for s in range(1, S + 2):
        a = spec.anchors[s - 1]
        for l in range(2 * T):
            rows[a + l - 1] = cols[a + l - 1] = 3 if l % 2 == 0 else 1
    for s in range(1, S + 1):
        a = spec.anchors[s - 1]
        rows[a + 6 * T - 1] = 1
        rows[a + 6 * T] = 0  # index a+6T+1, zero-based
        cols[a + 2 * T - 1] = 0
        cols[a + 2 * T] = 1
        for l in range(T):
            rows[a + 2 * T + 4 * l - 1] = 0
            rows[a + 2 * T + 4 * l] = 2
            rows[a + 2 * T + 4 * l + 1] = 1
            rows[a + 2 * T + 4 * l + 2] = 0
            cols[a + 2 * T + 4 * l + 1] = 0
            cols[a + 2 * T + 4 * l + 2] = 2
            cols[a + 2 * T + 4 * l + 3] = 1
            cols[a + 2 * T + 4 * l + 4] = 0
    return f, rows, cols


def gen_sat_instance(sat: OneInThreeInstance, epsilon: int = 1) -> Instance:
    """Reconstruction instance solvable iff the formula is 1-in-3 satisfiable."""
    if epsilon < 1:
        raise ValueError("the gadget needs epsilon >= 1")
    if epsilon >= 3:
        warnings.warn(
            "epsilon >= 3 lets uncertain blocks hold up to four ones; the "
            "encoding is only validated for windows covering 0, 1 and 2",
            stacklevel=2,
        )
    spec = build_board(sat)
    f, rows, cols = _board_constraints(spec)
    N = spec.side
    blocks = [[0] * (N // 2) for _ in range(N // 2)]
    reliable = set()
    for (i, j), (kind, value) in f.items():
        blocks[(j - 1) // 2][(i - 1) // 2] = value
        if kind == EXACT:
            reliable.add((i, j))
    return Instance(
        k=2,
        epsilon=epsilon,
        m=N,
        n=N,
        row_sums=tuple(rows),
        col_sums=tuple(cols),
        blocks=tuple(tuple(r) for r in blocks),
        reliable=frozenset(reliable),
    )


_TRUE_ONES = {(0, 0), (1, 0)}  # bottom row of the chip
_FALSE_ONES = {(0, 0), (0, 1)}  # left column


def embed_assignment(
    spec: BoardSpec, inst: Instance, assignment: tuple[bool, ...]
) -> Optional[BinaryImage]:
    """Image encoding an assignment, or None if it breaks some clause.

    Pins the initializer chips, zeroes everything outside the candidate
    cells, and lets constraint search complete the rest; the completion
    is unique, and it exists exactly for the satisfying assignments.
    """
    if len(assignment) != spec.sat.num_vars:
        raise ValueError("assignment arity does not match the formula")
    if (inst.m, inst.n) != (spec.side, spec.side):
        raise ValueError("instance does not match the board")
    candidates = spec.candidate_cells
    fixed: dict[Cell, int] = {}
    for p in range(1, inst.m + 1):
        for q in range(1, inst.n + 1):
            if (p, q) not in candidates:
                fixed[(p, q)] = 0
    for t, value in enumerate(assignment, start=1):
        x, y = spec.init_chips[t]
        ones = _TRUE_ONES if value else _FALSE_ONES
        for dx in (0, 1):
            for dy in (0, 1):
                fixed[(x + dx, y + dy)] = 1 if (dx, dy) in ones else 0
    budget = SearchBudget(max_solutions=2, max_nodes=2_000_000)
    solutions, exhausted = constrained_solve(inst, fixed, budget)
    if not solutions:
        if not exhausted:
            raise RuntimeError("embedding search ran out of budget")
        return None
    if len(solutions) > 1:
        raise RuntimeError("embedding completion is not unique; board is off")
    return solutions[0]


def extract_assignment(spec: BoardSpec, img: BinaryImage) -> tuple[bool, ...]:
    """Read the truth assignment off the initializer chips."""
    out = []
    for t in range(1, spec.sat.num_vars + 1):
        chip = spec.init_chips[t]
        kind = classify_block(img, chip)
        if kind == BlockType.B1:
            out.append(True)
        elif kind == BlockType.B31:
            out.append(False)
        else:
            raise ValueError(
                f"chip for variable {t} holds {kind.name}, not a truth value"
            )
    return tuple(out)


def lift_instance(inst: Instance, k_prime: int) -> Instance:
    """Blow a 2x2-block instance up to k'-sized blocks, same feasibility.

    Each two-line strip becomes a k'-line strip whose first two lines
    carry the old sums and whose remaining lines are zero; block values
    and reliability carry over to the enlarged blocks.
    """
    if inst.k != 2:
        raise ValueError("lifting starts from block size 2")
    if k_prime < 2:
        raise ValueError("target block size must be at least 2")
    if k_prime == 2:
        return inst
    m2, n2 = inst.m * k_prime // 2, inst.n * k_prime // 2
    if 2 * m2 != inst.m * k_prime or 2 * n2 != inst.n * k_prime:
        raise ValueError("lifted dimensions are not integral")
    rows = [0] * n2
    cols = [0] * m2
    for j in range(1, inst.n, 2):
        base = k_prime * (j - 1) // 2
        rows[base] = inst.row_sums[j - 1]
        rows[base + 1] = inst.row_sums[j]
    for i in range(1, inst.m, 2):
        base = k_prime * (i - 1) // 2
        cols[base] = inst.col_sums[i - 1]
        cols[base + 1] = inst.col_sums[i]
    blocks = inst.blocks  # same block grid, just bigger blocks
    reliable = frozenset(
        (k_prime * (i - 1) // 2 + 1, k_prime * (j - 1) // 2 + 1) for i, j in inst.reliable
    )
    return Instance(
        k=k_prime,
        epsilon=inst.epsilon,
        m=m2,
        n=n2,
        row_sums=tuple(rows),
        col_sums=tuple(cols),
        blocks=blocks,
        reliable=reliable,
    )
