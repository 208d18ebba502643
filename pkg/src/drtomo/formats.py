"""File formats: the line-oriented instance grammar and plain PBM/PGM rasters.

Raster files are written top row first, so file raster row 1 holds image
row q = n; the Cartesian flip happens here and only here.
"""

from __future__ import annotations

import numpy as np

from .model import BinaryImage, GrayImage, Instance, validate_instance


class FormatError(ValueError):
    """Malformed document; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --------------------------------------------------------------------------
# Instance documents
# --------------------------------------------------------------------------

def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _ints(fields: list[str], lineno: int) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(fields)!r}", lineno) from None


def parse_instance(text: str) -> Instance:
    """Parse an instance document.

    Structural violations are rejected; a row/column sum mismatch is not,
    since infeasibility is the solver's verdict rather than a parse error.
    """
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty document")
    pos = 0

    def expect(keyword: str, nvals: int | None) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"unexpected end of document, expected {keyword!r}", lines[-1][0])
        no, line = lines[pos]
        fields = line.split()
        if fields[0] != keyword:
            raise FormatError(f"expected {keyword!r}, got {fields[0]!r}", no)
        if nvals is not None and len(fields) - 1 != nvals:
            raise FormatError(f"{keyword!r} takes {nvals} value(s), got {len(fields) - 1}", no)
        pos += 1
        return no, fields[1:]

    no, magic = expect("NSR", 1)
    if magic != ["1"]:
        raise FormatError(f"unsupported format version {magic[0]!r}", no)
    no, vals = expect("k", 1)
    k = _ints(vals, no)[0]
    no, vals = expect("eps", 1)
    epsilon = _ints(vals, no)[0]
    no, vals = expect("size", 2)
    m, n = _ints(vals, no)
    if k < 2 or m <= 0 or n <= 0 or m % k or n % k:
        raise FormatError(f"bad dimensions: k={k}, size {m} {n}", no)

    no, vals = expect("rows", None)
    if len(vals) != n:
        raise FormatError(f"'rows' needs {n} values, got {len(vals)}", no)
    row_sums = tuple(_ints(vals, no))
    no, vals = expect("cols", None)
    if len(vals) != m:
        raise FormatError(f"'cols' needs {m} values, got {len(vals)}", no)
    col_sums = tuple(_ints(vals, no))

    expect("blocks", 0)
    bw, bh = m // k, n // k
    grid: list[tuple[int, ...]] = []
    reliable = set()
    for file_row in range(bh):
        if pos >= len(lines):
            raise FormatError("missing block rows", lines[-1][0])
        no, line = lines[pos]
        pos += 1
        tokens = line.split()
        if len(tokens) != bw:
            raise FormatError(f"block row needs {bw} tokens, got {len(tokens)}", no)
        bv = bh - 1 - file_row  # file prints the top block row first
        row_vals = []
        for bu, tok in enumerate(tokens):
            unreliable = tok.endswith("?")
            body = tok[:-1] if unreliable else tok
            try:
                v = int(body)
            except ValueError:
                raise FormatError(f"bad block token {tok!r}", no) from None
            if not 0 <= v <= k * k:
                raise FormatError(f"block value {v} outside [0, {k * k}]", no)
            row_vals.append(v)
            if not unreliable:
                reliable.add((k * bu + 1, k * bv + 1))
        grid.append(tuple(row_vals))
    if pos < len(lines):
        raise FormatError("trailing content after block rows", lines[pos][0])

    inst = Instance(
        k=k,
        epsilon=epsilon,
        m=m,
        n=n,
        row_sums=row_sums,
        col_sums=col_sums,
        blocks=tuple(reversed(grid)),
        reliable=frozenset(reliable),
    )
    structural = [e for e in validate_instance(inst) if e.kind != "sum-mismatch"]
    if structural:
        raise FormatError("; ".join(str(e) for e in structural))
    return inst


def write_instance(inst: Instance) -> str:
    out = [
        "NSR 1",
        f"k {inst.k}",
        f"eps {inst.epsilon}",
        f"size {inst.m} {inst.n}",
        "rows " + " ".join(str(r) for r in inst.row_sums),
        "cols " + " ".join(str(c) for c in inst.col_sums),
        "blocks",
    ]
    bh = inst.n // inst.k
    for bv in range(bh - 1, -1, -1):
        tokens = []
        for bu, v in enumerate(inst.blocks[bv]):
            corner = (inst.k * bu + 1, inst.k * bv + 1)
            tokens.append(str(v) if corner in inst.reliable else f"{v}?")
        out.append(" ".join(tokens))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# PBM / PGM rasters
# --------------------------------------------------------------------------

def _tokenize_pnm(data: bytes) -> list[str]:
    text = data.decode("ascii", errors="replace")
    tokens = []
    for raw in text.split("\n"):
        line = raw.split("#", 1)[0]
        tokens.extend(line.split())
    return tokens


def read_image(data: bytes) -> BinaryImage:
    """Decode a plain (P1) PBM byte string."""
    tokens = _tokenize_pnm(data)
    if not tokens or tokens[0] != "P1":
        raise FormatError(f"bad magic number {tokens[0] if tokens else '<empty>'!r}, expected P1")
    try:
        m, n = int(tokens[1]), int(tokens[2])
    except (IndexError, ValueError):
        raise FormatError("missing or malformed PBM dimensions") from None
    if m <= 0 or n <= 0:
        raise FormatError(f"bad PBM dimensions {m} {n}")
    bits = "".join(tokens[3:])
    if len(bits) != m * n:
        raise FormatError(f"expected {m * n} bits, got {len(bits)}")
    if set(bits) - {"0", "1"}:
        raise FormatError("non-bit token in PBM body")
    a = np.array([int(b) for b in bits], dtype=np.uint8).reshape(n, m)
    return BinaryImage(a[::-1])  # raster top row is image row q = n


def write_image(img: BinaryImage) -> bytes:
    lines = ["P1", f"{img.m} {img.n}"]
    for q in range(img.n, 0, -1):
        lines.append(" ".join(str(int(b)) for b in img.a[q - 1]))
    return ("\n".join(lines) + "\n").encode("ascii")


def write_gray(g: GrayImage) -> bytes:
    lines = ["P2", f"{g.width} {g.height}", str(g.maxval)]
    for v in range(g.height, 0, -1):
        lines.append(" ".join(str(x) for x in g.values[v - 1]))
    return ("\n".join(lines) + "\n").encode("ascii")


def read_gray(data: bytes) -> GrayImage:
    """Decode a plain (P2) PGM byte string."""
    tokens = _tokenize_pnm(data)
    if not tokens or tokens[0] != "P2":
        raise FormatError(f"bad magic number {tokens[0] if tokens else '<empty>'!r}, expected P2")
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = [int(t) for t in tokens[4:]]
    except (IndexError, ValueError):
        raise FormatError("malformed PGM header or body") from None
    if len(values) != w * h:
        raise FormatError(f"expected {w * h} values, got {len(values)}")
    if any(not 0 <= x <= maxval for x in values):
        raise FormatError("PGM value outside [0, maxval]")
    rows = [tuple(values[r * w : (r + 1) * w]) for r in range(h)]
    return GrayImage(width=w, height=h, maxval=maxval, values=tuple(reversed(rows)))
