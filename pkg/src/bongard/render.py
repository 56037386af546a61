"""Rasterization of turtle strokes onto the 64x64 panel grid.

A panel covers the world square [-8, 8] x [-8, 8] at 4 cells per world
unit.  Raster coordinates put the origin at the top-left corner: column
u grows with x, row v grows *down* as y shrinks.  A stroke marks every
cell its closed segment passes through (a supercover), where a point
exactly on a cell boundary belongs to the cell with the larger index
(half-open cells).  Coordinates within SNAP_EPS of an integer are
snapped before the cell is taken, so poses produced by trigonometry
land on the boundaries they were aimed at.

Bitmaps are plain ints: cell (col, row) is bit row*64 + col.  That
keeps similarity scoring a couple of machine-word operations.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

GRID = 64
WORLD_MIN = -8.0
WORLD_MAX = 8.0
SCALE = GRID / (WORLD_MAX - WORLD_MIN)  # 4 cells per world unit

SNAP_EPS = 1e-7

Point = Tuple[float, float]
Stroke = Tuple[float, float, float, float]  # x0, y0, x1, y1


def world_to_raster(x: float, y: float) -> Tuple[float, float]:
    """Map a world point to continuous raster coordinates (u, v)."""
    u = (x - WORLD_MIN) * SCALE
    v = (WORLD_MAX - y) * SCALE
    return u, v


def _snap(t: float) -> float:
    r = round(t)
    if abs(t - r) < SNAP_EPS:
        return float(r)
    return t


def cell_of(u: float, v: float) -> Tuple[int, int]:
    """Cell containing raster point (u, v) under half-open semantics."""
    return int(math.floor(_snap(u))), int(math.floor(_snap(v)))


def _axis_crossings(p0: float, p1: float) -> Iterable[float]:
    # Parameter values in [0, 1] where p0 + t*(p1 - p0) is an integer.
    d = p1 - p0
    if d == 0.0:
        return
    lo, hi = (p0, p1) if p0 <= p1 else (p1, p0)
    k = math.ceil(_snap(lo))
    stop = math.floor(_snap(hi))
    while k <= stop:
        t = (k - p0) / d
        if -SNAP_EPS <= t <= 1.0 + SNAP_EPS:
            yield min(1.0, max(0.0, t))
        k += 1


@lru_cache(maxsize=1 << 17)
def _segment_cells_quantized(x0: float, y0: float, x1: float, y1: float) -> frozenset:
    u0, v0 = world_to_raster(x0, y0)
    u1, v1 = world_to_raster(x1, y1)

    ts = {0.0, 1.0}
    ts.update(_axis_crossings(u0, u1))
    ts.update(_axis_crossings(v0, v1))
    order = sorted(ts)

    samples = list(order)
    for a, b in zip(order, order[1:]):
        samples.append((a + b) / 2.0)

    cells = set()
    du, dv = u1 - u0, v1 - v0
    for t in samples:
        u = u0 + t * du
        v = v0 + t * dv
        c, r = cell_of(u, v)
        if 0 <= c < GRID and 0 <= r < GRID:
            cells.add((c, r))
    return frozenset(cells)


def segment_cells(p0: Point, p1: Point) -> frozenset:
    """All grid cells the closed world segment p0-p1 passes through.

    Cells outside the panel are dropped.  Results are memoized on
    endpoints quantized to 1e-9, which collapses the float noise left
    by repeated pose arithmetic.
    """
    return _segment_cells_quantized(
        round(p0[0], 9), round(p0[1], 9), round(p1[0], 9), round(p1[1], 9)
    )


def rasterize(strokes: Sequence[Stroke]) -> int:
    """Union of all stroke supercovers, packed into a bitmap int."""
    bits = 0
    for x0, y0, x1, y1 in strokes:
        for c, r in segment_cells((x0, y0), (x1, y1)):
            bits |= 1 << (r * GRID + c)
    return bits


def ink(bitmap: int) -> int:
    """Number of set cells."""
    return bitmap.bit_count()


def f1(a: int, b: int) -> float:
    """Dice/F1 overlap between two bitmaps; two blank panels match fully."""
    total = a.bit_count() + b.bit_count()
    if total == 0:
        return 1.0
    return 2.0 * (a & b).bit_count() / total


def bitmap_to_pbm(bitmap: int) -> str:
    """Serialize to a plain PBM (P1) string, one 64-digit row per line."""
    lines = ["P1", "%d %d" % (GRID, GRID)]
    for r in range(GRID):
        row = bitmap >> (r * GRID)
        lines.append("".join("1" if (row >> c) & 1 else "0" for c in range(GRID)))
    return "\n".join(lines) + "\n"


def pbm_to_bitmap(text: str) -> int:
    """Parse a plain PBM (P1) string back into a bitmap int."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError("not a plain PBM (P1) file")
    if len(tokens) < 3:
        raise ValueError("truncated PBM header")
    w, h = int(tokens[1]), int(tokens[2])
    if (w, h) != (GRID, GRID):
        raise ValueError("expected %dx%d panel, got %dx%d" % (GRID, GRID, w, h))
    digits = "".join(tokens[3:])
    if len(digits) != GRID * GRID:
        raise ValueError("expected %d pixels, got %d" % (GRID * GRID, len(digits)))
    bits = 0
    for i, ch in enumerate(digits):
        if ch == "1":
            r, c = divmod(i, GRID)
            bits |= 1 << (r * GRID + c)
        elif ch != "0":
            raise ValueError("bad pixel %r" % ch)
    return bits


def render_strokes(strokes: Sequence[Stroke]) -> int:
    return rasterize(strokes)


def render_term(term, library, budget: int | None = None) -> int:
    """Evaluate a program and rasterize its strokes."""
    from . import dsl

    if budget is None:
        result = dsl.evaluate(term, library)
    else:
        result = dsl.evaluate(term, library, budget=budget)
    return rasterize(result.strokes)
