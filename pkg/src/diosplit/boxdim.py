"""Finite-resolution box-counting for missing-digit Cantor sets and products.

Pure Cantor counts are closed-form (|W|**m occupied boxes at depth m, squared
for the Cartesian product), never sampled.  Sampled counting exists only for
finite point clouds coming out of decompositions and deliberately refuses to
produce a dimension estimate: a finite cloud cannot witness the dimension of a
measure-zero set, so those grids only report occupancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class GridCount:
    base: int
    depths: list
    counts: list
    ambient_dim: int = 1
    sampled: bool = False
    label: str = ""

    def rows(self) -> str:
        out = [f"{m} {c}" for m, c in zip(self.depths, self.counts)]
        if self.label:
            out.append(f"# {self.label}")
        return "\n".join(out) + "\n"


def count_cantor(b: int, W, m: int, product: bool = False) -> int:
    """Occupied base**-m boxes of the missing-digit set (or its square)."""
    W = {int(w) for w in W}
    if b < 3:
        raise ValueError("base must be >= 3")
    if not W or not all(0 <= w < b for w in W):
        raise ValueError("W must be a nonempty subset of {0..b-1}")
    if m < 1:
        raise ValueError("depth must be >= 1")
    c = len(W) ** m
    return c * c if product else c


def cantor_grid(b: int, W, depths, product: bool = False) -> GridCount:
    depths = sorted(int(m) for m in depths)
    counts = [count_cantor(b, W, m, product) for m in depths]
    return GridCount(b, depths, counts, ambient_dim=2 if product else 1)


def estimate_dim(gc: GridCount) -> float:
    """Least-squares slope of log N(m) against m log b."""
    if gc.sampled:
        raise ValueError(
            "sampled grids carry no dimension inference (finite point cloud)"
        )
    if len(gc.depths) < 3:
        raise ValueError("need at least 3 depths")
    x = np.array(gc.depths, dtype=float) * math.log(gc.base)
    y = np.array([math.log(c) for c in gc.counts])
    if np.allclose(y, y[0]):
        raise ValueError("degenerate (constant) counts")
    xm, ym = x.mean(), y.mean()
    return float(((x - xm) @ (y - ym)) / ((x - xm) @ (x - xm)))


def cantor_dim_reference(b: int, W, product: bool = False) -> float:
    """Closed-form value the estimated slope must reproduce."""
    ref = math.log(len({int(w) for w in W})) / math.log(b)
    return 2 * ref if product else ref


def count_sampled(points, b: int, m: int) -> GridCount:
    """Occupied-box count of a finite cloud of component pairs at depth m.

    Each point is a pair of digit expansions; the box key is the pair of
    length-m digit prefixes.  Duplicates land in the same box.
    """
    if m < 1:
        raise ValueError("depth must be >= 1")
    boxes = set()
    for x, y in points:
        if x.N < m or y.N < m:
            raise ValueError(f"point has fewer than {m} digits")
        boxes.add((x.sign, x.int_part, x.frac[:m].tobytes(),
                   y.sign, y.int_part, y.frac[:m].tobytes()))
    return GridCount(
        b, [m], [len(boxes)], ambient_dim=2, sampled=True,
        label="no dimension inference: finite sample of a measure-zero set",
    )
