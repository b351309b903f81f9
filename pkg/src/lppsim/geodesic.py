"""Geodesic extraction and path statistics.

Backtracking walks from the target through stored DP frontiers, at each step
choosing the predecessor with the strictly larger S value; exact float ties
go to the vertical (up-step) predecessor, everywhere, so results are
deterministic and the across-target ordering of geodesics is preserved.

Frontiers are not all kept in memory: the forward sweep stores a checkpoint
every `checkpoint_stride` diagonals and blocks are recomputed on the way
down, keeping memory O(width * stride) instead of O(width * levels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from .lattice import Corridor, LatticePoint, LineInterval, phi, psi
from .oracle import path_weight
from .passage import (
    UNREACHABLE,
    SweepBuffers,
    SweepRegion,
    _fill_weights,
    _predecessor_max,
    build_region,
    init_line_frontier,
    init_point_frontier,
    sweep,
)
from .weights import WeightField

DEFAULT_CHECKPOINT_STRIDE = 64

SourceSpec = Union[LatticePoint, LineInterval]


@dataclass
class GeodesicPath:
    """Monotone lattice path from a source (or source line) to a target."""

    points: List[LatticePoint]

    def __post_init__(self) -> None:
        for a, b in zip(self.points, self.points[1:]):
            step = (b.x - a.x, b.y - a.y)
            if step not in ((1, 0), (0, 1)):
                raise ValueError(f"non-unit step {step} in path")

    @property
    def source(self) -> LatticePoint:
        return self.points[0]

    @property
    def target(self) -> LatticePoint:
        return self.points[-1]

    def weight(self, f: WeightField) -> float:
        """Path weight under the standard convention (last vertex excluded)."""
        return path_weight(f, self.points)

    def to_csv(self) -> str:
        lines = ["step,x,y,phi,psi"]
        for i, p in enumerate(self.points):
            lines.append(f"{i},{p.x},{p.y},{p.x + p.y},{p.x - p.y}")
        return "\n".join(lines) + "\n"


def line_intersection(g: GeodesicPath, r: int) -> LatticePoint:
    """The unique path point on the anti-diagonal x+y=r."""
    r0, r1 = phi(g.points[0]), phi(g.points[-1])
    if not r0 <= r <= r1:
        raise ValueError(f"level {r} outside path range [{r0}, {r1}]")
    return g.points[r - r0]


def transversal_fluctuation(g: GeodesicPath) -> float:
    """Max |psi deviation| from the straight segment joining the endpoints.

    The interpolation is evaluated with integer cross-multiplication; the
    single final division is the only float operation.
    """
    if len(g.points) < 2:
        raise ValueError("path must have at least two points")
    p0, p1 = g.points[0], g.points[-1]
    D = phi(p1) - phi(p0)
    rise = psi(p1) - psi(p0)
    best = 0
    for p in g.points:
        num = psi(p) * D - (psi(p0) * D + rise * (phi(p) - phi(p0)))
        best = max(best, abs(num))
    return best / D


def contained_in(g: GeodesicPath, c: Corridor) -> bool:
    """True iff every path point inside the corridor's level range belongs."""
    from .lattice import corridor_contains

    for p in g.points:
        if c.start_level <= phi(p) <= c.end_level and not corridor_contains(c, p):
            return False
    return True


def _frontiers_from(
    seeds: np.ndarray,
    region: SweepRegion,
    S_start: np.ndarray,
    a: int,
    b: int,
    buf: SweepBuffers,
) -> List[np.ndarray]:
    """Recompute frontiers for levels a..b from the frontier stored at a."""
    out = [S_start]
    S_prev = S_start
    for r in range(a + 1, b + 1):
        i = r - region.r0
        xlo, xhi = int(region.xlo[i]), int(region.xhi[i])
        plo, phi_ = int(region.xlo[i - 1]), int(region.xhi[i - 1])
        M = _predecessor_max(
            S_prev, plo, phi_, xlo, xhi, buf.view2(buf.sb_flat, xhi - xlo + 1)
        )
        w = _fill_weights(seeds[:, None], r, xlo, xhi, buf)
        S = M + w
        out.append(S)
        S_prev = S
    return out


def backtrack(
    f: WeightField,
    source_spec: SourceSpec,
    target: LatticePoint,
    c: Optional[Corridor] = None,
    checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE,
) -> GeodesicPath:
    """Extract the argmax path to `target` (within the corridor when given).

    The returned path's recomputed weight is bitwise equal to the passage
    time reported by the DP engines for the same geometry.
    """
    if isinstance(source_spec, LatticePoint):
        r0 = phi(source_spec)
        sxlo = sxhi = source_spec.x
        if target == source_spec:
            return GeodesicPath([target])
    else:
        r0 = source_spec.level
        sxlo = (r0 + source_spec.psi_lo) // 2
        sxhi = (r0 + source_spec.psi_hi) // 2
    r1 = phi(target)
    if r1 <= r0:
        raise ValueError("target must lie strictly above the source level")
    region = build_region(r0, r1, sxlo, sxhi, target.x, target.x, c)
    if (region.xlo > region.xhi).any():
        raise ValueError("target unreachable from source specification")
    seeds = np.array([f.seed], dtype=np.uint64)
    base_lo, base_hi = int(region.xlo[0]), int(region.xhi[0])
    if isinstance(source_spec, LatticePoint):
        init = init_point_frontier(seeds, source_spec)
    else:
        init = init_line_frontier(seeds, r0, base_lo, base_hi)
    res = sweep(
        seeds, region, init, checkpoint_stride=checkpoint_stride
    )
    if not np.isfinite(res.values[0, 0]):
        raise ValueError("target unreachable from source specification")

    buf = SweepBuffers(1, region.max_width())
    checkpoints = res.checkpoints
    points = [target]
    x = target.x
    r = r1
    ci = len(checkpoints) - 1
    while r > r0:
        # find the checkpoint block containing level r-1
        while checkpoints[ci][0] > r - 1:
            ci -= 1
        ca, plo_c, phi_c, S_c = checkpoints[ci]
        block_end = min(r - 1, r1 - 1)
        frontiers = _frontiers_from(seeds, region, S_c, ca, block_end, buf)
        while r - 1 >= ca and r > r0:
            i = r - 1 - region.r0
            xlo_p, xhi_p = int(region.xlo[i]), int(region.xhi[i])
            S = frontiers[r - 1 - ca][0]
            s_left = S[x - 1 - xlo_p] if xlo_p <= x - 1 <= xhi_p else UNREACHABLE
            s_same = S[x - xlo_p] if xlo_p <= x <= xhi_p else UNREACHABLE
            if s_left == UNREACHABLE and s_same == UNREACHABLE:
                raise RuntimeError("backtrack fell off the reachable set")
            if s_left > s_same:
                x = x - 1  # horizontal predecessor (x-1, y)
            # ties and s_same >= s_left: vertical predecessor keeps x
            r -= 1
            points.append(LatticePoint(x, r - x))
    points.reverse()
    if isinstance(source_spec, LatticePoint) and points[0] != source_spec:
        raise RuntimeError("backtrack did not terminate at the source")
    return GeodesicPath(points)
