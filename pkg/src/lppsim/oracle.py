"""Brute-force reference: exhaustive monotone-path enumeration on small grids.

Ground truth for the DP engines.  Sums run in path order (source to the
penultimate vertex), matching the DP's one-addition-per-cell accumulation, so
agreement is asserted bitwise, not within tolerances.  No pruning on purpose:
the oracle stays obviously correct.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Union

import numpy as np

from .lattice import Corridor, LatticePoint, LineInterval, corridor_contains, interval_points
from .weights import WeightField

MAX_STEPS = 24

SourceSpec = Union[LatticePoint, LineInterval]


@dataclass
class PathEnumeration:
    source: SourceSpec
    target: LatticePoint
    paths: List[List[LatticePoint]]
    corridor: Optional[Corridor] = None


def _paths_between(a: LatticePoint, b: LatticePoint) -> List[List[LatticePoint]]:
    dx, dy = b.x - a.x, b.y - a.y
    if dx < 0 or dy < 0:
        return []
    steps = dx + dy
    out = []
    for right_positions in combinations(range(steps), dx):
        rp = set(right_positions)
        pts = [a]
        x, y = a.x, a.y
        for i in range(steps):
            if i in rp:
                x += 1
            else:
                y += 1
            pts.append(LatticePoint(x, y))
        out.append(pts)
    return out


def enumerate_paths(
    source: LatticePoint,
    target: LatticePoint,
    c: Optional[Corridor] = None,
) -> PathEnumeration:
    """All monotone paths source -> target, corridor-filtered when given."""
    dx, dy = target.x - source.x, target.y - source.y
    if dx < 0 or dy < 0:
        raise ValueError("target must dominate source coordinate-wise")
    if dx + dy > MAX_STEPS:
        raise ValueError(f"enumeration bound exceeded: {dx + dy} steps > {MAX_STEPS}")
    paths = _paths_between(source, target)
    if c is not None:
        paths = [p for p in paths if all(corridor_contains(c, q) for q in p)]
    return PathEnumeration(source, target, paths, c)


def _path_weight_excluding_last(f: WeightField, path: List[LatticePoint]) -> float:
    """Left-to-right float sum over all but the final vertex."""
    body = path[:-1]
    if not body:
        return 0.0
    xs = np.fromiter((p.x for p in body), dtype=np.int64)
    ys = np.fromiter((p.y for p in body), dtype=np.int64)
    w = f.weights_at_sites(xs, ys)
    acc = float(w[0])
    for v in w[1:]:
        acc = acc + float(v)
    return acc


def path_weight(f: WeightField, path: List[LatticePoint]) -> float:
    """Public helper: passage-time weight of an explicit path."""
    return _path_weight_excluding_last(f, path)


def brute_force_passage(
    f: WeightField,
    source_spec: SourceSpec,
    target: LatticePoint,
    c: Optional[Corridor] = None,
) -> tuple[float, Optional[List[LatticePoint]]]:
    """Max path weight (and an argmax path) by exhaustive enumeration.

    Returns (-inf, None) when no admissible path exists.  For line sources
    every start point of the interval is enumerated.
    """
    if isinstance(source_spec, LatticePoint):
        starts = [source_spec]
    else:
        starts = interval_points(source_spec)
    best = float("-inf")
    best_path: Optional[List[LatticePoint]] = None
    for s in starts:
        if target.x - s.x < 0 or target.y - s.y < 0:
            continue
        enum = enumerate_paths(s, target, c)
        for p in enum.paths:
            w = _path_weight_excluding_last(f, p)
            if w > best:
                best = w
                best_path = p
    return best, best_path
