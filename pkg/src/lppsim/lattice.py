"""Lattice geometry: points, rotated coordinates, anti-diagonals, corridors.

The rotated frame uses phi = x + y (time direction) and psi = x - y (space
direction).  A site on the anti-diagonal x+y=r has psi of the same parity as
r, so every interval constructor snaps endpoints inward to that parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple


class LatticePoint(NamedTuple):
    x: int
    y: int


class SpaceTimeCoords(NamedTuple):
    """Rotated coordinates; phi and psi always share parity."""

    phi: int
    psi: int

    def to_point(self) -> LatticePoint:
        if (self.phi ^ self.psi) & 1:
            raise ValueError(f"phi={self.phi} and psi={self.psi} differ in parity")
        return LatticePoint((self.phi + self.psi) // 2, (self.phi - self.psi) // 2)


def phi(p: LatticePoint) -> int:
    """Time coordinate x + y."""
    return p.x + p.y


def psi(p: LatticePoint) -> int:
    """Space coordinate x - y."""
    return p.x - p.y


def rotated(p: LatticePoint) -> SpaceTimeCoords:
    return SpaceTimeCoords(phi(p), psi(p))


@dataclass(frozen=True)
class AntiDiagonal:
    """The line x + y = r."""

    r: int

    def contains(self, p: LatticePoint) -> bool:
        return phi(p) == self.r


def snap_interval(level: int, psi_lo: int, psi_hi: int) -> tuple[int, int]:
    """Snap psi endpoints inward to the parity of the level."""
    lo = psi_lo + ((psi_lo ^ level) & 1)
    hi = psi_hi - ((psi_hi ^ level) & 1)
    return lo, hi


@dataclass(frozen=True)
class LineInterval:
    """Sites on L_level with psi in [psi_lo, psi_hi] (parity-matching only)."""

    level: int
    psi_lo: int
    psi_hi: int

    def __post_init__(self) -> None:
        if self.psi_lo > self.psi_hi:
            raise ValueError(f"psi_lo={self.psi_lo} > psi_hi={self.psi_hi}")
        lo, hi = snap_interval(self.level, self.psi_lo, self.psi_hi)
        object.__setattr__(self, "psi_lo", lo)
        object.__setattr__(self, "psi_hi", hi)


def interval_points(iv: LineInterval) -> List[LatticePoint]:
    """All sites on the interval, in strictly increasing psi order."""
    pts = []
    for s in range(iv.psi_lo, iv.psi_hi + 1, 2):
        pts.append(LatticePoint((iv.level + s) // 2, (iv.level - s) // 2))
    return pts


@dataclass(frozen=True)
class Corridor:
    """Parallelogram strip between two anti-diagonals.

    Membership: r0 <= phi(p) <= r1 and |psi(p) - center(phi(p))| <= half_width,
    where center interpolates linearly between psi_center_start and
    psi_center_end.  The comparison is done in exact integer arithmetic
    (cross-multiplied), never in floats.
    """

    start_level: int
    end_level: int
    psi_center_start: int
    psi_center_end: int
    half_width: int

    def __post_init__(self) -> None:
        if self.start_level >= self.end_level:
            raise ValueError("corridor requires start_level < end_level")
        if self.half_width < 1:
            raise ValueError("corridor half_width must be >= 1")

    def center_at(self, level: int) -> Fraction:
        span = self.end_level - self.start_level
        rise = self.psi_center_end - self.psi_center_start
        return Fraction(self.psi_center_start * span + rise * (level - self.start_level), span)

    def psi_bounds_at(self, level: int) -> tuple[int, int]:
        """Inclusive integer psi bounds at a level (parity-snapped).

        Exact: with D = r1 - r0 the membership condition
        |psi*D - (c0*D + (c1-c0)*(level-r0))| <= half_width*D is evaluated in
        integers, then the resulting psi range is snapped to the level parity.
        """
        D = self.end_level - self.start_level
        num = self.psi_center_start * D + (
            self.psi_center_end - self.psi_center_start
        ) * (level - self.start_level)
        lo = -((-(num - self.half_width * D)) // D)  # ceil
        hi = (num + self.half_width * D) // D  # floor
        return snap_interval(level, lo, hi)


def corridor_contains(c: Corridor, p: LatticePoint) -> bool:
    """Exact membership test (no floating point)."""
    f = phi(p)
    if not c.start_level <= f <= c.end_level:
        return False
    D = c.end_level - c.start_level
    num = c.psi_center_start * D + (c.psi_center_end - c.psi_center_start) * (
        f - c.start_level
    )
    return abs(psi(p) * D - num) <= c.half_width * D


class OutOfConeError(ValueError):
    """Scaled target falls outside the first quadrant's lattice cone."""


def floor_scaled_offset(N: int, s: float) -> int:
    """Exact floor(s * (2N)**(2/3)) for float s (any sign).

    The cube map is monotone on all of R, so m <= s*c (c = (2N)**(2/3) > 0)
    iff m**3 <= s**3 * (2N)**2; the right side is evaluated as an exact
    rational, making the floor independent of libm rounding.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    target = Fraction(s) ** 3 * (2 * N) ** 2
    m = math.floor(s * float((2 * N) ** 2) ** (1.0 / 3.0))
    while Fraction(m + 1) ** 3 <= target:
        m += 1
    while Fraction(m) ** 3 > target:
        m -= 1
    return m


def scaled_target(N: int, s: float, allow_outside_cone: bool = False) -> LatticePoint:
    """The profile site (N - floor(s*(2N)^(2/3)), N + floor(s*(2N)^(2/3))).

    Raises OutOfConeError when a coordinate would be negative (the site is
    not reachable from the origin); line-to-point callers, whose sources
    extend along a whole anti-diagonal, pass allow_outside_cone=True.
    """
    k = floor_scaled_offset(N, s)
    p = LatticePoint(N - k, N + k)
    if not allow_outside_cone and (p.x < 0 or p.y < 0):
        raise OutOfConeError(
            f"scaled target for N={N}, s={s} is {p}, outside the lattice cone"
        )
    return p


def space_unit(N: int) -> float:
    """(2N)**(2/3), the spatial correlation scale in psi half-steps."""
    return float((2 * N) ** 2) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ScaledTarget:
    """A (N, s) pair resolving to the lattice site u_N(s)."""

    N: int
    s: float

    def point(self, allow_outside_cone: bool = False) -> LatticePoint:
        return scaled_target(self.N, self.s, allow_outside_cone)
