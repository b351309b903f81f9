"""KPZ centering and scaling between raw passage times and profile processes.

Height fluctuations are measured in units of 2^(4/3) N^(1/3) = cbrt(16 N)
around the 4N growth law; space is measured in units of (2N)^(2/3).  The
`airy2_*` kinds approximate the droplet-initial-condition limit process, the
`airy1_*` kinds the flat one; `airy1_normalize` removes the 2^(1/3) value
scale and 2^(2/3) argument scale that relate the flat profile to its limit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


def height_unit(N: int) -> float:
    """2^(4/3) * N^(1/3), computed as cbrt(16 N)."""
    return float(16 * N) ** (1.0 / 3.0)


class ProfileKind(enum.Enum):
    AIRY2_PARABOLIC = "airy2_parabolic"  # approximates A2(s) - s^2
    AIRY2_STATIONARY = "airy2_stationary"  # parabola restored: approximates A2(s)
    AIRY1_RAW = "airy1_raw"  # approximates 2^(1/3) A1(2^(-2/3) s)
    AIRY1_NORMALIZED = "airy1_normalized"  # approximates A1(x)


@dataclass
class ScaledProfile:
    s_values: np.ndarray
    values: np.ndarray
    kind: ProfileKind

    def __post_init__(self) -> None:
        self.s_values = np.asarray(self.s_values, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.s_values.shape != self.values.shape:
            raise ValueError("s_values and values must have equal length")
        if len(self.s_values) > 1 and not np.all(np.diff(self.s_values) > 0):
            raise ValueError("s_values must be strictly increasing")

    def to_csv(self) -> str:
        lines = ["s,value,kind"]
        for s, v in zip(self.s_values, self.values):
            lines.append(f"{s:.17g},{v:.17g},{self.kind.value}")
        return "\n".join(lines) + "\n"


def center_scale_p2p(T: float, N: int, s: float, subtract_parabola: bool) -> float:
    """(T - 4N) / (2^(4/3) N^(1/3)), plus s^2 when the parabola is removed.

    With subtract_parabola the result approximates the stationary droplet
    profile at s; without it, the parabolically-tilted one.
    """
    v = (T - 4.0 * N) / height_unit(N)
    return v + s * s if subtract_parabola else v


def center_scale_p2l(T: float, N: int) -> float:
    """(T - 4N) / (2^(4/3) N^(1/3)) for flat (line-to-point) passage times."""
    return (T - 4.0 * N) / height_unit(N)


def uncenter_scale_p2l(v: float, N: int) -> float:
    """Inverse of center_scale_p2l (algebraic, exact up to rounding)."""
    return 4.0 * N + v * height_unit(N)


_CBRT2 = 2.0 ** (1.0 / 3.0)
_CBRT4 = 2.0 ** (2.0 / 3.0)


def airy1_normalize(p: ScaledProfile) -> ScaledProfile:
    """Convert a raw flat profile to limit-process coordinates.

    Values divide by 2^(1/3) and arguments contract by 2^(-2/3), so the
    output evaluated at x approximates the flat limit process at x.
    """
    if p.kind is not ProfileKind.AIRY1_RAW:
        raise ValueError(f"expected kind airy1_raw, got {p.kind.value}")
    return ScaledProfile(
        s_values=p.s_values / _CBRT4,
        values=p.values / _CBRT2,
        kind=ProfileKind.AIRY1_NORMALIZED,
    )


def profile_extrema(
    p: ScaledProfile, s_lo: float, s_hi: float
) -> tuple[float, float, float, float]:
    """(argmax, max, argmin, min) over grid points in [s_lo, s_hi].

    Ties resolve to the smallest s.  Raises on an empty window.
    """
    mask = (p.s_values >= s_lo) & (p.s_values <= s_hi)
    if not mask.any():
        raise ValueError(f"window [{s_lo}, {s_hi}] contains no grid points")
    sv = p.s_values[mask]
    vv = p.values[mask]
    imax = int(np.argmax(vv))  # argmax returns the first (smallest-s) tie
    imin = int(np.argmin(vv))
    return float(sv[imax]), float(vv[imax]), float(sv[imin]), float(vv[imin])


def modulus_of_continuity(p: ScaledProfile, delta: float) -> float:
    """max |value(s1) - value(s2)| over grid pairs with |s1 - s2| <= delta.

    Sliding-window max/min with monotone deques; O(n) over the grid.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    s, v = p.s_values, p.values
    n = len(s)
    if n < 2:
        return 0.0
    best = 0.0
    from collections import deque

    maxq: deque[int] = deque()
    minq: deque[int] = deque()
    j = 0
    for i in range(n):
        # window of indices j..i with s[i] - s[j] <= delta
        while maxq and v[maxq[-1]] <= v[i]:
            maxq.pop()
        maxq.append(i)
        while minq and v[minq[-1]] >= v[i]:
            minq.pop()
        minq.append(i)
        while s[i] - s[j] > delta:
            if maxq[0] == j:
                maxq.popleft()
            if minq[0] == j:
                minq.popleft()
            j += 1
        best = max(best, v[maxq[0]] - v[minq[0]])
    return best


@dataclass(frozen=True)
class LimitConstants:
    """Almost-sure growth constants of running extrema and tail exponents."""

    airy2_max: float = (3.0 / 4.0) ** (2.0 / 3.0)  # 0.82548...
    airy2_min: float = -(12.0 ** (1.0 / 3.0))  # -2.28943...
    airy1_max: float = (3.0 / (4.0 * np.sqrt(2.0))) ** (2.0 / 3.0)  # 0.65515...
    airy1_min: float = -(3.0 ** (1.0 / 3.0))  # -1.44225...
    upper_tail_p2p: float = 4.0 / 3.0
    upper_tail_p2l: float = 4.0 / 3.0
    lower_tail_p2p: float = 1.0 / 12.0
    lower_tail_p2l: float = 1.0 / 6.0


LIMITS = LimitConstants()
