"""Last-passage dynamic programming engines.

All engines sweep anti-diagonals x+y=r with a frontier indexed by the x
coordinate (the two predecessors of a site are at columns x-1 and x on the
previous diagonal, so columns never shift).  The frontier S(v) carries the
best path weight *including* v; public passage times follow the convention
that the first vertex counts and the last does not, so the value reported at
a target is the max of its predecessors' S values, never S(target) - w.

Exactness contract: S accumulates one addition per cell, in path order, so
every reported value is bitwise equal to a left-to-right float sum of the
weights along some monotone path.  This is what lets the brute-force oracle
assert exact equality instead of tolerances.

Unreachable targets carry -inf, which is absorbing for + and the identity
for max, so no special-casing is needed inside the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .lattice import Corridor, LatticePoint, LineInterval, phi, psi, snap_interval
from .weights import (
    _GOLDEN,
    _MIX_MUL_1,
    _MIX_MUL_2,
    WeightField,
    bits_from_keys,
    site_keys,
    weights_from_bits,
)

UNREACHABLE = float("-inf")

_U = np.uint64
_TWO_53 = _U(1) << _U(53)
_INV_2_53 = 2.0 ** -53
_MIN_POSITIVE = 5e-324


@dataclass
class SweepRegion:
    """Per-level admissible x ranges for levels r0..r1 inclusive."""

    r0: int
    r1: int
    xlo: np.ndarray  # int64, one entry per level
    xhi: np.ndarray

    @property
    def n_levels(self) -> int:
        return self.r1 - self.r0 + 1

    def width(self, r: int) -> int:
        i = r - self.r0
        return int(self.xhi[i] - self.xlo[i] + 1)

    def max_width(self) -> int:
        return int(np.max(self.xhi - self.xlo)) + 1


def _corridor_xbounds(c: Corridor, levels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact integer x bounds imposed by a corridor at each level."""
    D = c.end_level - c.start_level
    rise = c.psi_center_end - c.psi_center_start
    num = c.psi_center_start * D + rise * (levels - c.start_level)
    hd = c.half_width * D
    psi_lo = -((-(num - hd)) // D)
    psi_hi = (num + hd) // D
    # snap inward to the parity of each level
    psi_lo = psi_lo + ((psi_lo ^ levels) & 1)
    psi_hi = psi_hi - ((psi_hi ^ levels) & 1)
    return (levels + psi_lo) // 2, (levels + psi_hi) // 2


def build_region(
    r0: int,
    r1: int,
    source_xlo: int,
    source_xhi: int,
    target_xlo: int,
    target_xhi: int,
    corridor: Optional[Corridor] = None,
) -> SweepRegion:
    """Forward cone of the source window ∩ backward cone of the target window.

    The source window lives on level r0, the target window on level r1; for a
    point source/target pass a single-column window.  A corridor further
    intersects every level it covers.
    """
    if r1 < r0:
        raise ValueError("target level below source level")
    levels = np.arange(r0, r1 + 1, dtype=np.int64)
    xlo = np.maximum(source_xlo, target_xlo - (r1 - levels))
    xhi = np.minimum(source_xhi + (levels - r0), target_xhi)
    if corridor is not None:
        clo, chi = _corridor_xbounds(corridor, levels)
        lo_c = max(corridor.start_level, r0)
        hi_c = min(corridor.end_level, r1)
        if lo_c <= hi_c:
            sl = slice(lo_c - r0, hi_c - r0 + 1)
            cs = slice(lo_c - r0, hi_c - r0 + 1)
            xlo[sl] = np.maximum(xlo[sl], clo[cs])
            xhi[sl] = np.minimum(xhi[sl], chi[cs])
    return SweepRegion(r0, r1, xlo, xhi)


class SweepBuffers:
    """Preallocated work arrays for one batch; reused across levels.

    All (R, W) views are contiguous reshapes of flat buffers so elementwise
    ufunc calls collapse to single flat loops (per-row trip overhead on
    narrow levels would otherwise dominate).
    """

    def __init__(self, n_replicas: int, max_width: int) -> None:
        self.n_replicas = n_replicas
        self.max_width = max_width
        n = n_replicas * max_width
        self.key = np.empty(max_width, dtype=np.uint64)
        self.u_flat = np.empty(n, dtype=np.uint64)
        self.t_flat = np.empty(n, dtype=np.uint64)
        self.w_flat = np.empty(n, dtype=np.float64)
        self.sa_flat = np.empty(n, dtype=np.float64)
        self.sb_flat = np.empty(n, dtype=np.float64)

    def view2(self, flat: np.ndarray, width: int) -> np.ndarray:
        return flat[: self.n_replicas * width].reshape(self.n_replicas, width)


def _fill_weights(
    seeds_col: np.ndarray, r: int, xlo: int, xhi: int, buf: SweepBuffers
) -> np.ndarray:
    """Exp(1) weights for the diagonal segment, written into buf.w_flat."""
    W = xhi - xlo + 1
    R = buf.n_replicas
    xs = np.arange(xlo, xhi + 1, dtype=np.int64)
    xu = xs.astype(np.uint64)
    yu = (r - xs).astype(np.uint64)
    key = buf.key[:W]
    np.multiply(xu, _U(_GOLDEN), out=key)
    np.bitwise_xor(key, (yu << _U(32)) | (yu >> _U(32)), out=key)
    # avalanche of the site key
    np.bitwise_xor(key, key >> _U(30), out=key)
    np.multiply(key, _U(_MIX_MUL_1), out=key)
    np.bitwise_xor(key, key >> _U(27), out=key)
    np.multiply(key, _U(_MIX_MUL_2), out=key)
    np.bitwise_xor(key, key >> _U(31), out=key)

    u2 = buf.view2(buf.u_flat, W)
    np.bitwise_xor(seeds_col, key[None, :], out=u2)
    # avalanche of seed ^ site_key, on the flat alias of u2
    u = buf.u_flat[: R * W]
    t = buf.t_flat[: R * W]
    np.right_shift(u, _U(30), out=t)
    np.bitwise_xor(u, t, out=u)
    np.multiply(u, _U(_MIX_MUL_1), out=u)
    np.right_shift(u, _U(27), out=t)
    np.bitwise_xor(u, t, out=u)
    np.multiply(u, _U(_MIX_MUL_2), out=u)
    np.right_shift(u, _U(31), out=t)
    np.bitwise_xor(u, t, out=u)
    # top 53 bits -> exact 1-u in (0, 1], then w = -log(1-u), strictly > 0
    np.right_shift(u, _U(11), out=u)
    np.subtract(_TWO_53, u, out=u)
    w = buf.w_flat[: R * W]
    np.multiply(u, _INV_2_53, out=w, casting="unsafe")
    np.log(w, out=w)
    np.negative(w, out=w)
    np.maximum(w, _MIN_POSITIVE, out=w)
    return buf.view2(buf.w_flat, W)


def _predecessor_max(
    S_prev: np.ndarray,
    plo: int,
    phi_: int,
    xlo: int,
    xhi: int,
    M: np.ndarray,
    starts_prev: Optional[np.ndarray] = None,
    starts_out: Optional[np.ndarray] = None,
) -> np.ndarray:
    """max(S(x-1), S(x)) over the previous frontier, -inf off its support.

    When start tracking is on, carries along the source-line x of the best
    path; exact ties go to the same-x (vertical-step) predecessor.
    """
    W = xhi - xlo + 1
    # same-x predecessor (vertical step e2)
    b0, b1 = max(xlo, plo), min(xhi, phi_)
    # left predecessor x-1 (horizontal step e1)
    a0, a1 = max(xlo, plo + 1), min(xhi, phi_ + 1)
    M.fill(UNREACHABLE)
    if b0 <= b1:
        M[:, b0 - xlo : b1 - xlo + 1] = S_prev[:, b0 - plo : b1 - plo + 1]
    if starts_out is not None and b0 <= b1:
        starts_out[:, b0 - xlo : b1 - xlo + 1] = starts_prev[:, b0 - plo : b1 - plo + 1]
    if a0 <= a1:
        left = S_prev[:, a0 - 1 - plo : a1 - plo]
        mid = M[:, a0 - xlo : a1 - xlo + 1]
        if starts_out is not None:
            take_left = left > mid
            stmid = starts_out[:, a0 - xlo : a1 - xlo + 1]
            np.copyto(stmid, starts_prev[:, a0 - 1 - plo : a1 - plo], where=take_left)
            np.copyto(mid, left, where=take_left)
        else:
            np.maximum(mid, left, out=mid)
    return M


@dataclass
class SweepResult:
    """Predecessor-max values at the final level of a sweep."""

    region: SweepRegion
    values: np.ndarray  # (R, W_final), -inf = unreachable
    starts: Optional[np.ndarray] = None  # (R, W_final) source-line x, if tracked
    checkpoints: Optional[List[tuple[int, int, int, np.ndarray]]] = None


def sweep(
    seeds: np.ndarray,
    region: SweepRegion,
    init_S: np.ndarray,
    *,
    track_start: bool = False,
    checkpoint_stride: Optional[int] = None,
    buffers: Optional[SweepBuffers] = None,
) -> SweepResult:
    """Run the DP from an initial frontier at region.r0 up to region.r1.

    init_S has shape (R, width(r0)) and already includes the source weights.
    The returned values at r1 are maxima over predecessors (the last vertex
    is excluded per the passage-time convention).
    """
    seeds = np.ascontiguousarray(np.asarray(seeds, dtype=np.uint64))
    R = seeds.shape[0]
    seeds_col = seeds[:, None]
    if region.n_levels < 2:
        raise ValueError("sweep needs at least one step (r1 > r0)")
    buf = buffers or SweepBuffers(R, region.max_width())
    xlo_a, xhi_a = region.xlo, region.xhi
    plo, phi_ = int(xlo_a[0]), int(xhi_a[0])
    if init_S.shape != (R, phi_ - plo + 1):
        raise ValueError("init frontier shape does not match region base")
    sa_flat, sb_flat = buf.sa_flat, buf.sb_flat
    buf.view2(sa_flat, phi_ - plo + 1)[:] = init_S
    sta_flat = stb_flat = None
    if track_start:
        sta_flat = np.empty(R * buf.max_width, dtype=np.int64)
        stb_flat = np.empty(R * buf.max_width, dtype=np.int64)
        buf.view2(sta_flat, phi_ - plo + 1)[:] = np.arange(
            plo, phi_ + 1, dtype=np.int64
        )
    checkpoints: Optional[List[tuple[int, int, int, np.ndarray]]] = None
    if checkpoint_stride is not None:
        checkpoints = [(region.r0, plo, phi_, init_S.copy())]

    dead = False
    for i in range(1, region.n_levels):
        r = region.r0 + i
        xlo, xhi = int(xlo_a[i]), int(xhi_a[i])
        last = i == region.n_levels - 1
        if xlo > xhi or dead:
            dead = True
            continue
        S_prev = buf.view2(sa_flat, phi_ - plo + 1)
        M = _predecessor_max(
            S_prev,
            plo,
            phi_,
            xlo,
            xhi,
            buf.view2(sb_flat, xhi - xlo + 1),
            buf.view2(sta_flat, phi_ - plo + 1) if track_start else None,
            buf.view2(stb_flat, xhi - xlo + 1) if track_start else None,
        )
        if last:
            final_starts = (
                buf.view2(stb_flat, xhi - xlo + 1).copy() if track_start else None
            )
            return SweepResult(region, M.copy(), final_starts, checkpoints)
        w = _fill_weights(seeds_col, r, xlo, xhi, buf)
        np.add(M, w, out=M)
        sa_flat, sb_flat = sb_flat, sa_flat
        if track_start:
            sta_flat, stb_flat = stb_flat, sta_flat
        plo, phi_ = xlo, xhi
        if checkpoints is not None and (i % checkpoint_stride) == 0:
            checkpoints.append(
                (r, plo, phi_, buf.view2(sa_flat, phi_ - plo + 1).copy())
            )

    # admissible set died out (or degenerate region): everything unreachable
    Wf = int(xhi_a[-1] - xlo_a[-1] + 1)
    vals = np.full((R, max(Wf, 0)), UNREACHABLE)
    st = np.zeros((R, max(Wf, 0)), dtype=np.int64) if track_start else None
    return SweepResult(region, vals, st, checkpoints)


def init_point_frontier(seeds: np.ndarray, source: LatticePoint) -> np.ndarray:
    """Initial frontier for a point source: S(source) = w(source)."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    keys = site_keys(np.array([source.x]), np.array([source.y]))
    bits = bits_from_keys(seeds[:, None], keys)
    return weights_from_bits(bits)


def init_line_frontier(
    seeds: np.ndarray, level: int, xlo: int, xhi: int
) -> np.ndarray:
    """Initial frontier for a line source: S(x) = w(x) across the window."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    xs = np.arange(xlo, xhi + 1, dtype=np.int64)
    keys = site_keys(xs, level - xs)
    bits = bits_from_keys(seeds[:, None], keys)
    return weights_from_bits(bits)


SourceSpec = Union[LatticePoint, LineInterval]


@dataclass
class Profile:
    """Passage times to every site of one anti-diagonal window."""

    level: int
    psi_values: np.ndarray
    values: np.ndarray
    reachable: np.ndarray
    source: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert len(self.psi_values) == len(self.values)

    def to_csv(self) -> str:
        lines = ["level,psi,value,reachable"]
        for s, v, ok in zip(self.psi_values, self.values, self.reachable):
            lines.append(f"{self.level},{s},{v:.17g},{int(ok)}")
        return "\n".join(lines) + "\n"


def _x_window(level: int, psi_lo: int, psi_hi: int) -> tuple[int, int]:
    lo, hi = snap_interval(level, psi_lo, psi_hi)
    if lo > hi:
        raise ValueError(f"empty psi window [{psi_lo}, {psi_hi}] on level {level}")
    return (level + lo) // 2, (level + hi) // 2


def _embedded_profile(
    level: int,
    full_xlo: int,
    full_xhi: int,
    got_xlo: int,
    got_vals: Optional[np.ndarray],
    source_desc: str,
    diagnostics: dict,
) -> Profile:
    """Pad sweep output to the full requested window; gaps are unreachable."""
    W = full_xhi - full_xlo + 1
    vals = np.full(W, UNREACHABLE)
    if got_vals is not None and got_vals.size:
        off = got_xlo - full_xlo
        vals[off : off + got_vals.size] = got_vals
    xs = np.arange(full_xlo, full_xhi + 1, dtype=np.int64)
    return Profile(
        level=level,
        psi_values=2 * xs - level,
        values=vals,
        reachable=np.isfinite(vals),
        source=source_desc,
        diagnostics=diagnostics,
    )


def p2p_profile(
    f: WeightField,
    source: LatticePoint,
    target_level: int,
    psi_lo: int,
    psi_hi: int,
    corridor: Optional[Corridor] = None,
) -> Profile:
    """Point-to-point passage times to a psi window on one anti-diagonal."""
    if target_level <= phi(source):
        raise ValueError("target level must exceed the source level")
    txlo, txhi = _x_window(target_level, psi_lo, psi_hi)
    desc = f"point {tuple(source)}"
    region = build_region(
        phi(source), target_level, source.x, source.x, txlo, txhi, corridor
    )
    if (region.xlo > region.xhi).any() or region.width(target_level) < 1:
        return _embedded_profile(target_level, txlo, txhi, txlo, None, desc, {})
    seeds = np.array([f.seed], dtype=np.uint64)
    res = sweep(seeds, region, init_point_frontier(seeds, source))
    return _embedded_profile(
        target_level, txlo, txhi, int(region.xlo[-1]), res.values[0], desc, {}
    )


def line_to_point_profile(
    f: WeightField,
    source_level: int,
    psi_trunc_lo: int,
    psi_trunc_hi: int,
    target_level: int,
    psi_lo: int,
    psi_hi: int,
    corridor: Optional[Corridor] = None,
    boundary_margin: Optional[int] = None,
) -> Profile:
    """Line-to-point passage times from a truncated anti-diagonal.

    The argmax start point of every target is tracked; diagnostics report how
    many fall within ``boundary_margin`` (default: N^(2/3) lattice units,
    derived from the target level) of the truncation boundary.  A silent
    diagnostic is the evidence that the truncation did not bite.
    """
    if source_level >= target_level:
        raise ValueError("source level must be below the target level")
    wlo, whi = _x_window(source_level, psi_trunc_lo, psi_trunc_hi)
    txlo, txhi = _x_window(target_level, psi_lo, psi_hi)
    if corridor is None and (psi_trunc_lo > psi_lo or psi_trunc_hi < psi_hi):
        # an un-corridored call truncates the infinite source line; the window
        # must at least span the targets or the truncation bites by design
        raise ValueError("truncation window must cover the target psi window")
    desc = f"line L_{source_level}[{psi_trunc_lo},{psi_trunc_hi}]"
    region = build_region(source_level, target_level, wlo, whi, txlo, txhi, corridor)
    if (region.xlo > region.xhi).any() or region.width(target_level) < 1:
        return _embedded_profile(target_level, txlo, txhi, txlo, None, desc, {})
    seeds = np.array([f.seed], dtype=np.uint64)
    base_lo, base_hi = int(region.xlo[0]), int(region.xhi[0])
    res = sweep(
        seeds,
        region,
        init_line_frontier(seeds, source_level, base_lo, base_hi),
        track_start=True,
    )
    if boundary_margin is None:
        n_eff = max((target_level - source_level) // 2, 1)
        boundary_margin = int(round(float(n_eff**2) ** (1.0 / 3.0)))
    starts = res.starts[0]
    finite = np.isfinite(res.values[0])
    # margin is in psi units; one x step is two psi units
    near = (starts - wlo <= boundary_margin // 2) | (whi - starts <= boundary_margin // 2)
    hits = int(np.count_nonzero(near & finite))
    diags = {
        "truncation_boundary_hits": hits,
        "boundary_margin_psi": boundary_margin,
        "argmax_start_x_min": int(starts[finite].min()) if finite.any() else None,
        "argmax_start_x_max": int(starts[finite].max()) if finite.any() else None,
    }
    return _embedded_profile(
        target_level, txlo, txhi, int(region.xlo[-1]), res.values[0], desc, diags
    )


def p2p(f: WeightField, u: LatticePoint, v: LatticePoint) -> float:
    """Single point-to-point passage time (first vertex in, last out)."""
    if v.x < u.x or v.y < u.y:
        raise ValueError(f"endpoints not ordered: {tuple(u)} -> {tuple(v)}")
    if u == v:
        return 0.0
    prof = p2p_profile(f, u, phi(v), psi(v), psi(v))
    return float(prof.values[0])


def corridor_passage(
    f: WeightField,
    source_spec: SourceSpec,
    target: LatticePoint,
    c: Corridor,
) -> float:
    """Best path weight confined to the corridor; -inf when none exists."""
    from .lattice import corridor_contains

    if phi(target) != c.end_level or not corridor_contains(c, target):
        raise ValueError("target must lie inside the corridor at its end level")
    if isinstance(source_spec, LatticePoint):
        if phi(source_spec) != c.start_level or not corridor_contains(c, source_spec):
            raise ValueError("source must lie inside the corridor at its start level")
        prof = p2p_profile(
            f, source_spec, phi(target), psi(target), psi(target), corridor=c
        )
        return float(prof.values[0])
    iv: LineInterval = source_spec
    if iv.level != c.start_level:
        raise ValueError("source interval must sit on the corridor start level")
    blo, bhi = c.psi_bounds_at(iv.level)
    if iv.psi_lo < blo or iv.psi_hi > bhi:
        raise ValueError("source interval must lie inside the corridor")
    prof = line_to_point_profile(
        f,
        iv.level,
        iv.psi_lo,
        iv.psi_hi,
        phi(target),
        psi(target),
        psi(target),
        corridor=c,
    )
    return float(prof.values[0])
