"""Monte Carlo harness: tail estimation, extrema growth, profile statistics.

Replica k of a run always uses the derived field seed mix(master_seed, k),
so results are independent of batch size and worker count: values land in a
replica-indexed array and every aggregate is computed from that array in
index order.  Experiments that compare geometries or system sizes reuse the
same replica seed streams on purpose (common random numbers), which makes
realization-wise couplings (restricted <= unrestricted, nested thresholds)
exact rather than statistical.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .lattice import (
    Corridor,
    LatticePoint,
    OutOfConeError,
    floor_scaled_offset,
    psi,
    scaled_target,
    snap_interval,
)
from .passage import (
    SweepRegion,
    build_region,
    init_line_frontier,
    init_point_frontier,
    sweep,
)
from .scaling import (
    ProfileKind,
    ScaledProfile,
    center_scale_p2p,
    height_unit,
    modulus_of_continuity,
)
from .statutil import (
    covariance_lower_bound,
    ks_two_sample,
    weighted_least_squares,
    wilson_interval,
)
from .weights import derive_seed, replica_seeds

FORMAT_VERSION = 1

_CBRT2 = 2.0 ** (1.0 / 3.0)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""

    def __init__(self, fieldname: str, message: str) -> None:
        self.field = fieldname
        super().__init__(f"config field '{fieldname}': {message}")


EXPERIMENTS = (
    "tail",
    "extrema",
    "stationarity",
    "association",
    "modulus",
    "corridor",
)


@dataclass
class ExperimentConfig:
    """Fully resolved experiment parameters (echoed into every result)."""

    experiment: str
    seed: int
    N: int
    n_samples: int
    geometry: str = "p2p"  # tail: p2p | p2l
    direction: str = "upper"  # tail: upper | lower
    t: Optional[float] = None
    t_list: Optional[List[float]] = None
    s: float = 0.0
    s_list: Optional[List[float]] = None
    s1: Optional[float] = None
    s2: Optional[float] = None
    process: Optional[str] = None  # extrema: airy1 | airy2
    s_window: Optional[float] = None
    delta_list: Optional[List[float]] = None
    corridor_c: float = 1.0
    fit_power: Optional[float] = None
    n_ladder: Optional[List[int]] = None
    trunc_const: float = 6.0
    checkpoint_stride: int = 64
    threads: int = 1
    batch_size: int = 64
    out: Optional[str] = None

    def t_values(self) -> List[float]:
        if self.t_list is not None:
            return list(self.t_list)
        if self.t is not None:
            return [self.t]
        return []


_CONFIG_FIELDS = {f for f in ExperimentConfig.__dataclass_fields__}
_REQUIRED_FIELDS = ("experiment", "seed", "N", "n_samples")


def config_from_dict(d: dict) -> ExperimentConfig:
    unknown = set(d) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    missing = [k for k in _REQUIRED_FIELDS if k not in d]
    if missing:
        raise ConfigError(missing[0], "required key missing")
    cfg = ExperimentConfig(**d)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    if cfg.N < 1:
        raise ConfigError("N", "must be >= 1")
    if cfg.n_samples < 1:
        raise ConfigError("n_samples", "must be >= 1")
    if cfg.threads < 1:
        raise ConfigError("threads", "must be >= 1")
    if cfg.batch_size < 1:
        raise ConfigError("batch_size", "must be >= 1")
    if cfg.trunc_const <= 0:
        raise ConfigError("trunc_const", "must be positive")
    if cfg.experiment == "tail":
        if cfg.geometry not in ("p2p", "p2l"):
            raise ConfigError("geometry", "must be p2p or p2l")
        if cfg.direction not in ("upper", "lower"):
            raise ConfigError("direction", "must be upper or lower")
        if not cfg.t_values():
            raise ConfigError("t", "tail experiments need t or t_list")
        if any(t <= 0 for t in cfg.t_values()):
            raise ConfigError("t", "deviation parameters must be positive")
        if cfg.geometry == "p2l" and cfg.s != 0.0:
            raise ConfigError(
                "s", "line-to-point tails are s-invariant; s must be 0"
            )
        if cfg.direction == "lower":
            unit = height_unit(cfg.N)
            for t in cfg.t_values():
                if 4.0 * cfg.N - t * unit <= 0:
                    raise ConfigError("t", f"lower threshold at t={t} is not positive")
        if cfg.n_ladder is not None and any(n < 1 for n in cfg.n_ladder):
            raise ConfigError("n_ladder", "system sizes must be >= 1")
    elif cfg.experiment == "extrema":
        if cfg.process not in ("airy1", "airy2"):
            raise ConfigError("process", "must be airy1 or airy2")
        ts = cfg.t_values()
        if not ts:
            raise ConfigError("t_list", "extrema experiments need t_list")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("t_list", "must be strictly increasing")
        if any(t <= 1.0 for t in ts):
            raise ConfigError("t_list", "window ends must exceed 1 (log t > 0)")
        if cfg.process == "airy2":
            k_max = floor_scaled_offset(cfg.N, ts[-1])
            if k_max > cfg.N:
                raise ConfigError(
                    "t_list",
                    f"window exceeds lattice cone: t_max={ts[-1]} needs "
                    f"{k_max} psi half-steps but N={cfg.N}",
                )
    elif cfg.experiment == "stationarity":
        if not cfg.s_list or len(cfg.s_list) < 2:
            raise ConfigError("s_list", "need at least two s values")
    elif cfg.experiment == "association":
        if cfg.s1 is None or cfg.s2 is None:
            raise ConfigError("s1", "association needs s1 and s2")
        if cfg.s1 == cfg.s2:
            raise ConfigError("s2", "s1 and s2 must differ")
    elif cfg.experiment == "modulus":
        if cfg.s_window is None or cfg.s_window <= 0:
            raise ConfigError("s_window", "must be positive")
        if not cfg.delta_list:
            raise ConfigError("delta_list", "need at least one delta")
        if any(d <= 0 or d > 2 * cfg.s_window for d in cfg.delta_list):
            raise ConfigError("delta_list", "deltas must be in (0, 2*s_window]")
    elif cfg.experiment == "corridor":
        if cfg.t is None or cfg.t <= 0:
            raise ConfigError("t", "corridor experiments need a positive t")
        if cfg.corridor_c <= 0:
            raise ConfigError("corridor_c", "must be positive")


# ---------------------------------------------------------------------------
# batched sweep drivers


InitSpec = tuple  # ("point", x, y) | ("line", level) over the region base


def _init_frontier(seeds: np.ndarray, region: SweepRegion, init: InitSpec) -> np.ndarray:
    if init[0] == "point":
        return init_point_frontier(seeds, LatticePoint(init[1], init[2]))
    return init_line_frontier(seeds, init[1], int(region.xlo[0]), int(region.xhi[0]))


def _batch_task(
    args: tuple,
) -> tuple[int, np.ndarray, Optional[np.ndarray]]:
    seed, k0, k1, region, init, track_start = args
    seeds = replica_seeds(seed, k0, k1)
    res = sweep(seeds, region, _init_frontier(seeds, region, init), track_start=track_start)
    return k0, res.values, res.starts


def _run_batches(
    seed: int,
    n: int,
    region: SweepRegion,
    init: InitSpec,
    *,
    threads: int = 1,
    batch_size: int = 64,
    track_start: bool = False,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """(n, W_final) passage values at the final level, replica-indexed.

    Replica k always uses seed mix(master, k), and every batch writes into
    its own slice, so the output is a pure function of (seed, n, geometry),
    independent of worker count and batch size.  Workers are separate
    processes (numpy ufunc loops in one process contend on the GIL between
    calls).
    """
    Wf = region.width(region.r1)
    values = np.empty((n, Wf), dtype=np.float64)
    starts = np.empty((n, Wf), dtype=np.int64) if track_start else None
    tasks = [
        (seed, k0, min(k0 + batch_size, n), region, init, track_start)
        for k0 in range(0, n, batch_size)
    ]
    if threads <= 1 or len(tasks) == 1:
        results = map(_batch_task, tasks)
    else:
        from concurrent.futures import ProcessPoolExecutor

        ex = ProcessPoolExecutor(max_workers=threads)
        try:
            results = list(ex.map(_batch_task, tasks, chunksize=1))
        finally:
            ex.shutdown()
    for k0, vals, sts in results:
        k1 = k0 + vals.shape[0]
        values[k0:k1] = vals
        if track_start:
            starts[k0:k1] = sts
    return values, starts


def _p2p_region(
    N: int, x_lo: int, x_hi: int, corridor: Optional[Corridor] = None
) -> SweepRegion:
    return build_region(0, 2 * N, 0, 0, x_lo, x_hi, corridor)


def _p2l_region(
    N: int,
    psi_lo: int,
    psi_hi: int,
    trunc_const: float,
    corridor: Optional[Corridor] = None,
) -> tuple[SweepRegion, int, int]:
    """Region from the truncated source line L_0 to a psi window on L_2N.

    The truncation extends trunc_const * N^(2/3) psi units beyond the target
    window on both sides.
    """
    margin = int(math.ceil(trunc_const * float(N * N) ** (1.0 / 3.0)))
    wlo, whi = snap_interval(0, psi_lo - margin, psi_hi + margin)
    tlo, thi = snap_interval(2 * N, psi_lo, psi_hi)
    region = build_region(
        0, 2 * N, wlo // 2, whi // 2, (2 * N + tlo) // 2, (2 * N + thi) // 2, corridor
    )
    return region, wlo, whi


def _p2p_values(
    cfg: ExperimentConfig, N: int, s: float, n: int
) -> np.ndarray:
    """Replica-indexed passage times from the origin to u_N(s)."""
    target = scaled_target(N, s)
    region = _p2p_region(N, target.x, target.x)
    vals, _ = _run_batches(
        cfg.seed,
        n,
        region,
        ("point", 0, 0),
        threads=cfg.threads,
        batch_size=cfg.batch_size,
    )
    return vals[:, 0]


def _p2l_values(
    cfg: ExperimentConfig, N: int, s: float, n: int, *, stream_seed: Optional[int] = None
) -> tuple[np.ndarray, dict]:
    """Replica-indexed line-to-point times to u_N(s), plus truncation diags."""
    target = scaled_target(N, s, allow_outside_cone=True)
    region, wlo, whi = _p2l_region(N, psi(target), psi(target), cfg.trunc_const)
    seed = cfg.seed if stream_seed is None else stream_seed
    vals, starts = _run_batches(
        seed,
        n,
        region,
        ("line", 0),
        threads=cfg.threads,
        batch_size=cfg.batch_size,
        track_start=True,
    )
    margin_x = int(round(float(N * N) ** (1.0 / 3.0))) // 2
    st = starts[:, 0]
    near = (st - wlo // 2 <= margin_x) | (whi // 2 - st <= margin_x)
    diags = {"truncation_boundary_hits": int(np.count_nonzero(near))}
    return vals[:, 0], diags


# ---------------------------------------------------------------------------
# tail estimation


@dataclass
class TailEstimate:
    t: float
    threshold: float
    n_samples: int
    hits: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    direction: str
    geometry: str


@dataclass
class ExponentFit:
    power: float
    coefficient: float
    stderr: float
    points: List[tuple[float, float]]


def tail_threshold(N: int, s: float, t: float, geometry: str, direction: str) -> float:
    """Raw passage-time cut for a deviation parameter t."""
    unit = height_unit(N)
    base = 4.0 * N - (s * s * unit if geometry == "p2p" else 0.0)
    return base + t * unit if direction == "upper" else base - t * unit


def estimate_tail_from_values(
    values: np.ndarray,
    N: int,
    s: float,
    t: float,
    geometry: str,
    direction: str,
) -> TailEstimate:
    thr = tail_threshold(N, s, t, geometry, direction)
    if direction == "upper":
        hits = int(np.count_nonzero(values >= thr))
    else:
        hits = int(np.count_nonzero(values <= thr))
    n = len(values)
    lo, hi = wilson_interval(hits, n)
    return TailEstimate(t, thr, n, hits, hits / n, lo, hi, direction, geometry)


def fit_exponent(
    points: Sequence[tuple[float, float]],
    power: float,
    n_samples: Optional[int] = None,
    min_hits: int = 20,
) -> ExponentFit:
    """Least-squares slope of -log(p_hat) against t^power.

    Noise control happens through exclusion, not weighting: points with
    fewer than `min_hits` hits (when n_samples is known) or with p_hat at 0
    or 1 are dropped, and the surviving points enter an ordinary
    least-squares line with intercept; the stderr comes from the residuals.
    """
    usable = []
    for t, p in points:
        if p <= 0.0 or p >= 1.0:
            continue
        if n_samples is not None and p * n_samples < min_hits:
            continue
        usable.append((t, p))
    if len(usable) < 3:
        raise ValueError(
            f"fit needs >= 3 usable points (hits >= {min_hits}); got {len(usable)}"
        )
    x = np.array([t**power for t, _ in usable])
    y = np.array([-math.log(p) for _, p in usable])
    fit = weighted_least_squares(x, y, np.ones_like(x))
    return ExponentFit(power, fit.slope, fit.stderr, [(t, p) for t, p in usable])


def estimate_tail(cfg: ExperimentConfig) -> TailEstimate:
    """Single-t tail estimate (thin wrapper over the shared-grid runner)."""
    if cfg.t is None:
        raise ConfigError("t", "estimate_tail needs a single t")
    validate_config(cfg)
    if cfg.geometry == "p2p":
        values = _p2p_values(cfg, cfg.N, cfg.s, cfg.n_samples)
    else:
        values, _ = _p2l_values(cfg, cfg.N, cfg.s, cfg.n_samples)
    return estimate_tail_from_values(
        values, cfg.N, cfg.s, cfg.t, cfg.geometry, cfg.direction
    )


def run_tail(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Shared-realization tail estimates over the t grid, optional N ladder."""
    ladder = cfg.n_ladder or []
    sizes = list(dict.fromkeys(list(ladder) + [cfg.N]))
    stats: dict = {"by_N": {}}
    diagnostics: dict = {}
    for N in sizes:
        if cfg.geometry == "p2p":
            values = _p2p_values(cfg, N, cfg.s, cfg.n_samples)
            diags = {}
        else:
            values, diags = _p2l_values(cfg, N, cfg.s, cfg.n_samples)
        estimates = [
            estimate_tail_from_values(values, N, cfg.s, t, cfg.geometry, cfg.direction)
            for t in cfg.t_values()
        ]
        entry: dict = {"estimates": [asdict(e) for e in estimates]}
        if cfg.fit_power is not None:
            try:
                fit = fit_exponent(
                    [(e.t, e.p_hat) for e in estimates],
                    cfg.fit_power,
                    cfg.n_samples,
                )
                entry["fit"] = asdict(fit)
            except ValueError as exc:
                entry["fit_error"] = str(exc)
        stats["by_N"][str(N)] = entry
        if diags:
            diagnostics[f"N={N}"] = diags
    stats["main"] = stats["by_N"][str(cfg.N)]
    return stats, diagnostics


# ---------------------------------------------------------------------------
# extrema growth


def run_extrema(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Running extrema of one scaled profile per replica, prefix windows.

    airy2: point-to-point profile with the parabola restored.
    airy1: line-to-point profile, reported both in normalized limit
    coordinates (value / 2^(1/3), window [0, t] in x = 2^(-2/3) s) and in raw
    profile coordinates (window [0, t] in s).
    """
    N = cfg.N
    ts = cfg.t_values()
    n = cfg.n_samples
    unit = height_unit(N)
    space = float((2 * N) ** 2) ** (1.0 / 3.0)

    if cfg.process == "airy2":
        k_max = floor_scaled_offset(N, ts[-1])
        if k_max > N:
            raise ConfigError("t_list", "window exceeds lattice cone")
        cutoffs = {t: floor_scaled_offset(N, t) for t in ts}
        region = _p2p_region(N, N - k_max, N)
        vals, _ = _run_batches(
            cfg.seed,
            n,
            region,
            ("point", 0, 0),
            threads=cfg.threads,
            batch_size=cfg.batch_size,
        )
        # columns: x = N-k_max .. N, i.e. k = N-x decreasing; flip to k = 0..k_max
        vals = vals[:, ::-1]
        ks = np.arange(0, k_max + 1)
        svals = ks / space
        scaled = (vals - 4.0 * N) / unit + svals[None, :] ** 2
        tables = {"normalized": _extrema_table(scaled, ks, cutoffs, ts, n)}
        diagnostics = {"k_max": int(k_max)}
    else:
        # raw window must reach s = 2^(2/3) * t_max so the normalized window
        # reaches x = t_max
        k_max = floor_scaled_offset(2 * N, ts[-1])
        norm_cut = {t: floor_scaled_offset(2 * N, t) for t in ts}
        raw_cut = {t: min(floor_scaled_offset(N, t), k_max) for t in ts}
        region, wlo, whi = _p2l_region(N, -2 * k_max, 0, cfg.trunc_const)
        vals, starts = _run_batches(
            cfg.seed,
            n,
            region,
            ("line", 0),
            threads=cfg.threads,
            batch_size=cfg.batch_size,
            track_start=True,
        )
        vals = vals[:, ::-1]  # k = 0 .. k_max (psi = -2k)
        ks = np.arange(0, k_max + 1)
        raw_scaled = (vals - 4.0 * N) / unit
        norm_scaled = raw_scaled / _CBRT2
        tables = {
            "normalized": _extrema_table(norm_scaled, ks, norm_cut, ts, n),
            "raw_window": _extrema_table(raw_scaled, ks, raw_cut, ts, n),
        }
        margin_x = int(round(float(N * N) ** (1.0 / 3.0))) // 2
        st = starts
        near = (st - wlo // 2 <= margin_x) | (whi // 2 - st <= margin_x)
        diagnostics = {
            "k_max": int(k_max),
            "truncation_boundary_hits": int(np.count_nonzero(near.any(axis=1))),
        }
    stats = {"process": cfg.process, "per_t": tables}
    return stats, diagnostics


def _extrema_table(
    scaled: np.ndarray,
    ks: np.ndarray,
    cutoffs: dict,
    ts: List[float],
    n: int,
) -> List[dict]:
    rows = []
    for t in ts:
        kc = cutoffs[t]
        win = scaled[:, : kc + 1]
        mx = win.max(axis=1)
        mn = win.min(axis=1)
        logt = math.log(t)
        rows.append(
            {
                "t": t,
                "n_profiles": n,
                "mean_max": float(mx.mean()),
                "se_max": float(mx.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                "mean_min": float(mn.mean()),
                "se_min": float(mn.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                "normalized_max": float(mx.mean() / logt ** (2.0 / 3.0)),
                "normalized_min": float(mn.mean() / logt ** (1.0 / 3.0)),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# stationarity / association / modulus


def run_stationarity(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Pairwise two-sample KS tests across scaled flat values at several s.

    Each s draws replicas from a disjoint derived seed stream.
    """
    samples = {}
    diagnostics = {}
    for j, s in enumerate(cfg.s_list):
        stream = derive_seed(cfg.seed, j)
        values, diags = _p2l_values(cfg, cfg.N, s, cfg.n_samples, stream_seed=stream)
        samples[s] = (values - 4.0 * cfg.N) / height_unit(cfg.N)
        diagnostics[f"s={s}"] = diags
    table = []
    ss = list(cfg.s_list)
    for i in range(len(ss)):
        for j in range(i + 1, len(ss)):
            d, p = ks_two_sample(samples[ss[i]], samples[ss[j]])
            table.append({"s1": ss[i], "s2": ss[j], "ks_stat": d, "p_value": p})
    return {"pairs": table}, diagnostics


def run_association(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Covariance of scaled droplet values at two spatial points."""
    N = cfg.N
    u1 = scaled_target(N, cfg.s1)
    u2 = scaled_target(N, cfg.s2)
    xlo, xhi = min(u1.x, u2.x), max(u1.x, u2.x)
    region = _p2p_region(N, xlo, xhi)
    vals, _ = _run_batches(
        cfg.seed,
        cfg.n_samples,
        region,
        ("point", 0, 0),
        threads=cfg.threads,
        batch_size=cfg.batch_size,
    )
    v1 = vals[:, u1.x - xlo]
    v2 = vals[:, u2.x - xlo]
    a = np.array([center_scale_p2p(v, N, cfg.s1, True) for v in v1])
    b = np.array([center_scale_p2p(v, N, cfg.s2, True) for v in v2])
    cov, lower = covariance_lower_bound(a, b)
    stats = {
        "s1": cfg.s1,
        "s2": cfg.s2,
        "covariance": cov,
        "lower_95": lower,
        "n_samples": cfg.n_samples,
    }
    return stats, {}


def run_modulus(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Quantiles of the scaled flat profile's modulus of continuity."""
    N = cfg.N
    sw = cfg.s_window
    k_hi = floor_scaled_offset(N, sw)
    k_lo = floor_scaled_offset(N, -sw)
    region, wlo, whi = _p2l_region(N, 2 * -k_hi, 2 * -k_lo, cfg.trunc_const)
    vals, _ = _run_batches(
        cfg.seed,
        cfg.n_samples,
        region,
        ("line", 0),
        threads=cfg.threads,
        batch_size=cfg.batch_size,
    )
    space = float((2 * N) ** 2) ** (1.0 / 3.0)
    unit = height_unit(N)
    # columns x ascending = psi ascending = k descending; flip so s increases
    ks = np.arange(k_lo, k_hi + 1)  # s = k/space after flip
    scaled = (vals[:, ::-1] - 4.0 * N) / unit
    svals = ks / space
    per_delta = {d: np.empty(cfg.n_samples) for d in cfg.delta_list}
    monotone_violations = 0
    for i in range(cfg.n_samples):
        prof = ScaledProfile(svals, scaled[i], ProfileKind.AIRY1_RAW)
        mods = [modulus_of_continuity(prof, d) for d in sorted(cfg.delta_list)]
        if any(b < a for a, b in zip(mods, mods[1:])):
            monotone_violations += 1
        for d, m in zip(sorted(cfg.delta_list), mods):
            per_delta[d][i] = m
    rows = []
    for d in cfg.delta_list:
        q = np.quantile(per_delta[d], [0.25, 0.5, 0.75])
        rows.append(
            {
                "delta": d,
                "q25": float(q[0]),
                "median": float(q[1]),
                "q75": float(q[2]),
                "mean": float(per_delta[d].mean()),
            }
        )
    return (
        {"per_delta": rows, "n_samples": cfg.n_samples},
        {"monotone_violations": monotone_violations},
    )


# ---------------------------------------------------------------------------
# corridor experiment


def corridor_for_config(cfg: ExperimentConfig) -> Corridor:
    """Straight corridor around the diagonal segment 0 -> (N, N).

    corridor_c is the strip half-width in psi units, in multiples of
    N^(2/3): membership means |psi - center| <= floor(c * N^(2/3)).
    """
    N = cfg.N
    half = max(int(cfg.corridor_c * float(N * N) ** (1.0 / 3.0)), 1)
    return Corridor(0, 2 * N, 0, 0, half)


def run_corridor(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Restricted vs unrestricted flat upper tail on shared realizations.

    Also backtracks each unrestricted geodesic and counts how often it
    already stays inside the corridor.
    """
    from .geodesic import backtrack, contained_in
    from .lattice import LineInterval
    from .weights import WeightField

    N = cfg.N
    c = corridor_for_config(cfg)
    blo, bhi = c.psi_bounds_at(0)
    target = LatticePoint(N, N)

    region_r, _, _ = _p2l_region(N, 0, 0, cfg.trunc_const, corridor=c)
    # restricted source: the corridor cross-section on L_0
    restricted, _ = _run_batches(
        cfg.seed,
        cfg.n_samples,
        region_r,
        ("line", 0),
        threads=cfg.threads,
        batch_size=cfg.batch_size,
    )
    restricted = restricted[:, 0]
    unrestricted, diags = _p2l_values(cfg, N, 0.0, cfg.n_samples)

    thr = tail_threshold(N, 0.0, cfg.t, "p2l", "upper")
    hits_r = int(np.count_nonzero(restricted >= thr))
    hits_u = int(np.count_nonzero(unrestricted >= thr))
    lo_r, hi_r = wilson_interval(hits_r, cfg.n_samples)
    couple_violations = int(np.count_nonzero(restricted > unrestricted))

    # the *unrestricted* geodesic starts anywhere on the truncated line
    _, wlo_u, whi_u = _p2l_region(N, 0, 0, cfg.trunc_const)
    iv = LineInterval(0, wlo_u, whi_u)
    contained = 0
    for k in range(cfg.n_samples):
        f = WeightField(derive_seed(cfg.seed, k))
        g = backtrack(f, iv, target, checkpoint_stride=cfg.checkpoint_stride)
        if contained_in(g, c):
            contained += 1

    stats = {
        "t": cfg.t,
        "threshold": thr,
        "n_samples": cfg.n_samples,
        "restricted": {
            "hits": hits_r,
            "p_hat": hits_r / cfg.n_samples,
            "ci_lo": lo_r,
            "ci_hi": hi_r,
        },
        "unrestricted": {"hits": hits_u, "p_hat": hits_u / cfg.n_samples},
        "corridor_half_width": c.half_width,
    }
    diags = dict(diags)
    diags.update(
        {
            "coupling_violations": couple_violations,
            "geodesic_contained": contained,
            "corridor_exits": cfg.n_samples - contained,
        }
    )
    return stats, diags


# ---------------------------------------------------------------------------
# dispatch and persistence


@dataclass
class ExperimentResult:
    format_version: int
    experiment: str
    config: dict
    statistics: dict
    diagnostics: dict
    wall_clock_s: float

    def statistics_json(self) -> str:
        """Canonical serialization used for determinism comparisons."""
        return json.dumps(
            {"statistics": self.statistics, "diagnostics": self.diagnostics},
            sort_keys=True,
            separators=(",", ":"),
        )


_RUNNERS = {
    "tail": run_tail,
    "extrema": run_extrema,
    "stationarity": run_stationarity,
    "association": run_association,
    "modulus": run_modulus,
    "corridor": run_corridor,
}


def run_config(cfg: ExperimentConfig) -> ExperimentResult:
    """Validate, dispatch, time, and optionally persist an experiment."""
    validate_config(cfg)
    t0 = time.perf_counter()
    try:
        stats, diags = _RUNNERS[cfg.experiment](cfg)
    except OutOfConeError as exc:
        raise ConfigError("s", str(exc)) from exc
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        FORMAT_VERSION, cfg.experiment, asdict(cfg), stats, diags, wall
    )
    if cfg.out:
        persist_result(result, Path(cfg.out))
    return result


def persist_result(result: ExperimentResult, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    base = f"{result.experiment}-seed{result.config['seed']}"
    path = out_dir / f"{base}.json"
    with open(path, "w") as fh:
        json.dump(asdict(result), fh, sort_keys=True, indent=2)
        fh.write("\n")
    csv = _result_csv(result)
    if csv is not None:
        (out_dir / f"{base}.csv").write_text(csv)
    return path


def _result_csv(result: ExperimentResult) -> Optional[str]:
    if result.experiment == "tail":
        lines = ["t,p_hat,ci_lo,ci_hi"]
        for e in result.statistics["main"]["estimates"]:
            lines.append(
                f"{e['t']:.17g},{e['p_hat']:.17g},{e['ci_lo']:.17g},{e['ci_hi']:.17g}"
            )
        return "\n".join(lines) + "\n"
    if result.experiment == "extrema":
        lines = [
            "t,mean_max,se_max,normalized_max,mean_min,se_min,normalized_min,n_profiles"
        ]
        for row in result.statistics["per_t"]["normalized"]:
            lines.append(
                f"{row['t']:.17g},{row['mean_max']:.17g},{row['se_max']:.17g},"
                f"{row['normalized_max']:.17g},{row['mean_min']:.17g},"
                f"{row['se_min']:.17g},{row['normalized_min']:.17g},{row['n_profiles']}"
            )
        return "\n".join(lines) + "\n"
    return None
