import json
import math

import numpy as np
import pytest

from lppsim.experiments import (
    ConfigError,
    ExperimentConfig,
    TailEstimate,
    config_from_dict,
    estimate_tail,
    estimate_tail_from_values,
    fit_exponent,
    run_config,
    tail_threshold,
)
from lppsim.scaling import height_unit


def base(experiment="tail", **kw):
    d = dict(experiment=experiment, seed=11, N=40, n_samples=200)
    d.update(kw)
    return ExperimentConfig(**d)


# --------------------------------------------------------------- validation


def test_required_keys():
    with pytest.raises(ConfigError, match="n_samples"):
        config_from_dict({"experiment": "tail", "seed": 1, "N": 10})


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="frobnicate"):
        config_from_dict(
            {"experiment": "tail", "seed": 1, "N": 10, "n_samples": 5, "frobnicate": 1}
        )


def test_unknown_experiment():
    with pytest.raises(ConfigError, match="experiment"):
        config_from_dict({"experiment": "nope", "seed": 1, "N": 10, "n_samples": 5})


def test_zero_samples_rejected():
    with pytest.raises(ConfigError, match="n_samples"):
        run_config(base(n_samples=0, t=1.0))


def test_p2l_nonzero_s_rejected():
    with pytest.raises(ConfigError, match="'s'"):
        run_config(base(geometry="p2l", s=0.3, t=1.0))


def test_lower_tail_threshold_positivity():
    # 4N - t * unit <= 0 must be rejected
    N = 10
    t_bad = 4 * N / height_unit(N) + 1
    with pytest.raises(ConfigError, match="'t'"):
        run_config(base(N=N, direction="lower", t=t_bad))


def test_extrema_cone_validation():
    with pytest.raises(ConfigError, match="lattice cone"):
        run_config(
            base("extrema", N=500, n_samples=2, process="airy2",
                 t_list=[4.0, 8.0, 16.0, 32.0])
        )
    # airy1 has no cone restriction: same window validates fine
    cfg = base("extrema", N=50, n_samples=2, process="airy1", t_list=[4.0, 8.0])
    run_config(cfg)


# --------------------------------------------------------------- thresholds


def test_tail_threshold_formulas():
    N, s, t = 100, 0.5, 1.5
    unit = height_unit(N)
    assert tail_threshold(N, 0.0, t, "p2l", "upper") == 4 * N + t * unit
    assert tail_threshold(N, 0.0, t, "p2l", "lower") == 4 * N - t * unit
    assert tail_threshold(N, s, t, "p2p", "upper") == pytest.approx(
        4 * N - s * s * unit + t * unit
    )
    assert tail_threshold(N, s, t, "p2p", "lower") == pytest.approx(
        4 * N - s * s * unit - t * unit
    )


def test_estimate_degenerate_thresholds():
    values = np.array([5.0, 6.0, 7.0])
    e = estimate_tail_from_values(values, 1, 0.0, 0.01, "p2p", "upper")
    # threshold 4 + eps is below every value -> p_hat small? no: upper counts >=
    assert e.hits == 3 and e.p_hat == 1.0
    unit = height_unit(1)
    e = estimate_tail_from_values(values, 1, 0.0, 100 / unit, "p2p", "upper")
    assert e.hits == 0 and e.p_hat == 0.0
    assert e.ci_hi <= 4.5 / 3 and e.ci_hi >= 0.5  # rule-of-three scale at n=3
    assert e.ci_lo == 0.0


def test_wilson_invariants_on_estimates():
    e = estimate_tail_from_values(np.arange(10.0), 1, 0.0, 1.0, "p2p", "upper")
    assert 0 <= e.ci_lo <= e.p_hat <= e.ci_hi <= 1


# --------------------------------------------------------------- fitting


def test_fit_exponent_exact_three_halves():
    ts = [1.0, 1.5, 2.0]
    pts = [(t, math.exp(-(4 / 3) * t**1.5)) for t in ts]
    fit = fit_exponent(pts, 1.5)
    assert fit.coefficient == pytest.approx(4 / 3, rel=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-9)


def test_fit_exponent_exact_cubic():
    pts = [(t, math.exp(-(t**3) / 12)) for t in (2.0, 2.5, 3.0)]
    fit = fit_exponent(pts, 3.0)
    assert fit.coefficient == pytest.approx(1 / 12, rel=1e-12)


def test_fit_exponent_noise_within_three_stderr():
    rng = np.random.default_rng(0)
    ts = np.linspace(1.0, 3.0, 8)
    ok = 0
    for _ in range(20):
        pts = [
            (t, math.exp(-(4 / 3) * t**1.5) * (1 + rng.uniform(-0.05, 0.05)))
            for t in ts
        ]
        fit = fit_exponent(pts, 1.5)
        if abs(fit.coefficient - 4 / 3) <= 3 * max(fit.stderr, 1e-12):
            ok += 1
    assert ok >= 17


def test_fit_exponent_hit_filter():
    pts = [(1.0, 0.5), (2.0, 0.1), (3.0, 1e-6)]
    with pytest.raises(ValueError, match="usable"):
        fit_exponent(pts, 1.5, n_samples=1000)  # last point has 0.001 hits
    fit = fit_exponent(pts, 1.5, n_samples=10**9)
    assert len(fit.points) == 3


# --------------------------------------------------------------- runners


def test_tail_runner_nested_thresholds_monotone():
    cfg = base(t_list=[0.4, 0.8, 1.2, 1.6], geometry="p2p", n_samples=500, N=50)
    r = run_config(cfg)
    ps = [e["p_hat"] for e in r.statistics["main"]["estimates"]]
    assert all(a >= b for a, b in zip(ps, ps[1:]))


def test_tail_runner_ladder_common_seeds():
    cfg = base(t_list=[0.5], n_samples=300, N=40, n_ladder=[20, 40])
    r = run_config(cfg)
    assert set(r.statistics["by_N"]) == {"20", "40"}
    assert r.statistics["main"] == r.statistics["by_N"]["40"]


def test_p2l_dominates_p2p_hits():
    # same seeds: upper-tail hits of p2l contain those of p2p
    from lppsim.experiments import _p2l_values, _p2p_values

    cfg = base(n_samples=400, N=40)
    vp = _p2p_values(cfg, 40, 0.0, 400)
    vl, _ = _p2l_values(cfg, 40, 0.0, 400)
    assert (vl >= vp).all()
    thr = tail_threshold(40, 0.0, 0.9, "p2p", "upper")
    assert set(np.nonzero(vp >= thr)[0]) <= set(np.nonzero(vl >= thr)[0])


def test_association_variance_positive():
    cfg = base("association", s1=0.0, s2=0.25, n_samples=300, N=40)
    r = run_config(cfg)
    assert r.statistics["covariance"] > 0


@pytest.mark.slow
def test_association_decays_at_large_separation():
    # widely separated points decorrelate: covariance small, and the lower
    # bound must not be significantly negative
    cfg = base("association", s1=0.0, s2=5.0, n_samples=2000, N=500,
               threads=2, batch_size=128, seed=20260809)
    r = run_config(cfg)
    assert r.statistics["covariance"] < 0.25
    assert r.statistics["lower_95"] >= -0.1


def test_corridor_covering_cone_equals_unrestricted():
    # a corridor wider than the truncation window does not bind: the
    # restricted and unrestricted estimates coincide replica-wise
    cfg = base("corridor", t=0.8, n_samples=80, N=25, corridor_c=60.0)
    r = run_config(cfg)
    assert r.statistics["restricted"]["hits"] == r.statistics["unrestricted"]["hits"]
    assert r.diagnostics["coupling_violations"] == 0
    assert r.diagnostics["geodesic_contained"] == cfg.n_samples


def test_stationarity_self_stream_disjoint():
    cfg = base("stationarity", s_list=[0.0, 0.5], n_samples=200, N=40)
    r = run_config(cfg)
    assert len(r.statistics["pairs"]) == 1
    assert 0 <= r.statistics["pairs"][0]["p_value"] <= 1


def test_modulus_monotone_and_range():
    cfg = base("modulus", s_window=0.8, delta_list=[1.6, 0.2], n_samples=30, N=60)
    r = run_config(cfg)
    assert r.diagnostics["monotone_violations"] == 0
    rows = {row["delta"]: row for row in r.statistics["per_delta"]}
    # delta = full window -> modulus equals range(max-min); >= smaller delta
    assert rows[1.6]["median"] >= rows[0.2]["median"]


def test_extrema_prefix_monotone_per_replica():
    cfg = base("extrema", process="airy1", t_list=[2.0, 4.0], n_samples=40, N=40)
    r = run_config(cfg)
    rows = r.statistics["per_t"]["normalized"]
    m2 = rows[0]["mean_max"] * math.log(2.0) ** (2 / 3)
    m4 = rows[1]["mean_max"] * math.log(4.0) ** (2 / 3)
    assert m4 >= m2  # nested windows: raw means must be ordered
    # min over [0,t] <= value at s=0 <= max over [0,t] implies mean bounds
    assert rows[0]["mean_min"] * math.log(2.0) ** (1 / 3) <= m2


def test_run_config_persists_and_reruns_identically(tmp_path):
    cfg = base(t_list=[0.5, 1.0], n_samples=150, N=30, out=str(tmp_path))
    r1 = run_config(cfg)
    path = tmp_path / "tail-seed11.json"
    assert path.exists()
    data = json.loads(path.read_text())
    assert data["format_version"] == 1
    assert data["config"]["N"] == 30
    assert (tmp_path / "tail-seed11.csv").read_text().startswith("t,p_hat,ci_lo,ci_hi")
    r2 = run_config(cfg)
    assert r1.statistics_json() == r2.statistics_json()


def test_rerun_from_echoed_config(tmp_path):
    # the config echo in a result file is a complete, valid config: feeding
    # it back reproduces the statistics byte for byte
    cfg = base(t_list=[0.6], n_samples=120, N=25, out=str(tmp_path))
    r1 = run_config(cfg)
    echoed = json.loads((tmp_path / "tail-seed11.json").read_text())["config"]
    echoed["out"] = None
    r2 = run_config(config_from_dict(echoed))
    assert r1.statistics_json() == r2.statistics_json()


def test_thread_count_does_not_change_statistics():
    a = run_config(base(t_list=[0.7], n_samples=260, N=35, threads=1, batch_size=64))
    b = run_config(base(t_list=[0.7], n_samples=260, N=35, threads=8, batch_size=13))
    assert a.statistics_json() == b.statistics_json()


def test_estimate_tail_single():
    e = estimate_tail(base(t=0.8, n_samples=300, N=30))
    assert isinstance(e, TailEstimate)
    assert e.n_samples == 300
    assert e.threshold == tail_threshold(30, 0.0, 0.8, "p2p", "upper")


def test_corridor_runner_couplings():
    cfg = base("corridor", t=0.8, n_samples=60, N=30, corridor_c=2.0)
    r = run_config(cfg)
    assert r.diagnostics["coupling_violations"] == 0
    assert r.statistics["restricted"]["hits"] <= r.statistics["unrestricted"]["hits"]


@pytest.mark.slow
def test_corridor_hit_ratio_at_scale():
    # strip of half-width N^(2/3) around the diagonal keeps an O(1) fraction
    # of the upper-tail hits
    cfg = base(
        "corridor", t=1.0, n_samples=400, N=1000, corridor_c=1.0,
        threads=2, batch_size=64, seed=20260809,
    )
    r = run_config(cfg)
    hits_r = r.statistics["restricted"]["hits"]
    hits_u = r.statistics["unrestricted"]["hits"]
    assert r.diagnostics["coupling_violations"] == 0
    assert hits_u > 0
    assert hits_r / hits_u >= 0.25


@pytest.mark.slow
def test_upper_tail_diagnostic_near_asymptote():
    # recorded as a diagnostic, not an assertion on the asymptotic value:
    # the finite-size point probability only has to sit inside its own CI
    e = estimate_tail(
        base(t=1.0, n_samples=20000, N=1000, threads=2, batch_size=128,
             seed=20260809, geometry="p2p", direction="upper")
    )
    assert e.ci_lo <= e.p_hat <= e.ci_hi
    print(f"p_hat(t=1)={e.p_hat:.5f} vs exp(-4/3)={math.exp(-4/3):.3f} "
          f"(finite-N bias diagnostic)")
