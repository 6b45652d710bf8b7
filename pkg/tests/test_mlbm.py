import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from mfkraichnan import mlbm
from mfkraichnan.field import build_chaos_measure, sample_log_field
from mfkraichnan.kernel import power_profile
from mfkraichnan.paths import PathRecord, clock_process, green_function, sample_brownian


def _spec(xi, gamma, n=1 << 12, seed=0):
    return mlbm.MlbmSpec(xi, gamma, mlbm.sample_measure(gamma, n, seed=seed))


def _reflected(T, dt, seed, start=0.4):
    B = sample_brownian(T, dt, seed, start=start)
    return PathRecord(B.times, mlbm.fold(B.values, 1.0), None, dict(B.meta, reflected=True))


def test_spec_validation():
    m = mlbm.sample_measure(0.2, 1 << 10)
    with pytest.raises(ValueError):
        mlbm.MlbmSpec(2.5, 0.2, m)
    with pytest.raises(ValueError):
        mlbm.MlbmSpec(1.0, 0.3, m)
    with pytest.raises(ValueError):
        mlbm.MlbmSpec(1.0, 0.2, m, M0=-1.0)


def test_identity_clock():
    spec = _spec(0.0, 0.0)
    B = _reflected(0.2, 1e-4, 1)
    assert np.allclose(mlbm.mlbm_clock(B, spec), B.times, rtol=1e-12)


def test_monofractal_clock_matches_diffusion_clock():
    # gamma = 0: speed density r^-xi, i.e. the diffusion with A(r) = r^xi / 2
    spec = _spec(0.5, 0.0, n=1 << 16)
    B = _reflected(0.2, 1e-5, 2)
    c_mlbm = mlbm.mlbm_clock(B, spec)[-1]
    c_diff = clock_process(B, power_profile(0.5, 0.5))[-1]
    assert c_mlbm == pytest.approx(c_diff, rel=0.02)


def test_two_estimators_agree():
    spec = _spec(0.5, 0.2, n=1 << 12)
    B = _reflected(0.5, 1e-7, 3)
    a = mlbm.mlbm_clock(B, spec)[-1]
    b = mlbm.mlbm_clock(B, spec, estimator="occupation")[-1]
    assert a == pytest.approx(b, rel=0.02)
    with pytest.raises(ValueError):
        mlbm.mlbm_clock(B, spec, estimator="bogus")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_clock_monotone_additive(seed):
    spec = _spec(1.0, 0.3, seed=seed % 7)
    B = _reflected(0.05, 1e-4, seed)
    C = mlbm.mlbm_clock(B, spec)
    assert np.all(np.diff(C) >= 0)
    k = C.size // 3
    tail = PathRecord(B.times[k:] - B.times[k], B.values[k:], None, dict(B.meta))
    assert C[-1] == pytest.approx(C[k] + mlbm.mlbm_clock(tail, spec)[-1], rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50.0, 50.0), st.floats(0.1, 5.0))
def test_fold_range(x, L):
    y = mlbm.fold(np.array([x]), L)[0]
    assert 0.0 <= y <= L
    assert mlbm.fold(np.array([y]), L)[0] == pytest.approx(y)


def test_path_leaving_support_rejected():
    spec = _spec(0.5, 0.2)
    B = sample_brownian(0.1, 1e-4, 0, start=0.9)
    with pytest.raises(ValueError):
        mlbm.mlbm_clock(PathRecord(B.times, np.abs(B.values) + 1.0, None, {}), spec)


def test_identity_clock_path_is_reflected_bm():
    spec = _spec(0.0, 0.0)
    ends = [mlbm.mlbm_path(spec, 0.5, 0.05, dt=1e-4, seed=s).values[-1] for s in range(2000)]
    ref = mlbm.fold(0.5 + np.sqrt(0.05) * np.random.default_rng(1).standard_normal(2000), 1.0)
    assert stats.ks_2samp(ends, ref).pvalue > 0.01


def test_lbm_slows_down_on_heavy_regions():
    # steps of ~1e-5 resolve the cells of width ~1.2e-4
    spec = _spec(0.0, 0.4, n=1 << 14)
    B = _reflected(1e-3, 1e-10, 5)
    rate = np.diff(mlbm.mlbm_clock(B, spec)) / 1e-10
    g = spec.measure.grid
    dens = spec.measure.density[g.index_of(B.values[:-1])]
    rho = stats.spearmanr(dens, rate).statistic
    assert rho > 0.9


def test_speed_measure_correspondence():
    # MC exit times of (0.1, 1) against the Green integral of y^-xi dmu/dy
    mc, quad = [], []
    for s in range(10):
        spec = _spec(0.5, 0.3, n=1 << 14, seed=100 + s)
        e, rate = mlbm.clock_rate_cells(spec)
        mid = 0.5 * (e[1:] + e[:-1])
        sel = (mid > 0.1) & (mid < 1.0)
        quad.append(np.sum(green_function(0.3, mid[sel], 0.1, 1.0) * rate[sel] * (e[1] - e[0])))
        mc.append(mlbm.exit_clocks(spec, (0.1, 1.0), 0.3, 1000, 1e-5, seed=s).mean())
    assert np.sum(mc) == pytest.approx(np.sum(quad), rel=0.05)


def test_annealed_reduction():
    # ensemble mean of rho^-xi dmu/drho equals rho^-xi cell by cell
    xi, gamma = 0.5, 0.3
    dens = []
    for s in range(2000):
        spec = _spec(xi, gamma, n=1 << 8, seed=s)
        e, rate = mlbm.clock_rate_cells(spec)
        dens.append(rate[::16])
    dens = np.array(dens)
    mid = (0.5 * (e[1:] + e[:-1]))[::16]
    se = dens.std(axis=0, ddof=1) / np.sqrt(dens.shape[0])
    assert np.all(np.abs(dens.mean(axis=0) - mid ** -xi) < 3 * se)


def test_seiberg_examples():
    assert mlbm.seiberg_test(0.999, 0.0)["verdict"] == "convergent"
    assert mlbm.seiberg_test(1.001, 0.0)["verdict"] == "divergent"
    res = mlbm.seiberg_grid([0.5, 1.5], 0.3, n_realizations=30, n_points=1 << 20, seed=4)
    assert res[0.5]["verdict"] == "convergent"
    assert res[1.5]["verdict"] == "divergent"
    with pytest.raises(ValueError):
        mlbm.seiberg_test(0.5, 0.3, measures=[])
    with pytest.raises(ValueError):
        mlbm.seiberg_grid([0.5], 0.3, n_realizations=10)
    m = mlbm.sample_measure(0.3, 1 << 12)
    with pytest.raises(ValueError):
        mlbm.seiberg_test(0.5, 0.3, measures=[m] * 30, cutoffs=[1e-2, 1e-3, 1e-5])


def test_occupation_without_chaos(tmp_path):
    res = mlbm.occupation_contrast(0.5, 0.0, n_realizations=2, n_paths=10, n_points=1 << 18, seed=1)
    assert abs(res["mk"]["median"]) < 0.15 and abs(res["mlbm"]["median"]) < 0.15
    mlbm.write_occupation_csv(tmp_path / "o.csv", res["mlbm"], "mlbm", 0.5, 0.0, 1)
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "alpha_bin,time_fraction,process_kind,xi,gamma,seed" and len(lines) == 41


def test_occupation_validation():
    f = sample_log_field(1 << 12, 1.0, 1.0, 2e-3, seed=0)
    B = sample_brownian(0.1, 1e-4, 0, start=0.5)
    with pytest.raises(ValueError):
        mlbm.occupation_statistics(B, f, [0.01, 0.1])
    far = PathRecord(B.times, B.values + 5.0, None, {})
    with pytest.raises(ValueError):
        mlbm.occupation_statistics(far, f, [0.01, 0.03, 0.1])


def test_boundary_statistics_exit_case():
    # 1 + 2 gamma^2 <= xi < 2 + 2 gamma^2: the boundary is reached and absorbs
    spec = _spec(1.8, 0.5, n=1 << 16, seed=2)
    st_ = mlbm.boundary_statistics(spec, seed=1)
    assert st_["hit_fraction"] > 0.9 and st_["exceedance"] > 0.9
