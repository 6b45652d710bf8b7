import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfkraichnan import levelwalk
from mfkraichnan.phases import (NEAR_BOUNDARY, PHASES, McBudget, SpeedDensity, _majority,
                                analytic_phase, annealed_speed_density, boundary_margin,
                                classify_trend, effective_exponent, empirical_phase,
                                phase_mapping_check, phase_raster, regularization_limit_study,
                                speed_integral_test, verdict_from_statistics, write_raster_csv)

GMAX = np.sqrt(2) / 2


@pytest.mark.parametrize("xi,gamma,setting,expected", [
    (0.5, 0.0, "monofractal", "regular"),
    (1.5, 0.0, "monofractal", "exit"),
    (2.0, 0.0, "monofractal", "natural"),
    (1.0, 0.0, "monofractal", "exit"),
    (0.9, 0.4, "mf_quenched", "exit"),        # 0.9 + 0.32 >= 1
    (0.5, 0.3, "mf_annealed", "regular"),     # 0.5 + 0.36 < 1
    (1.8, 0.5, "mlbm_quenched", "exit"),      # 1.5 <= 1.8 < 2.5
    (1.1, 0.3, "mlbm_quenched", "regular"),   # 1.1 < 1.18
])
def test_analytic_examples(xi, gamma, setting, expected):
    assert analytic_phase(xi, gamma, setting).verdict == expected


def test_effective_exponents_and_validation():
    assert effective_exponent(1.0, 0.5, "mf_quenched") == 1.5
    assert effective_exponent(1.0, 0.5, "mf_annealed") == 2.0
    assert effective_exponent(1.0, 0.5, "mlbm_quenched") == 0.5
    assert effective_exponent(1.0, 0.5, "mlbm_annealed") == 1.0
    for bad in ((1.0, 0.1, "monofractal"), (1.0, 0.8, "mf_quenched"), (-1.0, 0.1, "mf_quenched"),
                (1.0, 0.1, "other")):
        with pytest.raises(ValueError):
            analytic_phase(*bad)
    assert analytic_phase(1.02, 0.0, "monofractal").near_boundary
    assert boundary_margin(1.5, 0.0, "monofractal") == 0.5


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, GMAX * 0.999), st.booleans())
def test_mapping_property(xi, gamma, annealed):
    mk, ml = phase_mapping_check(xi, gamma, annealed)
    assert mk.verdict == ml.verdict


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 1.0), st.floats(0.0, GMAX * 0.999),
       st.sampled_from(["mf_quenched", "mf_annealed", "mlbm_quenched", "mlbm_annealed"]))
def test_phase_order_monotone(x1, dx, gamma, setting):
    # more roughness never moves the boundary back towards regular
    a = PHASES.index(analytic_phase(x1, gamma, setting).verdict)
    b = PHASES.index(analytic_phase(x1 + dx, gamma, setting).verdict)
    assert b >= a


def _regions_contiguous(raster):
    # along every row the verdict sequence is non-decreasing in phase order
    idx = np.vectorize(PHASES.index)(raster)
    return bool(np.all(np.diff(idx, axis=1) >= 0))


def test_raster_layout(tmp_path):
    xi = np.linspace(0.03, 2.0, 64)
    gam = np.linspace(0.0, 0.7, 64)
    for setting in ("mf_quenched", "mf_annealed"):
        r = phase_raster(setting, xi, gam)
        assert r.shape == (64, 64)
        assert _regions_contiguous(r)
        assert set(r.ravel()) == set(PHASES)
    write_raster_csv(tmp_path / "r.csv", "mf_quenched", xi, gam, r)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "xi,gamma,setting,verdict,method,flags" and len(lines) == 4097


def test_classify_trend_lebesgue_threshold():
    eps = np.geomspace(1e-2, 1e-8, 7)
    for xi, expected in ((0.999, "convergent"), (1.001, "divergent"), (1.0, "divergent"),
                         (0.5, "convergent"), (1.5, "divergent")):
        d = SpeedDensity.power_law(xi)
        v, _ = classify_trend(eps, [d.moment(e, 0.1) for e in eps])
        assert v == expected
    with pytest.raises(ValueError):
        classify_trend([1e-2, 1e-3], [1.0, 2.0])
    assert classify_trend(eps, np.ones(7))[0] == "indeterminate"


@pytest.mark.parametrize("xi,expected", [(0.5, "regular"), (1.5, "exit"), (2.0, "natural"),
                                         (2.5, "natural")])
def test_speed_integral_test_power(xi, expected):
    assert speed_integral_test(SpeedDensity.power_law(xi))["phase"] == expected
    quad = SpeedDensity(func=lambda r: r ** -xi)
    assert speed_integral_test(quad)["phase"] == expected


def test_speed_density_modes_agree():
    r = np.geomspace(1e-4, 1.0, 400)
    nodes = SpeedDensity(r=r, m=r ** -0.5, tail_exponent=0.5)
    exact = SpeedDensity.power_law(0.5)
    assert nodes.moment(1e-3, 0.5) == pytest.approx(exact.moment(1e-3, 0.5), rel=1e-4)
    assert nodes.moment(1e-6, 1e-4) == pytest.approx(exact.moment(1e-6, 1e-4), rel=1e-9)
    assert nodes.moment(1e-3, 0.5, 1) == pytest.approx(exact.moment(1e-3, 0.5, 1), rel=1e-4)
    e = np.linspace(0, 1, 11)
    cells = SpeedDensity(edges=e, cell_values=np.arange(10.0))
    assert cells.mass(0.0, 1.0) == pytest.approx(np.arange(10.0).sum() / 10)
    with pytest.raises(ValueError):
        nodes.moment(0.5, 2.0)
    with pytest.raises(ValueError):
        SpeedDensity(r=r, m=r ** -0.5).moment(1e-6, 1e-3)
    with pytest.raises(ValueError):
        SpeedDensity()


def test_regularization_trichotomy():
    xi = 2 / 3
    limits = {b: regularization_limit_study(xi, b * xi)["limit"] for b in (2.0, 1.0, 0.5)}
    assert limits == {2.0: "0", 1.0: "O(1)", 0.5: "infinity"}


def test_annealed_average():
    r = np.geomspace(1e-3, 1, 5)
    d = annealed_speed_density(((r, np.full(5, 0.5 * k)) for k in (1, 2)), min_members=2)
    assert np.allclose(d(r), 0.75)
    with pytest.raises(ValueError):
        annealed_speed_density([(r, np.ones(5))], min_members=2)


def test_decision_procedure_and_majority():
    f = verdict_from_statistics
    assert f({"hit_fraction": 0.9, "exceedance": 0.9, "branching": 0.0}) == "exit"
    assert f({"hit_fraction": 0.9, "exceedance": 0.1, "branching": 0.0}) == "regular"
    assert f({"hit_fraction": 0.9, "exceedance": 0.4, "branching": 0.0}) == "indeterminate"
    assert f({"hit_fraction": 0.0, "exceedance": 0.0, "branching": 0.1}) == "natural"
    assert f({"hit_fraction": 0.0, "exceedance": 0.0, "branching": 0.9}) == "indeterminate"
    assert f({"hit_fraction": 0.3, "exceedance": 0.0, "branching": 0.0}) == "indeterminate"
    assert _majority(["exit", "exit", "regular"]) == "exit"
    assert _majority(["exit", "regular"]) == "indeterminate"


def test_empirical_monofractal():
    assert empirical_phase(0.9, 0.0, "monofractal", seed=1).verdict == "regular"
    v = empirical_phase(1.5, 0.0, "monofractal", seed=1)
    assert v.verdict == "exit" and v.method == "empirical"
    near = empirical_phase(2.0, 0.0, "monofractal")
    assert near.method == "analytic" and near.diagnostics["routed"] == "near_boundary"
    with pytest.raises(ValueError):
        empirical_phase(1.5, 0.3, "mf_quenched", budget=McBudget(n_realizations=5))


# level-passage sampler ----------------------------------------------------------------

def test_passage_library_statistics():
    lib_i, lib_t = levelwalk.default_libraries()
    # Brownian exit of (1/2, 2) from 1: up with probability 1/3, mean time 1/2
    assert lib_i.up.mean() == pytest.approx(1 / 3, abs=0.025)
    assert lib_i.occupation.sum(axis=1).mean() == pytest.approx(0.5, rel=0.05)
    # reflected at 1, exit at 1/2: mean time 1/4
    assert lib_t.occupation.sum(axis=1).mean() == pytest.approx(0.25, rel=0.06)


def test_climb_clock_mean_for_flat_density():
    # E[clock] = int 2 (H - y) m dy; for m = 1 on [h_floor, H] this is (H - h_floor)^2
    chain = levelwalk.LevelChain(1.0, np.ones((9, levelwalk.N_HALF)))
    c = levelwalk.climb_clocks(chain, 0, 8, n_samples=20000, seed=3)
    h_floor = 2.0 ** -8 / 2
    assert c.mean() == pytest.approx((1 - h_floor) ** 2, rel=0.03)


def test_chain_continuation_and_walks():
    d = SpeedDensity.power_law(0.5)
    lf = lambda rng, n: np.full(n, 0.5 * np.log(2.0))
    chain = levelwalk.build_chain(d.mass, 1.0, 40, 10, lf)
    # continuation reproduces the exact power law below the resolved levels
    exact = levelwalk.build_chain(d.mass, 1.0, 40, 40)
    assert np.allclose(chain.half, exact.half, rtol=1e-6)
    with pytest.raises(ValueError):
        levelwalk.build_chain(d.mass, 1.0, 40, 10)
    out, clock = levelwalk.run_walks(chain, 3, 40, n_walks=500, seed=1)
    assert np.all(out == 1) and np.all(clock > 0)
    with pytest.raises(ValueError):
        levelwalk.climb_clocks(chain, 5, 3)
