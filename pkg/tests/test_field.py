import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfkraichnan.field import (GAMMA_MAX, ChaosMeasure, EmbeddingError, build_chaos_measure,
                               coarse_average, dump, embedding_eigenvalues, load,
                               mollified_log_kernel, remollify, sample_log_field,
                               window_mass_moment)


def test_kernel_shape():
    eta = 0.01
    assert mollified_log_kernel(0.0, 1.0, eta) == pytest.approx(np.log(1 / eta) + 1)
    assert mollified_log_kernel(0.1, 1.0, eta) == pytest.approx(np.log(10.0))
    assert mollified_log_kernel(1.5, 1.0, eta) == 0.0
    # continuous at the cutoff
    assert mollified_log_kernel(eta * (1 - 1e-12), 1.0, eta) == pytest.approx(np.log(1 / eta), rel=1e-9)


def test_same_seed_bit_identical():
    a = sample_log_field(1 << 12, 1.0, 1.0, 2e-3, seed=5)
    b = sample_log_field(1 << 12, 1.0, 1.0, 2e-3, seed=5)
    c = sample_log_field(1 << 12, 1.0, 1.0, 2e-3, seed=6)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_embedding_nonnegative_for_standard_setup():
    lam = embedding_eigenvalues(1 << 12, 2.0 / (1 << 12), 1.0, 4.0 / (1 << 12))
    assert lam.min() > -1e-10 * lam.max()


def test_field_covariance_matches_kernel():
    # ensemble covariance at lags 0 and 0.1 against the kernel
    n = 1 << 10
    dx = 2.0 / n
    eta = 2 * dx
    lag = int(round(0.1 / dx))
    prods0, prods1 = [], []
    for s in range(400):
        f = sample_log_field(n, 1.0, 1.0, eta, seed=s).values
        prods0.append(f[n // 2] ** 2)
        prods1.append(f[n // 2] * f[n // 2 + lag])
    for prods, lg in ((prods0, 0.0), (prods1, lag * dx)):
        prods = np.array(prods)
        se = prods.std(ddof=1) / np.sqrt(prods.size)
        assert abs(prods.mean() - mollified_log_kernel(lg, 1.0, eta)) < 4 * se


def test_input_validation():
    with pytest.raises(ValueError):
        sample_log_field(1000, 1.0, 1.0, 0.01, seed=0)
    with pytest.raises(ValueError):
        sample_log_field(1 << 10, 1.0, 1.0, 1e-4, seed=0)
    with pytest.raises(ValueError):
        sample_log_field(1 << 10, 1.0, 2.0, 0.01, seed=0)
    f = sample_log_field(1 << 10, 1.0, 1.0, 0.01, seed=0)
    with pytest.raises(ValueError):
        build_chaos_measure(f, GAMMA_MAX)


def test_embedding_error_when_clipping_exceeds_budget():
    # a negative cap constant breaks positive definiteness
    with pytest.raises(EmbeddingError):
        sample_log_field(1 << 8, 1.0, 1.0, 0.2, seed=0, v0=-5.0)


def test_gamma_zero_is_lebesgue(small_field):
    m = build_chaos_measure(small_field, 0.0)
    assert np.allclose(m.weights, small_field.dx)
    assert m.mass(0.0, 0.5) == pytest.approx(0.5)


def test_chaos_mean_mass_is_one():
    totals = []
    for s in range(300):
        f = sample_log_field(1 << 10, 1.0, 1.0, 4.0 / (1 << 10), seed=s)
        totals.append(build_chaos_measure(f, 0.2).mass(0.0, 1.0))
    totals = np.array(totals)
    assert abs(totals.mean() - 1.0) < 3 * totals.std(ddof=1) / np.sqrt(totals.size)


def test_window_moment_matches_mass(small_measure):
    g = small_measure.grid
    w = np.array([g.dx, 64 * g.dx])
    first = window_mass_moment(small_measure, w, p=1)
    # first moment over a tiling is total mass / number of windows
    assert first[0] == pytest.approx(small_measure.weights.mean())
    with pytest.raises(ValueError):
        window_mass_moment(small_measure, [10.0])


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_mass_additive(small_measure, a, d1, d2):
    b, c = a + d1, a + d1 + d2
    c = min(c, 0.999)
    b = min(b, c)
    tot = small_measure.mass(a, c)
    assert small_measure.mass(a, b) + small_measure.mass(b, c) == pytest.approx(tot, rel=1e-9, abs=1e-15)
    assert small_measure.mass(a, b) >= 0


def test_coarse_average_and_remollify(small_measure, small_field):
    assert coarse_average(small_measure, 0.0, 0.25) == pytest.approx(small_measure.mass(0, 0.25) / 0.25)
    with pytest.raises(ValueError):
        coarse_average(small_measure, 0.0, small_field.dx / 2)
    flat = remollify(np.ones(100), 9)
    assert np.all(np.isnan(flat[:4])) and np.allclose(flat[4:-4], 1.0)


def test_dump_roundtrip(tmp_path, small_field, small_measure):
    dump(small_field, tmp_path / "f.bin")
    back = load(tmp_path / "f.bin")
    assert np.array_equal(back.values, small_field.values)
    assert back.cutoff == small_field.cutoff
    dump(small_measure, tmp_path / "m.bin")
    mb = load(tmp_path / "m.bin")
    assert isinstance(mb, ChaosMeasure)
    assert np.array_equal(mb.weights, small_measure.weights)
    (tmp_path / "bad.bin").write_bytes(b"x" * 80)
    with pytest.raises(ValueError):
        load(tmp_path / "bad.bin")
