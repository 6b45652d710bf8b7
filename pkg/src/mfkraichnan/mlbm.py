"""
Multiplicative Liouville Brownian motion on a chaos measure grid.

The process is reflected Brownian motion on ``[0, L]`` run with the clock

    C(t) = int_0^t |B_s|^-xi (dmu/dx)(B_s) ds = int l(t, y) y^-xi mu(dy),

so its speed measure is ``y^-xi mu(dy)``.  It is built directly on the
measure grid; the grid spacing is the only regularization.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numba as nb
import numpy as np

from . import levelwalk
from .field import GAMMA_MAX, ChaosMeasure, FieldGrid, build_chaos_measure, sample_log_field
from .kernel import KernelSpec, quenched_profile
from .paths import (PathRecord, _seed_uniforms, local_time, normal_stream, path_seeds, sample_brownian,
                    time_change)
from .phases import (McBudget, SpeedDensity, _continuation, _majority, _resolved_depth,
                     chain_statistics, classify_trend)
from .scaling import thick_point_slopes


@dataclass
class MlbmSpec:
    """Parameters of the multiplicative Liouville Brownian motion."""
    xi: float
    gamma: float
    measure: ChaosMeasure
    M0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.xi <= 2.0:
            raise ValueError(f"xi must lie in [0, 2], got {self.xi}")
        if not 0.0 <= self.gamma < GAMMA_MAX:
            raise ValueError(f"gamma must lie in [0, sqrt(2)/2), got {self.gamma}")
        if abs(self.measure.gamma - self.gamma) > 1e-12:
            raise ValueError("measure was built with a different gamma")
        if self.M0 < 0:
            raise ValueError("M0 must be nonnegative")
        g = self.measure.grid
        if g.domain_halfwidth < g.correlation_length:
            raise ValueError("measure grid must cover [0, L]")

    @property
    def L(self):
        return self.measure.grid.correlation_length


def clock_rate_cells(spec: MlbmSpec):
    """Cell edges on ``[0, L]`` and the clock rate ``rho^-xi dmu/dx`` per cell.

    The rate uses the cell midpoint for ``rho``, including the cell at the
    origin; an atom at 0 is handled by ``M0`` instead.
    """
    g = spec.measure.grid
    i0 = g.n_points // 2                      # node at x = 0
    n_cells = int(round(spec.L / g.dx))
    idx = i0 + np.arange(n_cells)
    edges = np.arange(n_cells + 1) * g.dx
    mid = edges[:-1] + 0.5 * g.dx
    rate = mid ** -spec.xi * spec.measure.weights[idx] / g.dx
    return edges, rate


def speed_density(spec: MlbmSpec):
    """Speed density ``y^-xi dmu/dy`` as a piecewise-constant :class:`SpeedDensity`."""
    edges, rate = clock_rate_cells(spec)
    kind = "quenched" if spec.gamma > 0 else "deterministic"
    return SpeedDensity(kind, edges=edges, cell_values=rate)


def _rate_at(values, edges, rate):
    i = np.minimum((values / (edges[1] - edges[0])).astype(np.int64), rate.size - 1)
    return rate[i]


def mlbm_clock(path: PathRecord, spec: MlbmSpec, estimator="path", t_checkpoints=None,
               h_floor=None):
    """Clock of a reflected path.

    Parameters
    ----------
    estimator : {"path", "occupation"}
        ``path`` integrates the rate along the path (trapezoid) and returns
        one value per path time.  ``occupation`` sums local time times the
        cell rate over the grid and returns one value per checkpoint
        (default: the final time).
    h_floor : float, optional
        Contact zone for the boundary weight ``M0``, default ``2 sqrt(dt)``.
    """
    v = path.values
    if np.any(v < 0) or np.any(v > spec.L * (1 + 1e-12)):
        raise ValueError("path leaves the measure support [0, L]")
    edges, rate = clock_rate_cells(spec)
    dt = path.dt
    h = 2 * math.sqrt(dt) if h_floor is None else h_floor
    if estimator == "path":
        f = _rate_at(v, edges, rate)
        if spec.M0:
            f = f + np.where(v < h, spec.M0 / (2 * h), 0.0)
        inc = 0.5 * (f[1:] + f[:-1]) * np.diff(path.times)
        return np.concatenate(([0.0], np.cumsum(inc)))
    if estimator != "occupation":
        raise ValueError("estimator must be 'path' or 'occupation'")
    # bands on the cell grid; each cell's band is its own width
    dy = edges[1] - edges[0]
    mids = edges[:-1] + 0.5 * dy
    lt = local_time(path, mids, 0.5 * dy, t_checkpoints)
    # reflection at 0 and L folds the band mass back inside the interval
    out = (lt.ell * (rate * dy)[:, None]).sum(axis=0)
    if spec.M0:
        near = local_time(path, np.array([0.0]), h, lt.t_checkpoints).ell[0]
        out = out + spec.M0 * near
    return out


@nb.njit(cache=True)
def _exit_chunk(st, z, sq, dt, r1, r2, rate, dx):
    # st = [x, clock]; returns 0 running, -1 / +1 exit side
    x, c = st[0], st[1]
    n = rate.size
    for k in range(z.size):
        i = int(x / dx)
        if i >= n:
            i = n - 1
        c += rate[i] * dt
        xn = x + sq * z[k]
        if xn <= r1 or xn >= r2:
            st[0], st[1] = xn, c
            return -1 if xn <= r1 else 1
        # Brownian-bridge crossing between grid times removes the late-exit bias
        e1 = 2.0 * (x - r1) * (xn - r1) / dt
        e2 = 2.0 * (r2 - x) * (r2 - xn) / dt
        if (e1 < 40.0 and np.random.random() < math.exp(-e1)) or \
                (e2 < 40.0 and np.random.random() < math.exp(-e2)):
            st[0], st[1] = xn, c
            return 1
        x = xn
    st[0], st[1] = x, c
    return 0


def exit_clocks(spec: MlbmSpec, interval, start, n_paths=1000, dt=1e-5, seed=0):
    """Clock at the first exit of ``interval`` for Brownian paths from ``start``.

    This is the exit time of the multiplicative Liouville Brownian motion,
    because the time change preserves the exit point.
    """
    r1, r2 = interval
    if not 0 <= r1 < start < r2 <= spec.L:
        raise ValueError("need 0 <= r1 < start < r2 <= L")
    edges, rate = clock_rate_cells(spec)
    sq = math.sqrt(dt)
    out = np.empty(n_paths)
    for k, sd in enumerate(path_seeds(seed, n_paths)):
        _seed_uniforms(int(sd) ^ 0x5BD1E995)
        st = np.array([float(start), 0.0])
        for z in normal_stream(sd):
            if _exit_chunk(st, z, sq, dt, float(r1), float(r2), rate, edges[1] - edges[0]) != 0:
                break
        out[k] = st[1]
    return out


def fold(values, L):
    """Reflect a free path into ``[0, L]``."""
    y = np.mod(values, 2 * L)
    return np.where(y > L, 2 * L - y, y)


def mlbm_path(spec: MlbmSpec, start, horizon, dt=1e-5, seed=0, brownian_time=None,
              max_brownian_time=100.0, dt_out=None, C_max=None):
    """Time-changed reflected Brownian path under the chaos clock.

    The Brownian duration is doubled until the clock passes ``horizon`` (or
    ``max_brownian_time`` is reached, which flags the record truncated).
    """
    if not 0 < start <= spec.L:
        raise ValueError("start must lie in (0, L]")
    T = max(horizon, 16 * dt) if brownian_time is None else brownian_time
    while True:
        B = sample_brownian(T, dt, seed, reflected=False, start=start)
        B = PathRecord(B.times, fold(B.values, spec.L), None, dict(B.meta, reflected=True))
        C = mlbm_clock(B, spec)
        if C[-1] >= horizon or T >= max_brownian_time or not np.isfinite(C[-1]):
            break
        T = min(2 * T, max_brownian_time)
    R = time_change(B, C, horizon, dt_out=dt_out, C_max=C_max)
    R.meta.update(process="mlbm", xi=spec.xi, gamma=spec.gamma, grid_dx=spec.measure.grid.dx)
    return R


# Seiberg bound ----------------------------------------------------------------------

def seiberg_integrals(measure: ChaosMeasure, xi, delta, cutoffs):
    """``I(eps) = sum_{eps <= rho_i <= delta} rho_i^-xi w_i`` for each cutoff."""
    g = measure.grid
    i0 = g.n_points // 2
    n = int(math.floor(delta / g.dx))
    mid = (np.arange(n) + 0.5) * g.dx
    terms = mid ** -xi * measure.weights[i0:i0 + n]
    tail = np.concatenate((np.cumsum(terms[::-1])[::-1], [0.0]))   # sum over rho_i >= rho_k
    k = np.ceil(np.asarray(cutoffs, float) / g.dx - 0.5).astype(int)
    return tail[np.clip(k, 0, n)]


def seiberg_test(xi, gamma, measures=None, delta=0.1, cutoffs=None, min_members=30):
    """Integrability of ``int_0^delta r^-xi mu(dr)`` from truncated sums.

    Each realization's sequence ``I(eps)`` is classified by the trend of its
    increments (:func:`classify_trend`); the verdict is the majority.  For
    ``gamma = 0`` the exact Lebesgue integral is used.
    """
    if gamma == 0.0:
        eps = np.geomspace(1e-2, 1e-8, 7) if cutoffs is None else np.asarray(cutoffs, float)
        dens = SpeedDensity.power_law(xi)
        I = np.array([dens.moment(e, delta, 0) for e in eps])
        v, s = classify_trend(eps, I, tol=1e-6)
        return {"verdict": v, "votes": [v], "slopes": [s], "cutoffs": eps}
    votes, slopes = [], []
    for m in measures or ():
        eps = _seiberg_cutoffs(m, delta, cutoffs)
        v, sl = classify_trend(eps, seiberg_integrals(m, xi, delta, eps), tol=0.0)
        votes.append(v)
        slopes.append(sl)
    if len(votes) < min_members:
        raise ValueError(f"need at least {min_members} realizations, got {len(votes)}")
    return {"verdict": _majority(votes), "votes": votes, "slopes": slopes}


def _seiberg_cutoffs(m, delta, cutoffs):
    eps = (np.geomspace(delta / 10, 100 * m.grid.cutoff, 9) if cutoffs is None
           else np.asarray(cutoffs, float))
    if eps.min() < 10 * m.grid.cutoff:
        raise ValueError("cutoffs under-resolved against the field cutoff")
    return eps


def seiberg_grid(xi_values, gamma, n_realizations=30, n_points=1 << 22, delta=0.1,
                 cutoffs=None, seed=0):
    """Seiberg verdicts for several ``xi`` sharing the same chaos realizations.

    Returns ``{xi: result}`` with the structure of :func:`seiberg_test`.
    """
    if n_realizations < 30:
        raise ValueError("need at least 30 realizations")
    votes = {x: [] for x in xi_values}
    slopes = {x: [] for x in xi_values}
    for sd in ensemble_seeds(seed, n_realizations):
        m = sample_measure(gamma, n_points, seed=sd)
        eps = _seiberg_cutoffs(m, delta, cutoffs)
        for x in xi_values:
            v, sl = classify_trend(eps, seiberg_integrals(m, x, delta, eps), tol=0.0)
            votes[x].append(v)
            slopes[x].append(sl)
        del m
    return {x: {"verdict": _majority(votes[x]), "votes": votes[x], "slopes": slopes[x]}
            for x in xi_values}


# boundary statistics ---------------------------------------------------------------

def boundary_statistics(spec: MlbmSpec, budget=McBudget(), seed=0):
    """Hitting, exceedance and branching fractions at 0 for this realization.

    Uses the level-passage sampler on the speed measure ``y^-xi mu(dy)``,
    continued below the grid by the scale invariance of the chaos.
    """
    dens = speed_density(spec)
    r_res = 8 * spec.measure.grid.dx / 0.045
    resolved = min(_resolved_depth(spec.L, r_res), budget.depth)
    lf = _continuation("mlbm_quenched", max(spec.xi, 0.0), spec.gamma)
    chain = levelwalk.build_chain(dens.mass, spec.L, budget.depth, resolved, lf, seed=seed)
    return chain_statistics(chain, budget, seed=seed + 1)


# occupation statistics -------------------------------------------------------------

def occupation_statistics(path: PathRecord, field: FieldGrid, resolutions, target_alpha=0.0,
                          n_samples=None, alpha_bins=None, slopes=None):
    """Distribution of the thickness exponent at the positions a path visits.

    The path is sampled at uniform times; each position's exponent is the
    slope of the re-mollified field against ``-log r``.  ``slopes`` may pass
    precomputed :func:`thick_point_slopes` for the whole grid.
    """
    if len(resolutions) < 3:
        raise ValueError("need at least 3 resolutions")
    v = path.values
    if np.any(np.abs(v) >= field.domain_halfwidth):
        raise ValueError("path leaves the field domain")
    if n_samples is not None and n_samples < v.size:
        v = v[np.linspace(0, v.size - 1, n_samples).astype(int)]
    s = thick_point_slopes(field, resolutions) if slopes is None else slopes
    alpha = s[field.index_of(v)]
    alpha = alpha[np.isfinite(alpha)]
    bins = np.linspace(-2.0, 2.0, 41) if alpha_bins is None else np.asarray(alpha_bins, float)
    hist, _ = np.histogram(alpha, bins=bins)
    med = float(np.median(alpha)) if alpha.size else float("nan")
    return {"alpha": alpha, "bins": bins, "time_fraction": hist / max(alpha.size, 1),
            "median": med, "deviation": med - target_alpha}


def visit_positions(path: PathRecord, rate, n_samples):
    """Positions of the time-changed path at ``n_samples`` uniform clock times.

    ``rate`` is the clock rate at each path point.  Each Brownian step is
    visited in proportion to the clock it accrues (left-point rule), which
    keeps the weighting sharp when a step spans many cells of the speed
    measure; interpolating between steps would blur it.
    """
    rate = np.asarray(rate, dtype=float)
    clock = np.cumsum(rate)
    t = (np.arange(n_samples) + 0.5) * (clock[-1] / n_samples)
    k = np.minimum(np.searchsorted(clock, t, side="right"), clock.size - 1)
    return PathRecord(t * path.dt, path.values[k], path.times[k], dict(path.meta, scheme="visits"))


def occupation_contrast(xi, gamma, n_realizations=10, n_paths=100, n_points=1 << 20,
                        brownian_time=0.5, dt=1e-5, n_samples=200, resolutions=None,
                        start=0.5, seed=0, L=1.0):
    """Thickness exponents visited by MK and MLBM paths on shared chaos realizations.

    Each realization carries a field on ``[-3.1 L, 3.1 L)``.  The MK path is
    reflected Brownian motion under the clock ``ds / (2 A(B_s))`` of the
    quenched coefficient; the MLBM path runs the chaos clock on the same
    Brownian path.  Both are folded into ``[0, L]``.

    Returns
    -------
    dict
        ``{"mk": report, "mlbm": report, "resolutions": ...}`` with reports
        pooled over all paths in the format of :func:`occupation_statistics`.
    """
    h = 3.1 * L
    dx = 2 * h / n_points
    res = (np.geomspace(32 * dx, 0.2 * L, 7) if resolutions is None
           else np.asarray(resolutions, float))
    pooled = {"mk": [], "mlbm": []}
    for sd in ensemble_seeds(seed, n_realizations):
        fld = sample_log_field(n_points, h, L, 2 * dx, sd)
        m = build_chaos_measure(fld, gamma)
        prof = quenched_profile(KernelSpec(xi=xi, L=L, eta=2 * dx), m, r_max=1.05 * L,
                                per_decade=64)
        spec = MlbmSpec(xi, gamma, m)
        slopes = thick_point_slopes(fld, res)
        for ps in path_seeds(sd, n_paths):
            B = sample_brownian(brownian_time, dt, int(ps), start=start)
            B = PathRecord(B.times, fold(B.values, L), None, dict(B.meta, reflected=True))
            edges, cell_rate = clock_rate_cells(spec)
            for kind, rate in (("mk", 0.5 / prof(B.values)),
                               ("mlbm", _rate_at(B.values, edges, cell_rate))):
                rep = occupation_statistics(visit_positions(B, rate, n_samples), fld, res,
                                            slopes=slopes)
                pooled[kind].append(rep["alpha"])
        del fld, m, slopes
    out = {"resolutions": res}
    for kind, target in (("mk", 0.0), ("mlbm", 2 * gamma)):
        a = np.concatenate(pooled[kind])
        bins = np.linspace(-2.0, 2.0, 41)
        hist, _ = np.histogram(a, bins=bins)
        med = float(np.median(a))
        out[kind] = {"alpha": a, "bins": bins, "time_fraction": hist / a.size, "median": med,
                     "deviation": med - target}
    return out


def write_occupation_csv(path, report, process_kind, xi, gamma, seed):
    """Occupation report CSV: alpha_bin, time_fraction, process_kind, xi, gamma, seed."""
    b = report["bins"]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha_bin", "time_fraction", "process_kind", "xi", "gamma", "seed"])
        for c, f in zip(0.5 * (b[1:] + b[:-1]), report["time_fraction"]):
            w.writerow([repr(float(c)), repr(float(f)), process_kind, xi, gamma, seed])


def sample_measure(gamma, n_points=1 << 20, L=1.0, seed=0):
    """Chaos measure on ``[-L, L)`` with cutoff at two grid spacings."""
    dx = 2 * L / n_points
    return build_chaos_measure(sample_log_field(n_points, L, L, 2 * dx, seed), gamma)


def ensemble_seeds(seed, n):
    """Seeds for ``n`` independent chaos realizations."""
    return [int(s) for s in path_seeds(seed, n)]
