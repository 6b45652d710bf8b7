"""
Boundary classification of the separation process at zero.

Analytic verdicts follow from an effective roughness exponent compared with
the thresholds 1 and 2.  Empirical verdicts come from Monte Carlo on the
time-changed process, using the level-passage sampler of
:mod:`mfkraichnan.levelwalk` so that the boundary is approached over a
hundred octaves.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy import integrate

from . import levelwalk
from .field import GAMMA_MAX, build_chaos_measure, sample_log_field
from .kernel import (KernelSpec, QuadratureError, deterministic_profile, quenched_profile_fft,
                     regularized_norm)

SETTINGS = ("monofractal", "mf_quenched", "mf_annealed", "mlbm_quenched", "mlbm_annealed")
PHASES = ("regular", "exit", "natural")
#: distance to a threshold below which only analytic verdicts are given
NEAR_BOUNDARY = 0.05


# analytic ---------------------------------------------------------------------------

def _check(xi, gamma, setting):
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}; expected one of {SETTINGS}")
    if not (np.isfinite(xi) and xi >= 0.0):
        raise ValueError(f"xi must be >= 0, got {xi}")
    if not 0.0 <= gamma < GAMMA_MAX:
        raise ValueError(f"gamma must lie in [0, sqrt(2)/2), got {gamma}")
    if setting == "monofractal" and gamma != 0.0:
        raise ValueError("the monofractal setting has gamma = 0")


def effective_exponent(xi, gamma, setting):
    """Exponent compared against the thresholds 1 and 2.

    ``xi + 2 gamma^2`` for quenched multifractal Kraichnan, ``xi + 4 gamma^2``
    for its annealed version, ``xi - 2 gamma^2`` for quenched MLBM and ``xi``
    otherwise.
    """
    _check(xi, gamma, setting)
    g2 = gamma * gamma
    return {"monofractal": xi, "mf_quenched": xi + 2 * g2, "mf_annealed": xi + 4 * g2,
            "mlbm_quenched": xi - 2 * g2, "mlbm_annealed": xi}[setting]


def _phase_of(x_eff):
    if x_eff < 1.0:
        return "regular"
    if x_eff < 2.0:
        return "exit"
    return "natural"


@dataclass
class PhaseVerdict:
    """Classification of the zero-separation boundary."""
    xi: float
    gamma: float
    setting: str
    verdict: str
    method: str
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def near_boundary(self):
        return bool(self.diagnostics.get("near_boundary", False))


def boundary_margin(xi, gamma, setting):
    """Distance of the effective exponent to the nearest threshold."""
    x = effective_exponent(xi, gamma, setting)
    return min(abs(x - 1.0), abs(x - 2.0))


def analytic_phase(xi, gamma, setting):
    """Verdict from the threshold rule; equality cases fall in the upper phase."""
    x = effective_exponent(xi, gamma, setting)
    margin = min(abs(x - 1.0), abs(x - 2.0))
    return PhaseVerdict(float(xi), float(gamma), setting, _phase_of(x), "analytic",
                        {"effective_exponent": x, "margin": margin,
                         "near_boundary": margin < NEAR_BOUNDARY})


def phase_mapping_check(xi, gamma, annealed=False):
    """Compare Kraichnan at ``xi`` with MLBM at ``xi + 4 gamma^2``.

    Returns both verdicts and raises ``AssertionError`` when they differ.
    """
    mk = analytic_phase(xi, gamma, "mf_annealed" if annealed else "mf_quenched")
    ml = analytic_phase(xi + 4 * gamma * gamma, gamma,
                        "mlbm_annealed" if annealed else "mlbm_quenched")
    if mk.verdict != ml.verdict:
        raise AssertionError(f"mapping mismatch at xi={xi}, gamma={gamma}: "
                             f"{mk.verdict} vs {ml.verdict}")
    return mk, ml


def phase_raster(setting, xi_values, gamma_values):
    """Analytic verdicts on a grid; returns an array of shape ``(len(gamma), len(xi))``."""
    out = np.empty((len(gamma_values), len(xi_values)), dtype=object)
    for i, g in enumerate(gamma_values):
        for j, x in enumerate(xi_values):
            out[i, j] = analytic_phase(float(x), float(g), setting).verdict
    return out


def write_raster_csv(path, setting, xi_values, gamma_values, raster, method="analytic"):
    """Phase-diagram CSV with columns xi, gamma, setting, verdict, method, flags."""
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["xi", "gamma", "setting", "verdict", "method", "flags"])
        for i, g in enumerate(gamma_values):
            for j, x in enumerate(xi_values):
                flag = "near_boundary" if boundary_margin(x, g, setting) < NEAR_BOUNDARY else ""
                w.writerow([repr(float(x)), repr(float(g)), setting, raster[i, j], method, flag])


# speed densities --------------------------------------------------------------------

class SpeedDensity:
    """Density of a speed measure on ``(0, r_max]``.

    Three representations are supported: a callable (integrated by
    quadrature), nodes with linear interpolation, or piecewise-constant
    cells.  Below ``r_min`` a power tail ``r^-tail_exponent`` is used when
    given; otherwise masses below ``r_min`` are rejected.
    """

    def __init__(self, kind="deterministic", func=None, r=None, m=None, edges=None,
                 cell_values=None, tail_exponent=None, r_max=None):
        if kind not in ("deterministic", "quenched"):
            raise ValueError("kind must be 'deterministic' or 'quenched'")
        self.kind = kind
        self.tail_exponent = tail_exponent
        if func is not None:
            self._mode = "func"
            self._f = func
            self.r_min = 0.0 if tail_exponent is None else 1e-300
            self.r_max = np.inf if r_max is None else float(r_max)
        elif r is not None:
            self._mode = "nodes"
            r = np.asarray(r, float)
            m = np.asarray(m, float)
            if r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0 or r.shape != m.shape:
                raise ValueError("nodes must be positive, increasing and match the values")
            self._r, self._m = r, m
            seg0 = 0.5 * (m[1:] + m[:-1]) * np.diff(r)
            seg1 = np.diff(r) * (r[1:] * (2 * m[1:] + m[:-1]) + r[:-1] * (m[1:] + 2 * m[:-1])) / 6
            self._c0 = np.concatenate(([0.0], np.cumsum(seg0)))
            self._c1 = np.concatenate(([0.0], np.cumsum(seg1)))
            self.r_min, self.r_max = float(r[0]), float(r[-1])
        elif edges is not None:
            self._mode = "cells"
            e = np.asarray(edges, float)
            v = np.asarray(cell_values, float)
            if e.size != v.size + 1 or np.any(np.diff(e) <= 0) or e[0] < 0:
                raise ValueError("cell edges must be increasing with one more entry than values")
            self._e, self._v = e, v
            mid = 0.5 * (e[1:] + e[:-1])
            self._c0 = np.concatenate(([0.0], np.cumsum(v * np.diff(e))))
            self._c1 = np.concatenate(([0.0], np.cumsum(v * mid * np.diff(e))))
            self.r_min, self.r_max = float(e[0]), float(e[-1])
        else:
            raise ValueError("give func, nodes (r, m) or cells (edges, cell_values)")

    # -- evaluation
    def __call__(self, r):
        r = np.asarray(r, float)
        if self._mode == "func":
            return np.asarray(self._f(r), float)
        if self._mode == "nodes":
            out = np.interp(r, self._r, self._m)
            lo = r < self.r_min
        else:
            i = np.clip(np.searchsorted(self._e, r, side="right") - 1, 0, self._v.size - 1)
            out = self._v[i]
            lo = r < self.r_min
        if np.any(lo) and self.tail_exponent is not None:
            m0 = self._m[0] if self._mode == "nodes" else self._v[0]
            out = np.where(lo, m0 * (np.maximum(r, 1e-300) / self.r_min) ** -self.tail_exponent, out)
        return out

    def _cum(self, x, power):
        if self._mode == "nodes":
            r, m = self._r, self._m
            c = self._c0 if power == 0 else self._c1
            i = np.clip(np.searchsorted(r, x, side="right") - 1, 0, r.size - 2)
            t = x - r[i]
            h = r[i + 1] - r[i]
            slope = (m[i + 1] - m[i]) / h
            if power == 0:
                part = m[i] * t + 0.5 * slope * t * t
            else:
                # int_0^t (r_i + s)(m_i + slope s) ds
                part = r[i] * m[i] * t + 0.5 * (m[i] + r[i] * slope) * t * t + slope * t ** 3 / 3
            return c[i] + part
        e, v = self._e, self._v
        c = self._c0 if power == 0 else self._c1
        i = np.clip(np.searchsorted(e, x, side="right") - 1, 0, v.size - 1)
        t = x - e[i]
        if power == 0:
            return c[i] + v[i] * t
        return c[i] + v[i] * (e[i] * t + 0.5 * t * t)

    def _tail(self, a, b, power):
        # int_a^b r^power m0 (r / r_min)^-tail dr for b <= r_min
        s = self.tail_exponent
        m0 = self._m[0] if self._mode == "nodes" else self._v[0]
        k = power - s + 1.0
        if abs(k) < 1e-12:
            return m0 * self.r_min ** s * np.log(b / a)
        return m0 * self.r_min ** s * (b ** k - a ** k) / k

    def moment(self, a, b, power=0):
        """``int_a^b r^power m(r) dr`` for ``power`` in {0, 1} (vectorized)."""
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        if np.any(b < a):
            raise ValueError("need a <= b")
        if np.any(b > self.r_max * (1 + 1e-12)):
            raise ValueError("interval beyond the tabulated range")
        if self._mode == "func":
            out = np.empty(a.shape)
            for idx in np.ndindex(a.shape):
                out[idx] = _quad_log(self._f, a[idx], b[idx], power)
            return out if out.ndim else float(out)
        below = a < self.r_min
        if np.any(below) and self.tail_exponent is None:
            raise ValueError("interval below the resolved range and no tail given")
        aa = np.maximum(a, self.r_min)
        bb = np.maximum(b, self.r_min)
        out = self._cum(bb, power) - self._cum(aa, power)
        if np.any(below):
            lo = np.minimum(b, self.r_min)
            tail = np.zeros(a.shape)
            tail[below] = self._tail(a[below], lo[below], power)
            out = out + tail
        return out if out.ndim else float(out)

    def mass(self, a, b):
        return self.moment(a, b, 0)

    # -- constructors
    @classmethod
    def from_profile(cls, profile, tail_exponent=None):
        """``m = 1/(2A)`` on the profile's nodes."""
        return cls(profile.kind, r=profile.r, m=0.5 / profile.values, tail_exponent=tail_exponent)

    @classmethod
    def power_law(cls, xi, prefactor=1.0):
        """``prefactor * r^-xi`` with exact moments."""
        return _PowerDensity(xi, prefactor)


class _PowerDensity(SpeedDensity):
    def __init__(self, xi, prefactor=1.0):
        self.kind = "deterministic"
        self.xi = float(xi)
        self.c = float(prefactor)
        self._mode = "power"
        self.r_min, self.r_max, self.tail_exponent = 0.0, np.inf, self.xi

    def __call__(self, r):
        return self.c * np.asarray(r, float) ** -self.xi

    def moment(self, a, b, power=0):
        a, b = np.asarray(a, float), np.asarray(b, float)
        k = power - self.xi + 1.0
        if abs(k) < 1e-14:
            out = self.c * np.log(b / a)
        else:
            with np.errstate(divide="ignore"):
                out = self.c * (b ** k - a ** k) / k
        return out if np.ndim(out) else float(out)


def _quad_log(f, a, b, power):
    if b <= a:
        return 0.0
    if a <= 0:
        raise ValueError("quadrature needs a > 0")
    # integrate in log r, one piece per decade
    edges = np.exp(np.linspace(np.log(a), np.log(b), max(2, int(np.ceil(np.log10(b / a))) + 1)))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(lambda u: float(f(np.exp(u))) * np.exp(u * (power + 1)),
                                  np.log(lo), np.log(hi), epsrel=1e-10, epsabs=0.0, limit=200)
        if not np.isfinite(val) or err > 1e-6 * abs(val) + 1e-300:
            raise QuadratureError(f"quadrature failed on [{lo:g}, {hi:g}]")
        total += val
    return total


# divergence tests -------------------------------------------------------------------

def classify_trend(cutoffs, integrals, tol=1e-6):
    """Convergent/divergent verdict for ``I(eps)`` as ``eps`` decreases.

    The increments ``I(eps_{k+1}) - I(eps_k)`` of a convergent integral
    shrink as a power of ``eps``.  The log-log slope of the increments
    against ``eps`` is positive in that case, zero for a logarithmic and
    negative for a power divergence.

    Returns ``(verdict, slope)``.
    """
    eps = np.asarray(cutoffs, float)
    I = np.asarray(integrals, float)
    if eps.size < 3 or np.any(np.diff(eps) >= 0):
        raise ValueError("need at least three strictly decreasing cutoffs")
    inc = np.diff(I)
    if not np.all(np.isfinite(inc)) or np.any(inc <= 0):
        return "indeterminate", float("nan")
    slope = float(np.polyfit(np.log(eps[1:]), np.log(inc), 1)[0])
    return ("convergent" if slope > tol else "divergent"), slope


DEFAULT_CUTOFFS = 10.0 ** -np.arange(2, 9)


def speed_integral_test(density, delta=0.1, cutoffs=DEFAULT_CUTOFFS, tol=1e-6):
    """Accessibility and exit tests from ``int r m(dr)`` and ``int m(dr)`` near zero.

    Returns a dict with the integral sequences, the trend slopes and the
    verdicts ``accessible`` (bool) and ``phase``.
    """
    eps = np.asarray(cutoffs, float)
    if np.any(eps >= delta):
        raise ValueError("cutoffs must lie below delta")
    I1 = np.array([density.moment(e, delta, 1) for e in eps])
    I2 = np.array([density.moment(e, delta, 0) for e in eps])
    v1, s1 = classify_trend(eps, I1, tol)
    v2, s2 = classify_trend(eps, I2, tol)
    if v1 == "indeterminate" or (v1 == "convergent" and v2 == "indeterminate"):
        phase = "indeterminate"
    elif v1 == "divergent":
        phase = "natural"
    else:
        phase = "exit" if v2 == "divergent" else "regular"
    return {"cutoffs": eps, "I1": I1, "I2": I2, "slope_I1": s1, "slope_I2": s2,
            "I1_trend": v1, "I2_trend": v2, "accessible": v1 == "convergent", "phase": phase}


def regularization_limit_study(xi, beta, eta_sequence=None, tol=0.05):
    """Mass of the regularized speed measure on ``(-eta, eta)`` as ``eta -> 0``.

    With ``kappa = eta^(2 xi / beta)`` the mass scales as a power of ``eta``;
    the fitted slope decides between the limits 0, O(1) and infinity.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    etas = 10.0 ** -np.arange(3.0, 9.5, 0.5) if eta_sequence is None else np.asarray(eta_sequence, float)
    if np.any(np.diff(etas) >= 0):
        raise ValueError("eta_sequence must be decreasing")
    masses = []
    for eta in etas:
        kappa = eta ** (2 * xi / beta)

        def f(r, eta=eta, kappa=kappa):
            return 1.0 / (2.0 * (regularized_norm(r, eta, beta) ** xi + kappa))

        # the parabola cap has width eta^(1/2 + 1/beta); geometric breakpoints beyond it
        knee = min(eta, eta ** (0.5 + 1.0 / beta))
        n_geo = max(1, int(np.ceil(np.log10(eta / knee) * 2)))
        pts = np.concatenate(([0.0], np.geomspace(knee, eta, n_geo + 1)))
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            val, err = integrate.quad(f, lo, hi, epsrel=1e-10, limit=200)
            if not np.isfinite(val) or err > 1e-6 * abs(val) + 1e-300:
                raise QuadratureError(f"quadrature failed at eta={eta:g}")
            total += val
        masses.append(2.0 * total)
    masses = np.array(masses)
    slope = float(np.polyfit(np.log(etas), np.log(masses), 1)[0])
    limit = "0" if slope > tol else ("infinity" if slope < -tol else "O(1)")
    return {"eta": etas, "mass": masses, "slope": slope, "limit": limit,
            "predicted_slope": 0.5 + (1.0 - 2.0 * xi) / beta}


def annealed_speed_density(profiles, min_members=1000):
    """Ensemble average of ``1/(2A)`` over quenched profiles sharing a grid.

    Parameters
    ----------
    profiles : iterable of (r, A)
        Coefficient tables on identical separation grids (``r[0] > 0``), for
        instance from :func:`quenched_profile_fft` with the zero lag dropped.
    """
    total = None
    r0 = None
    n = 0
    for r, A in profiles:
        r = np.asarray(r, float)
        if total is None:
            r0, total = r, np.zeros(r.size)
        elif r.shape != r0.shape or not np.array_equal(r, r0):
            raise ValueError("profiles must share the separation grid")
        total += 0.5 / np.asarray(A, float)
        n += 1
    if n < min_members:
        raise ValueError(f"annealed average needs at least {min_members} realizations, got {n}")
    return SpeedDensity("deterministic", r=r0, m=total / n)


# empirical classification -----------------------------------------------------------

@dataclass(frozen=True)
class McBudget:
    """Monte Carlo effort and decision thresholds of :func:`empirical_phase`."""
    n_walks: int = 2000
    n_climbs: int = 2000
    horizon: float = 5.0
    depth: int = 120
    start_level: int = 3          # h = L/8, the closest level to r0 = 0.1
    branch_level: int = 10        # h ~ 1e-3
    budget_factor: float = 10.0
    n_realizations: int = 30
    n_annealed: int = 1000
    n_points: int = 1 << 18


def _continuation(setting, xi, gamma):
    a = effective_exponent(xi, gamma, setting)
    ln2 = math.log(2.0)
    sign = {"mf_quenched": -1.0, "mlbm_quenched": 1.0}.get(setting, 0.0)

    def log_factor(rng, n):
        steps = np.full(n, a * ln2)
        if sign != 0.0 and gamma > 0:
            steps += sign * 2.0 * gamma * rng.normal(0.0, math.sqrt(ln2), n)
        return steps
    return log_factor


def _resolved_depth(L, r_res):
    # deepest level whose half-block [h/2, h] lies above r_res
    if r_res <= 0:
        return 10 ** 6
    return int(max(0, math.floor(math.log2(L / (2.0 * r_res)))))


def chain_statistics(chain, budget=McBudget(), seed=0):
    """Hitting, exceedance and branching statistics of one level chain."""
    ss = np.random.SeedSequence(seed).generate_state(4)
    out, _ = levelwalk.run_walks(chain, budget.start_level, budget.depth, -1, budget.horizon,
                                 budget.n_walks, seed=int(ss[0]))
    hit = float(np.mean(out == 1))
    deep = levelwalk.climb_clocks(chain, budget.start_level, budget.depth, budget.n_climbs, int(ss[1]))
    half = levelwalk.climb_clocks(chain, budget.start_level, budget.depth // 2, budget.n_climbs,
                                  int(ss[2]))
    exceed = float(np.mean(deep > budget.budget_factor * np.median(half)))
    b, _ = levelwalk.run_walks(chain, budget.branch_level, budget.depth, budget.start_level,
                               budget.horizon, budget.n_walks, seed=int(ss[3]))
    branch = float(np.mean(b == 2))
    return {"hit_fraction": hit, "exceedance": exceed, "branching": branch}


def verdict_from_statistics(stats):
    """Decision procedure on the three statistics."""
    hit, exceed, branch = stats["hit_fraction"], stats["exceedance"], stats["branching"]
    if hit > 0.5:
        if exceed > 0.5:
            return "exit"
        if exceed < 0.25:
            return "regular"
        return "indeterminate"
    if hit < 0.1:
        return "natural" if branch < 0.5 else "indeterminate"
    return "indeterminate"


def _majority(verdicts):
    vals, counts = np.unique(np.asarray(verdicts, dtype=object).astype(str), return_counts=True)
    order = np.argsort(counts)[::-1]
    if vals.size > 1 and counts[order[0]] == counts[order[1]]:
        return "indeterminate"
    return str(vals[order[0]])


def _deterministic_mk_density(xi, L=1.0):
    spec = KernelSpec(xi=xi, L=L)
    prof = deterministic_profile(spec, r_min=1e-5 * L, r_max=L, per_decade=8)
    return SpeedDensity.from_profile(prof, tail_exponent=xi), 2e-5 * L


def _mk_realization(xi, gamma, L, n_points, seed):
    h = 3.1 * L
    dx = 2 * h / n_points
    fld = sample_log_field(n_points, h, L, 2 * dx, seed)
    meas = build_chaos_measure(fld, gamma)
    r, A = quenched_profile_fft(KernelSpec(xi=xi, L=L), meas, 1.05 * L)
    return r[1:], A[1:], 100 * fld.cutoff


def _mlbm_realization(xi, gamma, L, n_points, seed):
    dx = 2 * L / n_points
    fld = sample_log_field(n_points, L, L, 2 * dx, seed)
    meas = build_chaos_measure(fld, gamma)
    x = fld.x
    pos = x >= 0
    edges = np.append(x[pos], x[pos][-1] + dx)
    mid = x[pos] + 0.5 * dx
    dens = meas.weights[pos] / dx * mid ** -xi
    return SpeedDensity("quenched", edges=edges, cell_values=dens), 8 * dx / 0.045


def empirical_phase(xi, gamma, setting, budget=McBudget(), seed=0, sources=None, L=1.0):
    """Monte Carlo verdict for the boundary at zero.

    Each realization of the speed density (one for deterministic settings,
    ``budget.n_realizations`` for quenched ones) is turned into a level
    chain and classified from three statistics: the fraction of paths from
    ``r0 ~ 0.1`` reaching zero within the horizon, the fraction of climbs
    from the deepest floor whose clock exceeds ``budget_factor`` times the
    median climb from half that depth, and the fraction of paths from
    ``r0 ~ 1e-3`` reaching ``0.1`` within the horizon.  Below the grid
    resolution the density is continued with the exact scale invariance of
    the chaos (a Gaussian random walk of the log density per octave).

    ``sources`` may supply the realizations as :class:`SpeedDensity`
    objects paired with their resolution, ``[(density, r_res), ...]``.
    """
    _check(xi, gamma, setting)
    margin = boundary_margin(xi, gamma, setting)
    if margin < NEAR_BOUNDARY:
        v = analytic_phase(xi, gamma, setting)
        v.diagnostics["routed"] = "near_boundary"
        return v

    rng_seeds = np.random.SeedSequence(seed).generate_state(2 * budget.n_realizations + 2)
    if sources is None:
        sources = _default_sources(xi, gamma, setting, budget, rng_seeds, L)
    log_factor = _continuation(setting, xi, gamma)
    verdicts, stats = [], []
    for k, (dens, r_res) in enumerate(sources):
        resolved = min(_resolved_depth(L, r_res), budget.depth)
        chain = levelwalk.build_chain(dens.mass, L, budget.depth, resolved, log_factor,
                                      seed=int(rng_seeds[-1 - k % (len(rng_seeds) - 1)]) + k)
        st = chain_statistics(chain, budget, seed=int(rng_seeds[k % len(rng_seeds)]) + 7 * k)
        st["resolved_levels"] = resolved
        stats.append(st)
        verdicts.append(verdict_from_statistics(st))
    verdict = _majority(verdicts)
    diag = {"margin": margin, "effective_exponent": effective_exponent(xi, gamma, setting),
            "near_boundary": False, "verdicts": verdicts, "statistics": stats,
            "n_realizations": len(verdicts)}
    return PhaseVerdict(float(xi), float(gamma), setting, verdict, "empirical", diag)


def _default_sources(xi, gamma, setting, budget, seeds, L):
    if setting in ("monofractal", "mlbm_annealed") or gamma == 0.0:
        if setting.startswith("mlbm"):
            return [(SpeedDensity.power_law(xi), 0.0)]
        return [_deterministic_mk_density(xi, L)]
    if setting == "mf_annealed":
        profs = (_mk_realization(xi, gamma, L, budget.n_points, int(s))[:2]
                 for s in np.random.SeedSequence(int(seeds[0])).generate_state(budget.n_annealed))
        r_res = 100 * 2 * (6.2 * L / budget.n_points)
        return [(annealed_speed_density(profs, min_members=budget.n_annealed), r_res)]
    if budget.n_realizations < 30:
        raise ValueError("quenched settings need at least 30 realizations")
    if setting == "mf_quenched":
        def gen():
            for s in seeds[:budget.n_realizations]:
                r, A, r_res = _mk_realization(xi, gamma, L, budget.n_points, int(s))
                yield SpeedDensity("quenched", r=r, m=0.5 / A), r_res
        return gen()

    def gen_mlbm():
        for s in seeds[:budget.n_realizations]:
            yield _mlbm_realization(xi, gamma, L, budget.n_points, int(s))
    return gen_mlbm()
