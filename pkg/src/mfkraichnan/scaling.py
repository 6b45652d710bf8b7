"""
Closed-form multifractal exponents, moment-scaling fits and thick-point analysis.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import FieldGrid, GAMMA_MAX, remollify

SQRT2 = np.sqrt(2.0)


# closed forms -------------------------------------------------------------------

def zeta_u(p, xi, gamma):
    """Structure-function exponent of the velocity, ``(xi/2 + gamma^2) p - gamma^2 p^2 / 2``."""
    p = np.asarray(p, dtype=float)
    return (0.5 * xi + gamma ** 2) * p - 0.5 * gamma ** 2 * p * p


def zeta_a(p, xi, gamma):
    """Moment exponent of the quenched coefficient, ``zeta_u(2p)``."""
    return zeta_u(2.0 * np.asarray(p, dtype=float), xi, gamma)


def tau_chaos(p, gamma):
    """Intermittency correction of chaos moments, ``2 gamma^2 p (1 - p)``."""
    p = np.asarray(p, dtype=float)
    return 2.0 * gamma ** 2 * p * (1.0 - p)


def dimension_thick(alpha):
    """Hausdorff dimension ``(1 - alpha^2/2)_+`` of the alpha-thick points."""
    alpha = np.asarray(alpha, dtype=float)
    return np.maximum(1.0 - 0.5 * alpha * alpha, 0.0)


@dataclass
class ExponentTable:
    """Named exponents at a list of moment orders plus scalar derived parameters."""
    xi: float
    gamma: float
    entries: list = dc_field(default_factory=list)
    derived: dict = dc_field(default_factory=dict)

    def value(self, name, p=None):
        if p is None:
            return self.derived[name]
        for n, q, v in self.entries:
            if n == name and q == p:
                return v
        raise KeyError((name, p))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["name", "p", "value"])
            for n, q, v in self.entries:
                wr.writerow([n, repr(float(q)), repr(float(v))])
            for n, v in self.derived.items():
                wr.writerow([n, "", repr(float(v))])


def _check_params(xi, gamma):
    if not 0.0 < xi <= 2.0:
        raise ValueError(f"xi must lie in (0, 2], got {xi}")
    if not 0.0 <= gamma < GAMMA_MAX:
        raise ValueError(f"gamma must lie in [0, sqrt(2)/2), got {gamma}")


def closed_form_exponents(xi, gamma, p_list=(1.0,)):
    """Evaluate the exponent families and derived roughness parameters.

    Families ``zeta_U``, ``zeta_A`` and ``tau`` are listed at each ``p``.
    ``derived`` holds the effective, mean-field and minimal roughness
    exponents, the mean and extreme Hoelder exponents and the flatness
    exponent ``zeta_U(4) - 2 zeta_U(2)``.
    """
    _check_params(xi, gamma)
    tab = ExponentTable(float(xi), float(gamma))
    for p in p_list:
        p = float(p)
        tab.entries.append(("zeta_U", p, float(zeta_u(p, xi, gamma))))
        tab.entries.append(("zeta_A", p, float(zeta_a(p, xi, gamma))))
        tab.entries.append(("tau", p, float(tau_chaos(p, gamma))))
    g2 = gamma ** 2
    h_bar = 0.5 * xi + g2
    tab.derived = {
        "xi_eff": xi + 2 * g2,
        "xi_mf": xi + 4 * g2,
        "xi_min": xi + 2 * g2 - 2 * SQRT2 * gamma,
        "H_mean": h_bar,
        "H_min": h_bar - SQRT2 * gamma,
        "H_max": h_bar + SQRT2 * gamma,
        "flatness": float(zeta_u(4, xi, gamma) - 2 * zeta_u(2, xi, gamma)),
    }
    return tab


def legendre_tau(p, gamma):
    """``inf over |alpha| < sqrt 2`` of ``alpha^2/2 + 2 p gamma (gamma - alpha)``.

    The stationary point ``alpha = 2 p gamma`` is clamped to the admissible
    interval, which gives the linear branch for large ``|p|``.
    """
    p = np.asarray(p, dtype=float)
    a = np.clip(2.0 * p * gamma, -SQRT2, SQRT2)
    out = 0.5 * a * a + 2.0 * p * gamma * (gamma - a)
    return out if out.ndim else float(out)


# moment scaling fits ---------------------------------------------------------------

@dataclass
class ScalingFit:
    """Result of a compensated-moment slope fit."""
    p: float
    slope: float
    stderr: float
    r_range: tuple
    n_samples: int
    intercept: float = 0.0
    residuals: np.ndarray = dc_field(default=None, repr=False)

    def __post_init__(self):
        if not self.r_range[0] < self.r_range[1]:
            raise ValueError("r_min must be below r_max")


def _wls_slope(x, y, w):
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    return slope, ym - slope * xm


def fit_moment_scaling(r, samples, p, r_range=None, n_boot=1000, seed=0, weights=None,
                       min_members=100):
    """Slope of ``log(E[X(r)^p]) / p`` against ``log r``.

    Parameters
    ----------
    r : array_like, shape (m,)
        Separations shared by all ensemble members.
    samples : array_like, shape (n, m)
        One row per realization.
    p : float
        Nonzero moment order.
    r_range : tuple, optional
        Fit window; defaults to the full span of ``r``.
    n_boot : int
        Bootstrap resamples of ensemble members used for ``stderr``.
    weights : array_like, optional
        Regression weights per retained separation; uniform by default.

    Returns
    -------
    ScalingFit
    """
    if p == 0:
        raise ValueError("p must be nonzero")
    r = np.asarray(r, dtype=float)
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[0] < min_members:
        raise ValueError(f"need at least {min_members} ensemble members, got {X.shape[0]}")
    lo, hi = r_range if r_range is not None else (r.min(), r.max())
    sel = (r >= lo) & (r <= hi)
    if sel.sum() < 2:
        raise ValueError("empty fit range")
    Xs = X[:, sel]
    if float(p) != int(p) and np.any(Xs <= 0):
        raise ValueError("nonpositive samples with non-integer p")
    lr = np.log(r[sel])
    w = np.ones(lr.size) if weights is None else np.asarray(weights, dtype=float)[sel]
    powered = Xs ** p

    def fit(rows):
        m = powered[rows].mean(axis=0)
        return _wls_slope(lr, np.log(m) / p, w)

    every = np.arange(X.shape[0])
    slope, icpt = fit(every)
    resid = np.log(powered.mean(axis=0)) / p - (icpt + slope * lr)
    stderr = 0.0
    if n_boot > 0:
        rng = np.random.default_rng(seed)
        boots = np.array([fit(rng.integers(0, X.shape[0], X.shape[0]))[0] for _ in range(n_boot)])
        stderr = float(boots.std(ddof=1))
    return ScalingFit(float(p), float(slope), stderr, (float(lo), float(hi)), int(X.shape[0]),
                      float(icpt), resid)


def loglog_slope(r, values, r_range=None):
    """Ordinary least-squares slope of ``log values`` against ``log r``."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(values, dtype=float)
    lo, hi = r_range if r_range is not None else (r.min(), r.max())
    sel = (r >= lo) & (r <= hi)
    if sel.sum() < 2:
        raise ValueError("empty fit range")
    return float(np.polyfit(np.log(r[sel]), np.log(v[sel]), 1)[0])


def write_moment_csv(path, fits, curves=None):
    """Summary CSV ``p, slope, stderr``; ``curves`` maps p to ``(r, moment)`` for a long-format companion."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["p", "slope", "stderr"])
        for f in fits:
            wr.writerow([repr(f.p), repr(f.slope), repr(f.stderr)])
    if curves:
        long_path = str(path).replace(".csv", "_curves.csv")
        with open(long_path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["p", "r", "compensated_moment"])
            for p, (rs, mom) in curves.items():
                for a, b in zip(rs, mom):
                    wr.writerow([repr(float(p)), repr(float(a)), repr(float(b))])


# thick points -----------------------------------------------------------------------

def _resolution_cells(field: FieldGrid, resolutions):
    res = np.asarray(resolutions, dtype=float)
    if res.size < 3:
        raise ValueError("need at least 3 resolutions")
    if np.any(res <= field.dx) or np.any(res >= field.correlation_length):
        raise ValueError("resolutions must lie strictly between the grid spacing and L")
    return np.maximum(1, np.round(res / field.dx).astype(int))


def coarse_fields(field: FieldGrid, resolutions):
    """Re-mollified copies of the field, one row per resolution."""
    cells = _resolution_cells(field, resolutions)
    return np.vstack([remollify(field.values, c) for c in cells])


def thick_point_slopes(field: FieldGrid, resolutions, indices=None):
    """OLS slope of the coarse field against ``-log r`` at grid ``indices``.

    Returns NaN where a coarse window leaves the grid.
    """
    stack = coarse_fields(field, resolutions)
    if indices is not None:
        stack = stack[:, np.asarray(indices)]
    x = -np.log(np.asarray(resolutions, dtype=float))
    xc = x - x.mean()
    return (xc[:, None] * stack).sum(axis=0) / (xc * xc).sum()


def thick_point_exponents(field: FieldGrid, resolutions, points):
    """Thick-point exponent estimates at physical ``points``.

    For each point the field averaged at each resolution is regressed on
    ``-log r``; the slope estimates the thickness alpha.
    """
    pts = np.asarray(points, dtype=float)
    lo, hi = -field.domain_halfwidth, field.domain_halfwidth
    if np.any(pts < lo) or np.any(pts >= hi):
        raise ValueError("points outside the field domain")
    return thick_point_slopes(field, resolutions, field.index_of(pts))


def _box_values(field, resolutions, window):
    L = field.correlation_length
    if resolutions is None:
        k = np.arange(3, 64)
        resolutions = field.dx * 2.0 ** k
        resolutions = resolutions[resolutions <= L / 16]
    res = np.asarray(resolutions, dtype=float)
    if res.size < 4:
        raise ValueError("need at least 4 resolutions")
    cells = _resolution_cells(field, res)
    if window is None:
        edge = res.max()
        window = (-field.domain_halfwidth + edge, field.domain_halfwidth - edge)
    a, b = window
    i0, i1 = int(field.index_of(a)), int(field.index_of(b))
    boxes = []
    for c in cells:
        coarse = remollify(field.values, c)
        vals = coarse[np.arange(i0 + c // 2, i1 - c // 2, c)]
        if np.any(np.isnan(vals)):
            raise ValueError("window too close to the grid edge for the coarsest resolution")
        boxes.append(vals)
    return res, boxes


def singularity_spectrum(field: FieldGrid, alpha_bins, resolutions=None, window=None,
                         method="canonical", q_grid=None):
    """Box-counting estimate of the dimension of the alpha-level sets.

    The window is tiled by boxes of size ``r`` at each resolution and the
    coarse field is read at the box centers.

    ``method="histogram"`` counts, per bin ``[a0, a1)``, the boxes whose
    ratio ``Gamma_r / (-log r)`` falls in the bin and fits ``log N(r)``
    against ``-log r``.  This estimator converges slowly because the ratio
    carries an O(1/sqrt(log 1/r)) Gaussian spread.

    ``method="canonical"`` tilts the boxes by ``exp(q Gamma_r)`` and reads
    ``alpha(q)`` and ``f(q)`` off the scale dependence of the tilted mean
    and entropy; only slopes enter, so scale-independent offsets cancel.
    ``D_hat`` at a bin center is interpolated from the ``(alpha(q), f(q))``
    curve and is 0 for centers outside the attained alpha range.

    Parameters
    ----------
    alpha_bins : sequence of (a0, a1)
    resolutions : sequence of float, optional
        Defaults to a dyadic ladder from 8 cells up to ``L / 16``.
    window : (float, float), optional
        Region analysed; defaults to the whole grid minus one coarsest
        resolution at each edge.

    Returns
    -------
    list of (alpha_center, D_hat, n_boxes_at_finest)
    """
    res, boxes = _box_values(field, resolutions, window)
    x = -np.log(res)
    counts = np.array([[np.count_nonzero((g / xr >= a0) & (g / xr < a1)) for g, xr in zip(boxes, x)]
                       for a0, a1 in alpha_bins], dtype=float)
    out = []
    if method == "histogram":
        for q, (a0, a1) in enumerate(alpha_bins):
            nz = counts[q] > 0
            d = max(float(np.polyfit(x[nz], np.log(counts[q, nz]), 1)[0]), 0.0) if nz.sum() >= 2 else 0.0
            out.append((0.5 * (a0 + a1), d, int(counts[q, 0])))
        return out
    if method != "canonical":
        raise ValueError(f"unknown method {method!r}")
    qs = np.linspace(-3.0, 3.0, 121) if q_grid is None else np.asarray(q_grid, dtype=float)
    mean = np.zeros((qs.size, res.size))
    ent = np.zeros_like(mean)
    for j, g in enumerate(boxes):
        lw = qs[:, None] * g[None, :]
        lw -= lw.max(axis=1, keepdims=True)
        w = np.exp(lw)
        w /= w.sum(axis=1, keepdims=True)
        mean[:, j] = w @ g
        ent[:, j] = (w * np.log(np.where(w > 0, w, 1.0))).sum(axis=1)
    alpha_q = np.polyfit(x, mean.T, 1)[0]
    f_q = -np.polyfit(x, ent.T, 1)[0]
    order = np.argsort(alpha_q)
    for q, (a0, a1) in enumerate(alpha_bins):
        c = 0.5 * (a0 + a1)
        if c < alpha_q.min() or c > alpha_q.max():
            d = 0.0
        else:
            d = max(float(np.interp(c, alpha_q[order], f_q[order])), 0.0)
        out.append((c, d, int(counts[q, 0])))
    return out


def write_spectrum_csv(path, spectrum):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["alpha", "D_hat", "n_boxes"])
        for a, d, nb in spectrum:
            wr.writerow([repr(a), repr(d), nb])
