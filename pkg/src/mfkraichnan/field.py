"""
Log-correlated Gaussian fields and Gaussian multiplicative chaos on a 1D grid.

The field is sampled by circulant embedding of the mollified kernel

    k_eta(r) = log(L/eta) + v0 (1 - r/eta)     for 0 <= r < eta
             = log(L/r)                         for eta <= r < L
             = 0                                for r >= L

on a periodic grid of twice the requested size.  With v0 = 1 and L = 1 the
pointwise variance is log(1/eta) + 1, so that Z_eta = exp(2 gamma^2 Var)
reduces to (e/eta)^{2 gamma^2}.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

#: regularization constant added to the variance by the cap at r < eta
V0 = 1.0
#: critical intermittency, chaos measures require gamma < GAMMA_MAX
GAMMA_MAX = np.sqrt(2.0) / 2.0

_CLIP_THRESHOLD = 1e-12


class EmbeddingError(RuntimeError):
    """The circulant extension of the kernel is not nonnegative definite."""


def _is_pow2(n):
    return n >= 2 and (n & (n - 1)) == 0


def mollified_log_kernel(r, L, eta, v0=V0):
    """Covariance of the regularized field at separation ``r`` (vectorized)."""
    r = np.abs(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    inner = r < eta
    mid = (r >= eta) & (r < L)
    out[inner] = np.log(L / eta) + v0 * (1.0 - r[inner] / eta)
    out[mid] = np.log(L / r[mid])
    return out


@dataclass
class FieldGrid:
    """Uniform-grid sample of the regularized log-correlated field.

    Grid nodes are ``x_i = -domain_halfwidth + i * dx`` for ``i < n_points``;
    node ``i`` represents the cell ``[x_i, x_i + dx)``.
    """
    domain_halfwidth: float
    n_points: int
    correlation_length: float
    cutoff: float
    values: np.ndarray
    seed: int
    v0: float = V0
    clipped_mass: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.n_points < 2 or self.values.shape != (self.n_points,):
            raise ValueError("values must hold exactly n_points >= 2 entries")
        if self.cutoff < self.dx:
            raise ValueError("cutoff must be at least one grid spacing")

    @property
    def dx(self):
        return 2.0 * self.domain_halfwidth / self.n_points

    @property
    def x(self):
        return -self.domain_halfwidth + self.dx * np.arange(self.n_points)

    @property
    def variance(self):
        """Pointwise variance implied by the kernel, log(L/eta) + v0."""
        return float(np.log(self.correlation_length / self.cutoff) + self.v0)

    def index_of(self, pos):
        """Index of the cell containing ``pos``."""
        idx = np.floor((np.asarray(pos, dtype=float) + self.domain_halfwidth) / self.dx)
        return idx.astype(np.int64)


@dataclass
class ChaosMeasure:
    """Grid weights approximating mu_eta(dx) = Z^{-1} exp(2 gamma Gamma_eta) dx."""
    grid: FieldGrid
    gamma: float
    weights: np.ndarray
    normalization: float
    _cumulative: np.ndarray = dc_field(default=None, repr=False)

    @property
    def density(self):
        """Piecewise-constant density dmu/dx on each cell."""
        return self.weights / self.grid.dx

    @property
    def cumulative(self):
        """mu([x_0, x_i)) for i = 0..n (length n + 1)."""
        if self._cumulative is None:
            self._cumulative = np.concatenate(([0.0], np.cumsum(self.weights)))
        return self._cumulative

    def mass(self, a, b):
        """mu([a, b]) with linear proration inside the end cells (vectorized)."""
        g = self.grid
        cum = self.cumulative

        def F(pos):
            s = (np.asarray(pos, dtype=float) + g.domain_halfwidth) / g.dx
            s = np.clip(s, 0.0, g.n_points)
            i = np.minimum(np.floor(s).astype(np.int64), g.n_points - 1)
            return cum[i] + (s - i) * self.weights[i]

        return F(b) - F(a)


def embedding_eigenvalues(n_points, dx, L, eta, v0=V0):
    """Eigenvalues of the 2n-periodic circulant extension of the kernel."""
    m = 2 * n_points
    k = np.arange(m)
    lag = np.minimum(k, m - k) * dx
    row = mollified_log_kernel(lag, L, eta, v0)
    return np.fft.rfft(row).real


def sample_log_field(n_points, domain_halfwidth, L, eta, seed, v0=V0,
                     max_clip_fraction=1e-3):
    """Draw a regularized log-correlated Gaussian field on a uniform grid.

    Parameters
    ----------
    n_points : int
        Number of grid nodes, a power of two.
    domain_halfwidth : float
        The grid covers ``[-domain_halfwidth, domain_halfwidth)``.
    L : float
        Correlation length; the kernel vanishes beyond ``L``.
    eta : float
        Small-scale cutoff, at least two grid spacings.
    seed : int
        Seed of the normal deviates; same inputs give a bit-identical field.
    max_clip_fraction : float
        Clipping of negative embedding eigenvalues whose total exceeds this
        fraction of the positive spectral mass raises :class:`EmbeddingError`.

    Returns
    -------
    FieldGrid
    """
    if not _is_pow2(int(n_points)):
        raise ValueError(f"n_points must be a power of two, got {n_points}")
    n_points = int(n_points)
    dx = 2.0 * domain_halfwidth / n_points
    if not eta >= 2.0 * dx:
        raise ValueError(f"eta={eta:g} below grid resolution (need eta >= 2*dx = {2 * dx:g})")
    if L > domain_halfwidth:
        raise ValueError("correlation length must not exceed domain_halfwidth")

    lam = embedding_eigenvalues(n_points, dx, L, eta, v0)
    neg = lam < 0
    clipped = 0.0
    if neg.any():
        clipped = float(-lam[neg].sum() / lam[~neg].sum())
        if lam.min() < -_CLIP_THRESHOLD * lam.max():
            logger.warning("circulant embedding: clipping %d negative eigenvalues "
                           "(relative mass %.3e)", int(neg.sum()), clipped)
        if clipped > max_clip_fraction:
            raise EmbeddingError(f"clipped spectral mass {clipped:.3e} exceeds {max_clip_fraction:g}")
        lam = np.where(neg, 0.0, lam)

    rng = np.random.default_rng(seed)
    white = rng.standard_normal(2 * n_points)
    values = np.fft.irfft(np.sqrt(lam) * np.fft.rfft(white), n=2 * n_points)[:n_points]
    return FieldGrid(domain_halfwidth=float(domain_halfwidth), n_points=n_points,
                     correlation_length=float(L), cutoff=float(eta), values=values,
                     seed=int(seed), v0=v0, clipped_mass=clipped)


def build_chaos_measure(field, gamma):
    """Regularized GMC weights ``Z^{-1} exp(2 gamma Gamma) dx`` on each cell.

    ``Z = exp(2 gamma^2 Var)`` with ``Var`` the kernel variance at zero lag, so
    that ``E mu(dx) = dx``.
    """
    if not 0.0 <= gamma < GAMMA_MAX:
        raise ValueError(f"gamma must lie in [0, sqrt(2)/2), got {gamma}")
    dx = field.dx
    if gamma == 0.0:
        return ChaosMeasure(field, 0.0, np.full(field.n_points, dx), 1.0)
    log_z = 2.0 * gamma ** 2 * field.variance
    weights = np.exp(2.0 * gamma * field.values - log_z) * dx
    return ChaosMeasure(field, float(gamma), weights, float(np.exp(log_z)))


def coarse_average(measure, x, r):
    """Local average ``mu([x, x + r]) / r``."""
    g = measure.grid
    if r < g.dx:
        raise ValueError("window below grid resolution")
    lo, hi = -g.domain_halfwidth, g.domain_halfwidth
    if np.any(np.asarray(x) < lo) or np.any(np.asarray(x) + r > hi):
        raise ValueError("window outside the grid domain")
    return measure.mass(x, np.asarray(x) + r) / r


def window_mass_moment(measure, widths, p=2.0):
    """Mean of ``mu(I)^p`` over the disjoint windows ``I`` of each width tiling the grid.

    The chaos is stationary, so every window estimates the same moment; tiling
    uses far more of a realization than one window at the origin and tames
    the heavy tail of high moments.
    """
    g = measure.grid
    c = measure.cumulative
    out = np.empty(len(widths))
    for j, w in enumerate(widths):
        k = int(round(w / g.dx))
        if k < 1 or k > g.n_points:
            raise ValueError(f"window width {w:g} outside the grid")
        idx = np.arange(0, g.n_points - k + 1, k)
        out[j] = np.mean((c[idx + k] - c[idx]) ** p)
    return out


def remollify(values, width_cells):
    """Moving average of a grid array over ``width_cells`` cells (centered).

    Entries whose window would leave the grid are NaN.  This is how coarser
    cutoffs of the same realization are produced.
    """
    values = np.asarray(values, dtype=float)
    w = int(width_cells)
    if w <= 1:
        return values.copy()
    c = np.concatenate(([0.0], np.cumsum(values)))
    out = np.full(values.shape, np.nan)
    left = w // 2
    lo = np.arange(values.size) - left
    ok = (lo >= 0) & (lo + w <= values.size)
    out[ok] = (c[lo[ok] + w] - c[lo[ok]]) / w
    return out


# binary dump ---------------------------------------------------------------

_MAGIC = b"MFKFIELD"
_VERSION = 1
_HEADER = struct.Struct("<8sIIQddddQ")   # 64 bytes


def dump(obj, path):
    """Write a FieldGrid or ChaosMeasure as header + little-endian float64."""
    if isinstance(obj, ChaosMeasure):
        kind, grid, gamma, data = 1, obj.grid, obj.gamma, obj.weights
    else:
        kind, grid, gamma, data = 0, obj, 0.0, obj.values
    head = _HEADER.pack(_MAGIC, _VERSION, kind, grid.n_points, grid.correlation_length,
                        grid.cutoff, gamma, grid.domain_halfwidth, grid.seed & (2 ** 64 - 1))
    with open(Path(path), "wb") as fh:
        fh.write(head)
        fh.write(np.asarray(data, dtype="<f8").tobytes())


def load(path):
    """Read a dump written by :func:`dump`.

    A measure dump restores the weights only; its ``grid.values`` are NaN.
    """
    raw = Path(path).read_bytes()
    magic, version, kind, n, L, eta, gamma, half, seed = _HEADER.unpack(raw[:_HEADER.size])
    if magic != _MAGIC or version != _VERSION:
        raise ValueError("not a field dump (bad magic/version)")
    data = np.frombuffer(raw[_HEADER.size:], dtype="<f8").astype(float)
    if data.size != n:
        raise ValueError("truncated field dump")
    if kind == 0:
        return FieldGrid(half, int(n), L, eta, data, int(seed))
    grid = FieldGrid(half, int(n), L, eta, np.full(n, np.nan), int(seed))
    z = np.exp(2.0 * gamma ** 2 * grid.variance) if gamma > 0 else 1.0
    return ChaosMeasure(grid, gamma, data, float(z))
