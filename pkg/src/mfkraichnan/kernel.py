"""
Robert-Vargas kernel, regularized norms and diffusion coefficients.

The separation process of two tracers advected by the one-dimensional
Kraichnan flow is a diffusion with coefficient

    A(r) = 1/2 * int [phi(r - z) - phi(-z)]^2 nu(dz) + kappa

where ``phi`` is the Robert-Vargas kernel and ``nu`` is either Lebesgue
measure (deterministic case) or a chaos measure (quenched case).
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy import integrate

from .field import ChaosMeasure

_QUAD_EPSREL = 1e-6


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


# large-scale cutoff profiles ------------------------------------------------

def _smooth_step(t):
    # C-infinity transition from 0 (t <= 0) to 1 (t >= 1)
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def psi_plateau(x):
    """Compactly supported bump: 1 on |x| <= 1, 0 on |x| >= 2, smooth between."""
    return _smooth_step(2.0 - np.abs(np.asarray(x, dtype=float)))


def psi_tanh(x):
    """``1/2 - tanh(4|x| - 1.5)/2`` truncated to zero beyond |x| = 2."""
    ax = np.abs(np.asarray(x, dtype=float))
    return np.where(ax <= 2.0, 0.5 - 0.5 * np.tanh(4.0 * ax - 1.5), 0.0)


PSI_PROFILES: dict[str, Callable] = {"plateau": psi_plateau, "tanh": psi_tanh}


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of the regularized kernel.

    Parameters
    ----------
    xi : float
        Roughness exponent in (0, 2].
    L : float
        Correlation length.
    eta : float
        Small-scale cutoff; 0 gives the unregularized kernel.
    psi_profile : str
        Name of the large-scale cutoff, see ``PSI_PROFILES``.
    beta : float
        Exponent of the regularized norm used below ``eta``.
    """
    xi: float
    L: float = 1.0
    eta: float = 0.0
    psi_profile: str = "plateau"
    beta: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.xi <= 2.0:
            raise ValueError(f"xi must lie in (0, 2], got {self.xi}")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.psi_profile not in PSI_PROFILES:
            raise ValueError(f"unknown psi profile {self.psi_profile!r}")
        if self.eta > 0:
            _norm_constant(self.eta, self.beta)

    @property
    def psi(self):
        return PSI_PROFILES[self.psi_profile]

    @property
    def support(self):
        """Half-width of the kernel support."""
        return 2.0 * self.L


def _norm_constant(eta, beta):
    if not (eta > 0 and beta > 0):
        raise ValueError("eta and beta must be positive")
    q = eta ** (2.0 / beta - 1.0)
    if q >= 2.0:
        raise ValueError(f"eta^(2/beta-1) = {q:g} >= 2: regularized norm undefined")
    return 2.0 / (2.0 - q)


def regularized_norm(r, eta, beta):
    """Smoothed absolute value ``|r|_{eta,beta}``.

    Equal to ``|r|`` outside ``[-eta, eta]`` and to the parabola
    ``r^2/(C eta) + eta^(2/beta)/2`` inside, with ``C = 2/(2 - eta^(2/beta-1))``
    chosen so the two branches meet at ``|r| = eta``.
    """
    c = _norm_constant(eta, beta)
    r = np.abs(np.asarray(r, dtype=float))
    inner = r * r / (c * eta) + 0.5 * eta ** (2.0 / beta)
    out = np.where(r <= eta, inner, r)
    return out if out.ndim else float(out)


def rv_kernel(x, spec: KernelSpec):
    """Robert-Vargas kernel ``L^{-xi/2} psi(x/L) x / |x|_eta^{3/2 - xi/2}``.

    Odd in ``x``, identically zero for ``|x| >= 2L``.  With ``eta = 0`` the
    value at the origin is set to 0.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    expo = 1.5 - 0.5 * spec.xi
    if spec.eta > 0:
        norm = regularized_norm(x, spec.eta, spec.beta)
    else:
        norm = np.where(ax > 0, ax, 1.0)
    out = spec.L ** (-0.5 * spec.xi) * spec.psi(x / spec.L) * x / np.power(norm, expo)
    out = np.where(ax >= spec.support, 0.0, out)
    return out if out.ndim else float(out)


# deterministic coefficient ---------------------------------------------------

def _breakpoints(points, lo, hi, singular, n_geo=12):
    """Sorted breakpoints on [lo, hi] refined geometrically around singular points."""
    pts = set(p for p in points if lo <= p <= hi)
    pts.update((lo, hi))
    span = hi - lo
    for s in singular:
        for k in range(1, n_geo + 1):
            d = span * 2.0 ** (-k)
            for p in (s - d, s + d):
                if lo < p < hi:
                    pts.add(p)
    return np.array(sorted(pts))


def _piecewise_quad(func, pts, epsrel):
    total, err = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(pts[:-1], pts[1:]):
            if b <= a:
                continue
            try:
                v, e = integrate.quad(func, a, b, epsabs=0.0, epsrel=epsrel * 1e-2, limit=200)
            except integrate.IntegrationWarning as exc:
                v, e = integrate.quad(func, a, b, epsabs=0.0, epsrel=epsrel * 1e-2, limit=1000,
                                      full_output=1)[:2]
                # pieces where the integrand nearly vanishes trip roundoff
                # warnings; their error is judged against the total below
                if not np.isfinite(v):
                    raise QuadratureError(f"quadrature on [{a:g}, {b:g}] failed: {exc}") from None
            total += v
            err += e
    if err > epsrel * abs(total) and total != 0.0:
        raise QuadratureError(f"achieved relative tolerance {err / abs(total):.2e} > {epsrel:g}")
    return total


def diffusion_coefficient(r, spec: KernelSpec, kappa=0.0, epsrel=_QUAD_EPSREL):
    """Deterministic coefficient ``A_{eta,kappa}(r)`` by adaptive quadrature.

    Parameters
    ----------
    r : float
        Separation; the result is even in ``r``.
    spec : KernelSpec
    kappa : float
        Molecular diffusivity added to the integral.
    epsrel : float
        Target relative tolerance.

    Returns
    -------
    float
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    r = abs(float(r))
    if r == 0.0:
        return float(kappa)
    S = spec.support

    def f(z):
        d = rv_kernel(r - z, spec) - rv_kernel(-z, spec)
        return 0.5 * d * d

    L = spec.L
    pts = _breakpoints([0.0, r, -L, L, -S, S, r - L, r + L, r - S, r + S],
                       -S, S + r, singular=[0.0, r] if spec.eta == 0 else [])
    # geometric grading between r and L captures the far-field tail
    far = r * np.logspace(0, np.log10(max(S / r, 1.0)), 40)
    pts = np.unique(np.concatenate([pts, far[far < S], -far[far < S]]))
    return _piecewise_quad(f, pts, epsrel) + kappa


def prefactor_cd(rho, xi, psi_profile="plateau", epsrel=_QUAD_EPSREL):
    """Dimensionless prefactor ``c_d(rho) = A(rho L) / (rho L)^xi`` (eta = kappa = 0).

    Evaluated from the rescaled integral in which the kernel singularities
    sit at ``z = 0`` and ``z = -1`` independently of ``rho``.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    psi = PSI_PROFILES[psi_profile]
    expo = 1.5 - 0.5 * xi

    def g(u):
        au = abs(u)
        return u / au ** expo if au > 0 else 0.0

    def f(z):
        d = float(psi(rho + rho * z)) * g(1.0 + z) - float(psi(rho * z)) * g(z)
        return 0.5 * d * d

    R = 2.0 / rho
    lo, hi = -1.0 - R, R
    pts = _breakpoints([0.0, -1.0, 1.0 / rho, -1.0 / rho, -1.0 - 1.0 / rho, 1.0 / rho - 1.0,
                        R, -R, -1.0 - R, R - 1.0], lo, hi, singular=[0.0, -1.0])
    far = np.logspace(0, np.log10(R), 40)
    pts = np.unique(np.concatenate([pts, far[far < hi], -1.0 - far[-1.0 - far > lo]]))
    return _piecewise_quad(f, pts, epsrel)


# quenched coefficient -----------------------------------------------------------

def _cell_midpoints(measure: ChaosMeasure):
    g = measure.grid
    return g.x + 0.5 * g.dx


def quenched_diffusion_coefficient(r, spec: KernelSpec, measure: ChaosMeasure, kappa=0.0):
    """Chaos-integral coefficient ``A^(gamma)(r)`` by a midpoint sum on the measure grid."""
    g = measure.grid
    r = float(r)
    lo, hi = min(-spec.support, r - spec.support), max(spec.support, r + spec.support)
    if lo < -g.domain_halfwidth or hi > g.domain_halfwidth:
        raise ValueError("measure grid does not cover the kernel support")
    z = _cell_midpoints(measure)
    sel = (z > lo) & (z < hi)
    d = rv_kernel(r - z[sel], spec) - rv_kernel(-z[sel], spec)
    return 0.5 * float(np.dot(measure.weights[sel], d * d)) + kappa


def _next_fast(n):
    return int(2 ** np.ceil(np.log2(n)))


def quenched_profile_fft(spec: KernelSpec, measure: ChaosMeasure, max_separation, kappa=0.0):
    """``A^(gamma)`` at every grid separation ``k dx`` up to ``max_separation``.

    All lags are obtained at once from two FFT cross-correlations, which is
    exact for the midpoint rule used by :func:`quenched_diffusion_coefficient`.
    Returns ``(r, A)`` with ``r[0] = 0``.
    """
    g = measure.grid
    n, dx = g.n_points, g.dx
    if g.domain_halfwidth < spec.support + max_separation:
        raise ValueError("measure grid must cover [-2L, 2L + max_separation]")
    kmax = int(np.floor(max_separation / dx))
    # p[j] = phi((c - j) dx), c = n/2 - 1/2, so phi(k dx - z_i) = p[i - k]
    c = n / 2 - 0.5
    p = rv_kernel((c - np.arange(n)) * dx, spec)
    w = measure.weights
    m = _next_fast(2 * n)
    fw_p2 = np.fft.rfft(w, m)
    fw_wp = np.fft.rfft(w * p, m)
    fp = np.fft.rfft(p, m)
    fp2 = np.fft.rfft(p * p, m)
    # corr[k] = sum_i a_i b_{i-k}
    s1 = np.fft.irfft(fw_p2 * np.conj(fp2), m)[:kmax + 1]
    s2 = np.fft.irfft(fw_wp * np.conj(fp), m)[:kmax + 1]
    s0 = float(np.dot(w, p * p))
    A = 0.5 * (s1 - 2.0 * s2 + s0)
    A = np.maximum(A, 0.0) + kappa
    A[0] = kappa
    return np.arange(kmax + 1) * dx, A


# tabulated profiles ----------------------------------------------------------------

@dataclass
class DiffusionProfile:
    """Tabulated diffusion coefficient, evaluable at any separation.

    Between nodes ``A - kappa`` is interpolated linearly in log-log
    coordinates.  Below the first node a power law through the first two
    nodes is used; beyond the last node the last value is held.  The
    profile is even in ``r``.
    """
    kind: str
    kappa: float
    params: KernelSpec
    r: np.ndarray
    values: np.ndarray
    gamma: float = 0.0
    measure: ChaosMeasure | None = dc_field(default=None, repr=False)
    seed: int | None = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in ("deterministic", "quenched"):
            raise ValueError("kind must be 'deterministic' or 'quenched'")
        if self.r.size < 2 or np.any(np.diff(self.r) <= 0) or self.r[0] <= 0:
            raise ValueError("table nodes must be positive and increasing")
        excess = self.values - self.kappa
        if np.any(excess <= 0):
            raise ValueError("tabulated A - kappa must be positive")
        self._lr = np.log(self.r)
        self._lv = np.log(excess)
        self._slope0 = (self._lv[1] - self._lv[0]) / (self._lr[1] - self._lr[0])

    def __call__(self, r):
        ar = np.abs(np.asarray(r, dtype=float))
        out = np.full(ar.shape, self.values[-1])
        pos = ar > 0
        lr = np.log(np.where(pos, ar, 1.0))
        lv = np.interp(lr, self._lr, self._lv)
        below = lr < self._lr[0]
        lv = np.where(below, self._lv[0] + self._slope0 * (lr - self._lr[0]), lv)
        inside = pos & (ar <= self.r[-1])
        out = np.where(inside, np.exp(lv) + self.kappa, out)
        out = np.where(pos, out, self.kappa)
        return out if out.ndim else float(out)

    def to_csv(self, path):
        """Write columns r, A_r, kind, xi, gamma, eta, kappa, seed."""
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["r", "A_r", "kind", "xi", "gamma", "eta", "kappa", "seed"])
            seed = "" if self.seed is None else self.seed
            for r, a in zip(self.r, self.values):
                wr.writerow([repr(float(r)), repr(float(a)), self.kind, self.params.xi,
                             self.gamma, self.params.eta, self.kappa, seed])


def deterministic_profile(spec: KernelSpec, kappa=0.0, r_min=None, r_max=None,
                          per_decade=256, epsrel=_QUAD_EPSREL):
    """Tabulate :func:`diffusion_coefficient` on log-spaced separations.

    The default range is ``[max(eta, 1e-6 L), 2L]``.
    """
    r_min = r_min if r_min is not None else max(spec.eta, 1e-6 * spec.L)
    r_max = r_max if r_max is not None else 2.0 * spec.L
    n = max(2, int(np.ceil(per_decade * np.log10(r_max / r_min))) + 1)
    r = np.logspace(np.log10(r_min), np.log10(r_max), n)
    vals = np.array([diffusion_coefficient(x, spec, kappa, epsrel) for x in r])
    return DiffusionProfile("deterministic", kappa, spec, r, vals)


def power_profile(xi, prefactor=0.5, offset=0.0, kappa=0.0, r_min=1e-8, r_max=4.0,
                  per_decade=64):
    """Profile of the closed form ``prefactor * (|r| + offset)^xi + kappa``.

    Handy for test problems such as ``A(r) = r^xi / 2``.
    """
    n = int(np.ceil(per_decade * np.log10(r_max / r_min))) + 1
    r = np.logspace(np.log10(r_min), np.log10(r_max), n)
    vals = prefactor * (r + offset) ** xi + kappa
    spec = KernelSpec(xi=min(max(xi, 1e-12), 2.0))
    return DiffusionProfile("deterministic", kappa, spec, r, vals)


def quenched_profile(spec: KernelSpec, measure: ChaosMeasure, kappa=0.0, r_min=None,
                     r_max=None, per_decade=256):
    """Tabulate the chaos-integral coefficient at log-spaced grid separations.

    Values come from :func:`quenched_profile_fft`; nodes are snapped to grid
    separations and deduplicated.
    """
    g = measure.grid
    r_min = r_min if r_min is not None else max(spec.eta, 10 * g.dx)
    r_max = r_max if r_max is not None else g.domain_halfwidth - spec.support
    rs, A = quenched_profile_fft(spec, measure, r_max, kappa)
    n = max(2, int(np.ceil(per_decade * np.log10(r_max / r_min))) + 1)
    k = np.unique(np.round(np.logspace(np.log10(r_min), np.log10(r_max), n) / g.dx).astype(int))
    k = k[(k >= 1) & (k < rs.size)]
    return DiffusionProfile("quenched", kappa, spec, rs[k], A[k], gamma=measure.gamma,
                            measure=measure, seed=g.seed)
