"""
Brownian paths, local times, clock processes and time-changed diffusions.

Path ensembles are generated by numba kernels that reseed the generator per
path from a 32-bit seed, so a path depends only on its own seed and
ensembles are identical whatever the order or partition of the work.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field as dc_field

import numba as nb
import numpy as np
from scipy import integrate

logger = logging.getLogger(__name__)

_A_FLOOR = 1e-30


@dataclass
class PathRecord:
    """Sampled trajectory with optional companion clock.

    ``meta`` carries ``seed``, ``dt``, ``scheme`` and ``reflected``;
    time-changed paths also report ``truncated`` and ``absorbed``.
    """
    times: np.ndarray
    values: np.ndarray
    clock: np.ndarray | None = None
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite path values")
        if self.clock is not None:
            self.clock = np.asarray(self.clock, dtype=float)
            if np.any(np.diff(self.clock) < 0):
                raise ValueError("clock must be nondecreasing")
        if self.meta.get("reflected") and np.any(self.values < 0):
            raise ValueError("reflected path with negative values")

    @property
    def dt(self):
        return self.meta.get("dt", float(self.times[1] - self.times[0]))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "value", "clock"])
            c = self.clock if self.clock is not None else [""] * self.times.size
            for t, v, k in zip(self.times, self.values, c):
                wr.writerow([repr(float(t)), repr(float(v)), k if k == "" else repr(float(k))])


@dataclass
class LocalTimeField:
    """Occupation-density estimate ``ell(y, t)`` on a grid of levels and checkpoints."""
    y_grid: np.ndarray
    t_checkpoints: np.ndarray
    ell: np.ndarray
    bandwidth: float

    def total_time(self):
        """``sum_y ell(y, t) dy`` per checkpoint (occupation identity)."""
        dy = np.diff(self.y_grid).mean() if self.y_grid.size > 1 else 2 * self.bandwidth
        return self.ell.sum(axis=0) * dy


# seeds ---------------------------------------------------------------------------------

def path_seeds(seed, n):
    """``n`` 32-bit per-path seeds derived from ``seed`` via SeedSequence."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.generate_state(n, dtype=np.uint32).astype(np.int64)


# profile packing for compiled kernels ------------------------------------------------------

def pack_profile(profile):
    """Flatten a DiffusionProfile into arrays usable inside compiled kernels."""
    return (np.ascontiguousarray(profile._lr), np.ascontiguousarray(profile._lv),
            float(profile._slope0), float(profile.kappa), float(profile.values[-1]),
            float(profile.r[-1]))


@nb.njit(cache=True)
def _coef(x, lr, lv, slope0, kappa, vlast, rmax):
    ax = abs(x)
    if ax == 0.0:
        return kappa
    if ax > rmax:
        return vlast
    l = math.log(ax)
    if l <= lr[0]:
        v = lv[0] + slope0 * (l - lr[0])
    else:
        k = np.searchsorted(lr, l)
        if k >= lr.size:
            k = lr.size - 1
        w = (l - lr[k - 1]) / (lr[k] - lr[k - 1])
        v = lv[k - 1] + w * (lv[k] - lv[k - 1])
    return math.exp(v) + kappa


_CHUNK = 1 << 16


def normal_stream(seed, chunk=_CHUNK):
    """Endless blocks of standard normals from the per-path generator.

    Blocks start small and double up to ``chunk``; the concatenated stream
    does not depend on the block sizes.
    """
    rng = np.random.default_rng(int(seed))
    size = 1024
    while True:
        yield rng.standard_normal(size)
        size = min(2 * size, chunk)


@nb.njit(cache=True)
def _seed_uniforms(seed):
    np.random.seed(seed)


@nb.njit(cache=True)
def _bm_fill(out, z, k0, b, sq, reflected):
    for k in range(z.size):
        if k0 + k + 1 >= out.size:
            break
        b += sq * z[k]
        out[k0 + k + 1] = abs(b) if reflected else b
    return b


# Brownian motion and local time ----------------------------------------------------------

def sample_brownian(T, dt, seed, reflected=False, start=0.0):
    """Brownian path on ``[0, T]`` with step ``dt``.

    Reflected paths are the absolute value of the free path started at
    ``start``.  Increments are drawn from the same per-path stream as the
    compiled ensembles, so a path and its ensemble counterpart coincide.
    """
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    n = int(round(T / dt))
    vals = np.empty(n + 1)
    b = float(start)
    vals[0] = abs(b) if reflected else b
    sq = math.sqrt(dt)
    k0 = 0
    for z in normal_stream(seed):
        b = _bm_fill(vals, z, k0, b, sq, bool(reflected))
        k0 += z.size
        if k0 >= n:
            break
    return PathRecord(np.arange(n + 1) * dt, vals, None,
                      {"seed": int(seed), "dt": float(dt), "scheme": "exact-gaussian",
                       "reflected": bool(reflected)})


@nb.njit(cache=True)
def _occupation(values, dt, y0, dy, ny, eps, checkpoints_idx):
    # exact time spent by the piecewise-linear path in (y - eps, y + eps)
    nt = checkpoints_idx.size
    out = np.zeros((ny, nt))
    acc = np.zeros(ny)
    c = 0
    n = values.size - 1
    for k in range(n):
        while c < nt and checkpoints_idx[c] <= k:
            out[:, c] = acc
            c += 1
        a = values[k]
        b = values[k + 1]
        lo = min(a, b)
        hi = max(a, b)
        j0 = int(math.floor((lo - eps - y0) / dy))
        j1 = int(math.ceil((hi + eps - y0) / dy))
        if j0 < 0:
            j0 = 0
        if j1 > ny - 1:
            j1 = ny - 1
        for j in range(j0, j1 + 1):
            y = y0 + j * dy
            bl = y - eps
            bh = y + eps
            if hi - lo < 1e-300:
                if bl < a < bh:
                    acc[j] += dt
                continue
            ol = max(lo, bl)
            oh = min(hi, bh)
            if oh > ol:
                acc[j] += dt * (oh - ol) / (hi - lo)
    while c < nt:
        out[:, c] = acc
        c += 1
    return out / (2.0 * eps)


def local_time(path: PathRecord, y_grid, bandwidth, t_checkpoints=None):
    """Occupation-binning local time ``ell(y, t)``.

    Each linear segment of the path contributes the exact fraction of its
    duration spent in ``(y - bandwidth, y + bandwidth)``.  ``y_grid`` must be
    uniform.  With ``bandwidth = dy / 2`` the bands tile the line and the
    occupation identity holds to rounding.
    """
    y = np.asarray(y_grid, dtype=float)
    if y.size > 1 and not np.allclose(np.diff(y), y[1] - y[0], rtol=1e-9, atol=0):
        raise ValueError("y_grid must be uniform")
    dt = path.dt
    if bandwidth < 2 * math.sqrt(dt):
        logger.warning("bandwidth %.3g under-resolved against sqrt(dt) = %.3g", bandwidth, math.sqrt(dt))
    tc = np.atleast_1d(np.asarray(t_checkpoints if t_checkpoints is not None else [path.times[-1]],
                                  dtype=float))
    idx = np.searchsorted(path.times, tc - 1e-12 * dt, side="left").astype(np.int64)
    dy = y[1] - y[0] if y.size > 1 else 1.0
    ell = _occupation(path.values, dt, y[0], dy, y.size, float(bandwidth), idx)
    return LocalTimeField(y, tc, ell, float(bandwidth))


# clocks and time change -------------------------------------------------------------

def clock_process(path: PathRecord, profile, M0=0.0, h_floor=None):
    """Trapezoidal clock ``C(t) = int_0^t ds / (2 A(B_s))``.

    Parameters
    ----------
    path : PathRecord
    profile : callable
        Diffusion coefficient, evaluated vectorized on positions.
    M0 : float
        Extra clock per unit local time at 0 (``inf`` absorbs on contact).
    h_floor : float, optional
        Width of the contact zone around 0, default ``2 sqrt(dt)``.

    Returns
    -------
    numpy.ndarray
    """
    dt = path.dt
    A = np.asarray(profile(path.values), dtype=float)
    if np.any(A < 0):
        raise AssertionError("negative diffusion coefficient")
    kappa = getattr(profile, "kappa", 0.0)
    A = np.maximum(A, kappa + _A_FLOOR)
    rate = 0.5 / A
    if M0:
        h = 2 * math.sqrt(dt) if h_floor is None else h_floor
        near = np.abs(path.values) < h
        with np.errstate(invalid="ignore"):
            rate = rate + np.where(near, M0 / (2 * h), 0.0)
    inc = 0.5 * (rate[1:] + rate[:-1]) * np.diff(path.times)
    return np.concatenate(([0.0], np.cumsum(inc)))


def generalized_inverse(clock, s, t):
    """Right-continuous inverse ``inf{s : C(s) > t}`` of a piecewise-linear clock.

    Returns NaN where ``t`` is not exceeded by the clock.
    """
    clock = np.asarray(clock, dtype=float)
    t = np.asarray(t, dtype=float)
    k = np.searchsorted(clock, t, side="right")
    out = np.full(t.shape, np.nan)
    ok = k < clock.size
    k = k[ok]
    km = np.maximum(k - 1, 0)
    c0, c1 = clock[km], clock[k]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(c1 > c0, (t[ok] - c0) / (c1 - c0), 0.0)
    frac = np.where(k == 0, 0.0, frac)
    out[ok] = s[km] + np.clip(frac, 0.0, 1.0) * (s[k] - s[km])
    return out


def time_change(path: PathRecord, clock, horizon, dt_out=None, h_floor=None, C_max=None):
    """Time-changed path ``R(t) = B(tau(t))`` on a uniform grid up to ``horizon``.

    ``tau`` is the right-continuous generalized inverse of ``clock``;
    positions are interpolated linearly between path steps.  A clock that
    stops short of ``horizon`` yields a truncated record (``meta['truncated']``).
    A clock that exceeds ``C_max`` (default ``1e6 * horizon``), or becomes
    infinite, while the path sits within ``h_floor`` of 0 marks the
    trajectory absorbed; it then stays at its contact position.
    """
    clock = np.asarray(clock, dtype=float)
    dt = path.dt
    dt_out = dt if dt_out is None else dt_out
    h = 2 * math.sqrt(dt) if h_floor is None else h_floor
    cmax = 1e6 * horizon if C_max is None else C_max
    n_out = int(round(horizon / dt_out))
    t = np.arange(n_out + 1) * dt_out
    absorbed, t_abs, x_abs = False, np.inf, None
    blow = np.nonzero(~np.isfinite(clock) | (clock > cmax))[0]
    if blow.size:
        k = blow[0]
        if abs(path.values[k]) < h or abs(path.values[max(k - 1, 0)]) < h:
            absorbed = True
            t_abs = clock[k - 1] if k > 0 else 0.0
            x_abs = path.values[k - 1] if k > 0 else path.values[0]
        clock = clock[:k]
        pvals, ptimes = path.values[:k], path.times[:k]
    else:
        pvals, ptimes = path.values, path.times
    tau = generalized_inverse(clock, ptimes, t)
    truncated = bool(np.isnan(tau).any()) and not absorbed
    keep = ~np.isnan(tau)
    if absorbed:
        keep = keep | (t >= t_abs)
    vals = np.interp(np.where(np.isnan(tau), 0.0, tau), ptimes, pvals)
    if absorbed:
        vals = np.where(t >= t_abs, x_abs, vals)
        tau = np.where(t >= t_abs, ptimes[-1] if ptimes.size else 0.0, tau)
    meta = dict(path.meta)
    meta.update({"scheme": "time-change", "dt": float(dt_out), "truncated": truncated,
                 "absorbed": absorbed, "h_floor": h})
    return PathRecord(t[keep], vals[keep], tau[keep], meta)


# compiled ensembles --------------------------------------------------------------------

@nb.njit(cache=True)
def _tc_chunk(st, z, sq, dt, reflected, h_floor, M0, C_max, horizon,
              lr, lv, slope0, kappa, vlast, rmax):
    # st = [b, x, f0, c, s, final, tau]; returns -1 running, 0 done, 1 absorbed
    b, x, f0, c, s = st[0], st[1], st[2], st[3], st[4]
    inv2h = 1.0 / (2.0 * h_floor)
    for k in range(z.size):
        b += sq * z[k]
        x1 = abs(b) if reflected else b
        a = _coef(x1, lr, lv, slope0, kappa, vlast, rmax)
        if a < kappa + 1e-30:
            a = kappa + 1e-30
        f1 = 0.5 / a
        if M0 > 0 and abs(x1) < h_floor:
            f1 += M0 * inv2h
        c1 = c + 0.5 * (f0 + f1) * dt
        if not (c1 <= C_max) and (abs(x) < h_floor or abs(x1) < h_floor):
            st[5] = x
            st[6] = s
            return 1
        if c1 > horizon:
            w = (horizon - c) / (c1 - c)
            st[5] = x + w * (x1 - x)
            st[6] = s + w * dt
            return 0
        c = c1
        s += dt
        x = x1
        f0 = f1
    st[0], st[1], st[2], st[3], st[4] = b, x, f0, c, s
    st[5] = x
    st[6] = s
    return -1


def time_changed_ensemble(profile, start, horizon, dt, seeds, reflected=False, M0=0.0,
                          h_floor=None, C_max=None, max_steps=None):
    """Values ``R(horizon)`` of independent time-changed Brownian paths.

    Equivalent, path by path, to :func:`sample_brownian` followed by
    :func:`clock_process` and :func:`time_change`, but without storing paths.

    Returns
    -------
    final : ndarray
    tau : ndarray
        Brownian time at which the clock reached ``horizon``.
    status : ndarray of int
        0 reached the horizon, 1 absorbed at 0, 2 ran out of steps.
    """
    h = 2 * math.sqrt(dt) if h_floor is None else h_floor
    cmax = 1e6 * horizon if C_max is None else C_max
    max_steps = int(max_steps if max_steps is not None else 1000 * horizon / dt)
    m0 = float(M0)
    pk = pack_profile(profile)
    sq = math.sqrt(dt)
    seeds = np.asarray(seeds, dtype=np.int64)
    final = np.empty(seeds.size)
    tau = np.empty(seeds.size)
    status = np.full(seeds.size, 2, dtype=np.int64)
    for i, sd in enumerate(seeds):
        x = abs(start) if reflected else float(start)
        a = max(float(profile(x)), profile.kappa + _A_FLOOR)
        f0 = 0.5 / a + (m0 / (2 * h) if m0 > 0 and abs(x) < h else 0.0)
        st = np.array([float(start), x, f0, 0.0, 0.0, x, 0.0])
        used = 0
        for z in normal_stream(sd):
            if used + z.size > max_steps:
                z = z[:max_steps - used]
            code = _tc_chunk(st, z, sq, dt, bool(reflected), h, m0, cmax, float(horizon), *pk)
            used += z.size
            if code >= 0:
                status[i] = code
                break
            if used >= max_steps:
                break
        final[i], tau[i] = st[5], st[6]
    return final, tau, status


@nb.njit(cache=True)
def _euler_chunk(st, z, sq, rec, every, lr, lv, slope0, kappa, vlast, rmax):
    # st = [r, min|r|, step]; returns step index of blow-up or -1
    r, m, k = st[0], st[1], int(st[2])
    for j in range(z.size):
        a = _coef(r, lr, lv, slope0, kappa, vlast, rmax)
        r += math.sqrt(2.0 * a) * sq * z[j]
        k += 1
        if not math.isfinite(r):
            return k
        if abs(r) < m:
            m = abs(r)
        if k % every == 0:
            rec[k // every] = r
    st[0], st[1], st[2] = r, m, k
    return -1


def euler_ensemble(profile, start, T, dt, seeds, record_every=None):
    """Euler-Maruyama ensemble of ``dR = sqrt(2 A(R)) dW``.

    Returns ``(times, records, min_abs)``; ``records`` holds one row per
    path sampled every ``record_every`` steps (default: start and end only).
    """
    nsteps = int(round(T / dt))
    every = nsteps if record_every is None else int(record_every)
    nrec = nsteps // every
    nsteps = nrec * every
    pk = pack_profile(profile)
    seeds = np.asarray(seeds, dtype=np.int64)
    rec = np.empty((seeds.size, nrec + 1))
    mins = np.empty(seeds.size)
    sq = math.sqrt(dt)
    for i, sd in enumerate(seeds):
        st = np.array([float(start), abs(start), 0.0])
        rec[i, 0] = start
        used = 0
        for z in normal_stream(sd):
            z = z[:nsteps - used]
            bad = _euler_chunk(st, z, sq, rec[i], every, *pk)
            if bad >= 0:
                raise FloatingPointError(f"Euler blow-up in path {i} at step {bad}")
            used += z.size
            if used >= nsteps:
                break
        mins[i] = st[1]
    times = np.arange(nrec + 1) * every * dt
    return times, rec, mins


def euler_sde(profile, start, T, dt, seed):
    """Single Euler-Maruyama path of the driftless diffusion with coefficient ``2A``."""
    a = np.asarray(profile(np.linspace(-abs(start) - 1, abs(start) + 1, 257)))
    grad = np.abs(np.gradient(a, 2 * (abs(start) + 1) / 256))
    if dt * np.max(grad / np.maximum(a, 1e-300)) > 0.1:
        logger.warning("dt=%.3g may not resolve the coefficient variation", dt)
    times, rec, _ = euler_ensemble(profile, start, T, dt, [seed], record_every=1)
    return PathRecord(times, rec[0], None, {"seed": int(seed), "dt": float(dt),
                                            "scheme": "euler-maruyama", "reflected": False})


# Bessel mapping -------------------------------------------------------------------

def bessel_parameters(xi):
    """Bessel parameter ``a = xi/(2 xi - 4)`` and effective dimension ``(2 - 2 xi)/(2 - xi)``."""
    if xi >= 2:
        raise ValueError("mapping degenerate at xi = 2")
    return xi / (2 * xi - 4), (2 - 2 * xi) / (2 - xi)


def bessel_map(path: PathRecord, xi):
    """Map ``R`` to ``X = R^{1 - xi/2} / (1 - xi/2)``, up to the first hit of 0.

    For ``A(r) = r^xi / 2`` the image solves ``dX = dW + a/X dt``.

    Returns
    -------
    (PathRecord, a, d_e)
    """
    if not 0 < xi < 2:
        raise ValueError("mapping requires 0 < xi < 2")
    a, de = bessel_parameters(xi)
    v = path.values
    hit = np.nonzero(v <= 0)[0]
    end = hit[0] if hit.size else v.size
    q = 1 - 0.5 * xi
    X = np.power(v[:end], q) / q
    meta = dict(path.meta, scheme="bessel-map")
    return PathRecord(path.times[:end], X, None, meta), a, de


def bessel_drift_fit(X, dt, x_min=0.0):
    """Least-squares ``a`` in ``E[dX | X] = a/X dt`` over rows of paths ``X``.

    Each path contributes its steps up to and including the one on which it
    first drops to ``x_min`` (a stopping time, so the estimate stays
    unbiased).  NaN entries mark the end of a shorter path.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    num = 0.0
    den = 0.0
    for row in X:
        row = row[:np.argmax(np.isnan(row))] if np.isnan(row).any() else row
        bad = np.nonzero(~(row > x_min))[0]
        end = bad[0] if bad.size else row.size - 1
        x0 = row[:end]
        dx = np.diff(row[:end + 1])
        num += np.sum(dx / x0)
        den += dt * np.sum(1.0 / x0 ** 2)
    return num / den


# escape times -----------------------------------------------------------------------

def green_function(r, z, r1, r2):
    """Green function ``2 (min - r1)(r2 - max) / (r2 - r1)`` of ``d^2/dr^2 / 2`` on ``(r1, r2)``."""
    lo = np.minimum(r, z)
    hi = np.maximum(r, z)
    return 2.0 * (lo - r1) * (r2 - hi) / (r2 - r1)


def escape_time_quadrature(density, r, r1, r2, epsrel=1e-10):
    """``int G(r, z) m(z) dz`` over ``(r1, r2)``, split at ``r``."""
    if not r1 < r < r2:
        raise ValueError("start must lie strictly inside the interval")

    def f(z):
        return green_function(r, z, r1, r2) * float(density(z))

    total = 0.0
    for a, b in ((r1, r), (r, r2)):
        v, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=500)
        if not np.isfinite(v):
            raise ValueError("speed density not integrable on the interval")
        total += v
    return total


@nb.njit(cache=True)
def _escape_chunk(st, z, dt, r1, r2, lr, lv, slope0, kappa, vlast, rmax):
    # st = [r, t]; returns 0 running, -1 / +1 exit side
    r, t = st[0], st[1]
    for k in range(z.size):
        a = _coef(r, lr, lv, slope0, kappa, vlast, rmax)
        var = 2.0 * a * dt
        rn = r + math.sqrt(var) * z[k]
        t += dt
        side = 0
        if rn <= r1:
            side = -1
        elif rn >= r2:
            side = 1
        else:
            # Brownian-bridge probability of an unseen crossing during the step
            e1 = 2.0 * (r - r1) * (rn - r1) / var
            e2 = 2.0 * (r2 - r) * (r2 - rn) / var
            if e1 < 40.0 or e2 < 40.0:
                p1 = math.exp(-e1)
                p2 = math.exp(-e2)
                u = np.random.random()
                if u < p1:
                    side = -1
                elif u < p1 + p2:
                    side = 1
        if side != 0:
            st[0], st[1] = rn, t
            return side
        r = rn
    st[0], st[1] = r, t
    return 0


def _escape_paths(profile, seeds, start, r1, r2, dt, max_steps):
    pk = pack_profile(profile)
    times = np.empty(len(seeds))
    side = np.zeros(len(seeds), dtype=np.int64)
    for i, sd in enumerate(seeds):
        _seed_uniforms(int(sd) ^ 0x5BD1E995)
        st = np.array([float(start), 0.0])
        used = 0
        for z in normal_stream(sd):
            code = _escape_chunk(st, z, dt, r1, r2, *pk)
            used += z.size
            if code != 0 or used >= max_steps:
                side[i] = code
                break
        times[i] = st[1]
    return times, side


def escape_time_check(interval, start, n_paths=10_000, dt=1e-6, seed=0, profile=None,
                      density=None, max_steps=None):
    """Monte Carlo mean exit time against the Green-function quadrature.

    Parameters
    ----------
    interval : (float, float)
    start : float
    profile : DiffusionProfile, optional
        Simulated diffusion; its speed density ``1/(2A)`` is used for the
        quadrature unless ``density`` is given.
    density : callable, optional
        Speed density; required when ``profile`` is None (quadrature only).

    Returns
    -------
    dict with keys ``mc_mean``, ``mc_se``, ``quadrature``, ``exit_times``, ``exit_side``.
    """
    r1, r2 = interval
    if density is None:
        if profile is None:
            raise ValueError("need a profile or a speed density")
        def density(z):
            return 0.5 / profile(z)
    quad = escape_time_quadrature(density, start, r1, r2)
    out = {"quadrature": quad, "mc_mean": np.nan, "mc_se": np.nan}
    if profile is not None and n_paths:
        ms = int(max_steps if max_steps is not None else 200 * quad / dt + 1000)
        t, side = _escape_paths(profile, path_seeds(seed, n_paths), float(start), float(r1),
                                float(r2), float(dt), ms)
        if np.any(side == 0):
            logger.warning("%d paths did not exit within the step budget", int((side == 0).sum()))
        out.update(mc_mean=float(t.mean()), mc_se=float(t.std(ddof=1) / math.sqrt(t.size)),
                   exit_times=t, exit_side=side)
    return out


def write_exit_csv(path, seeds, times, side, absorbed=None):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["seed", "exit_time", "exit_side", "absorbed_flag"])
        ab = absorbed if absorbed is not None else np.zeros(len(times), dtype=bool)
        for s, t, d, a in zip(seeds, times, side, ab):
            wr.writerow([int(s), repr(float(t)), int(d), int(bool(a))])
