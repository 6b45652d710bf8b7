"""
Scale-free passage sampler for time-changed Brownian motion near a boundary.

A Brownian path in natural scale moving between dyadic levels
``h_j = L 2^-j`` is a sequence of passages: from ``h_j`` it leaves
``(h_j/2, 2 h_j)`` through the top with probability 1/3.  Rescaled to unit
size every passage has the same law, so a library of unit passages with
their occupation times per sub-bin gives the clock of any passage as

    h_j^2 * sum_b occupation[b] * mbar_j[b]

where ``mbar_j`` is the speed density averaged over the rescaled bins.  This
reaches depths (``2^-120``) that no grid can resolve.  Climbs from a floor
are handled through the Ray-Knight description of Brownian local time,
which avoids the exponentially many passages such a climb takes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np

from .paths import normal_stream, _seed_uniforms

#: sub-bins per half-block ``[h/2, h]``
N_HALF = 8
#: bin edges of a unit passage window ``[1/2, 2]`` (log-spaced)
U_EDGES = 2.0 ** (np.arange(2 * N_HALF + 1) / N_HALF - 1.0)


@dataclass(frozen=True)
class PassageLibrary:
    """Unit-scale passages: occupation per bin and exit direction."""
    occupation: np.ndarray   # (n, 2 * N_HALF)
    up: np.ndarray           # (n,) bool, left through the top
    kind: str
    dt: float


@nb.njit(cache=True)
def _passage_chunk(st, z, sq, kind, occ, edges_log, nbins):
    # st = [x, t]; kind 0 interior (exit 1/2 or 2), 1 top (reflect at 1, exit 1/2)
    x = st[0]
    dt = sq * sq
    lo = 0.5
    hi = 2.0
    inv = nbins / (edges_log[-1] - edges_log[0])
    for k in range(z.size):
        b = int((math.log(x) - edges_log[0]) * inv)
        if b < 0:
            b = 0
        if b >= nbins:
            b = nbins - 1
        occ[b] += dt
        xn = x + sq * z[k]
        if kind == 1 and xn > 1.0:
            xn = 2.0 - xn
        if xn <= lo:
            st[0] = xn
            return -1
        if kind == 0 and xn >= hi:
            st[0] = xn
            return 1
        var = dt
        e1 = 2.0 * (x - lo) * (xn - lo) / var
        if e1 < 40.0 and np.random.random() < math.exp(-e1):
            st[0] = lo
            return -1
        if kind == 0:
            e2 = 2.0 * (hi - x) * (hi - xn) / var
            if e2 < 40.0 and np.random.random() < math.exp(-e2):
                st[0] = hi
                return 1
        x = xn
    st[0] = x
    return 0


def simulate_passages(n, kind="interior", dt=1e-4, seed=0):
    """Library of ``n`` unit passages started at 1.

    ``interior`` exits ``(1/2, 2)``; ``top`` reflects at 1 and exits at 1/2.
    """
    code = {"interior": 0, "top": 1}[kind]
    ss = np.random.SeedSequence([seed, code])
    seeds = ss.generate_state(n, dtype=np.uint32).astype(np.int64)
    nb_ = U_EDGES.size - 1
    occ = np.zeros((n, nb_))
    up = np.zeros(n, dtype=bool)
    sq = math.sqrt(dt)
    el = np.log(U_EDGES)
    for i, sd in enumerate(seeds):
        _seed_uniforms(int(sd) ^ 0x2545F491)
        st = np.array([1.0, 0.0])
        for z in normal_stream(sd, chunk=1 << 14):
            r = _passage_chunk(st, z, sq, code, occ[i], el, nb_)
            if r != 0:
                up[i] = r > 0
                break
    return PassageLibrary(occ, up, kind, dt)


@lru_cache(maxsize=4)
def default_libraries(n_interior=4000, n_top=2000, dt=1e-4, seed=20240607):
    """Cached interior and top passage libraries."""
    return (simulate_passages(n_interior, "interior", dt, seed),
            simulate_passages(n_top, "top", dt, seed))


# level chains -----------------------------------------------------------------------

@dataclass
class LevelChain:
    """Speed density averaged over log bins of the half-blocks ``[h_j/2, h_j]``.

    ``half[j, b]`` is the mean density on bin ``b`` of ``[h_j/2, h_j]`` with
    ``h_j = L 2^-j``; ``j = 0`` is the top block adjacent to the reflecting
    outer boundary ``L``.
    """
    L: float
    half: np.ndarray

    @property
    def depth(self):
        return self.half.shape[0] - 1

    def heights(self):
        return self.L * 2.0 ** -np.arange(self.half.shape[0])

    def window_density(self, j):
        """Bins of ``[h_j/2, 2 h_j]`` for an interior passage from level ``j``."""
        return np.concatenate([self.half[j], self.half[j - 1]])

    def passage_clocks(self, libs):
        """Clock of every library passage at every level.

        Returns ``(K_interior, K_top)`` with shapes ``(n, depth + 1)`` and ``(n_top,)``.
        """
        lib_i, lib_t = libs
        h = self.heights()
        win = np.zeros((self.half.shape[0], 2 * N_HALF))
        win[1:, :N_HALF] = self.half[1:]
        win[1:, N_HALF:] = self.half[:-1]
        K = (lib_i.occupation @ win.T) * h[None, :] ** 2
        K_top = (lib_t.occupation[:, :N_HALF] @ self.half[0]) * h[0] ** 2
        return np.ascontiguousarray(K), np.ascontiguousarray(K_top)


def half_block_edges(L, depth):
    """Physical bin edges of every half-block, shape ``(depth + 1, N_HALF + 1)``."""
    h = L * 2.0 ** -np.arange(depth + 1)
    return h[:, None] * U_EDGES[None, :N_HALF + 1]


def build_chain(mass, L, depth, resolved, log_factor=None, period=4, seed=0):
    """Level chain from a bin-mass function, continued below the resolved levels.

    Parameters
    ----------
    mass : callable
        ``mass(a, b)`` returns the speed measure of ``[a, b]`` (vectorized).
    resolved : int
        Deepest level whose bins are computed from ``mass``.
    log_factor : callable, optional
        ``log_factor(rng, n)`` draws ``n`` per-level log multipliers of the
        density when moving one level down.  Required when
        ``resolved < depth``.
    period : int
        Deeper half-blocks reuse the bin shapes of the last ``period``
        resolved ones, rescaled by the accumulated multipliers.
    """
    edges = half_block_edges(L, depth)
    half = np.empty((depth + 1, N_HALF))
    top = min(resolved, depth)
    for j in range(top + 1):
        e = edges[j]
        half[j] = mass(e[:-1], e[1:]) / np.diff(e)
    if top < depth:
        if log_factor is None:
            raise ValueError("continuation below the resolved levels needs log_factor")
        rng = np.random.default_rng(seed)
        steps = np.asarray(log_factor(rng, depth - top), dtype=float)
        period = max(1, min(period, top + 1))
        shapes = half[top - period + 1:top + 1]
        shapes = shapes / shapes.mean(axis=1, keepdims=True)
        log_amp = math.log(half[top].mean()) + np.cumsum(steps)
        for k, j in enumerate(range(top + 1, depth + 1)):
            half[j] = shapes[k % period] * math.exp(log_amp[k])
    return LevelChain(float(L), half)


# walks ------------------------------------------------------------------------------

@nb.njit(cache=True)
def _walks(K, up, K_top, start, stop_low, stop_high, horizon, n_walks, max_steps):
    # returns per-walk outcome: 1 reached stop_low (deep), 2 reached stop_high, 0 timed out
    # and the clock at the end
    n_lib = K.shape[0]
    n_top = K_top.size
    out = np.zeros(n_walks, dtype=np.int64)
    clock = np.zeros(n_walks)
    for w in range(n_walks):
        j = start
        c = 0.0
        for _ in range(max_steps):
            if j == 0:
                c += K_top[np.random.randint(n_top)]
                j = 1
            else:
                i = np.random.randint(n_lib)
                c += K[i, j]
                j = j - 1 if up[i] else j + 1
            if c > horizon:
                break
            if j >= stop_low:
                out[w] = 1
                break
            if j <= stop_high:
                out[w] = 2
                break
        clock[w] = c
    return out, clock


def run_walks(chain, start, stop_low, stop_high=-1, horizon=np.inf, n_walks=2000,
              seed=0, libs=None, max_steps=1_000_000):
    """Level walks from ``start`` until level ``stop_low``/``stop_high`` or the clock horizon.

    Returns ``(outcome, clock)``: outcome 1 when the deep level was reached,
    2 when the shallow one was, 0 otherwise.
    """
    libs = default_libraries() if libs is None else libs
    K, K_top = chain.passage_clocks(libs)
    _seed_uniforms(int(seed) & 0x7FFFFFFF)
    return _walks(K, libs[0].up, K_top, int(start), int(stop_low), int(stop_high),
                  float(horizon), int(n_walks), int(max_steps))


def climb_clocks(chain, target_level, floor_level, n_samples=2000, seed=0):
    """Clock accumulated by Brownian motion reflected at 0 until it first reaches ``h_target``.

    The speed density is switched off below ``h_floor``.  The local time
    profile ``l(h_target - a)`` is a squared Bessel process of dimension 2
    in ``a`` started from 0 and is sampled exactly on the bin grid.
    """
    if not 0 <= target_level < floor_level <= chain.depth:
        raise ValueError("need 0 <= target_level < floor_level <= depth")
    edges = half_block_edges(chain.L, chain.depth)[target_level:floor_level + 1]
    dens = chain.half[target_level:floor_level + 1]
    mid = np.sqrt(edges[:, :-1] * edges[:, 1:])
    width = np.diff(edges, axis=1)
    # order from the top down: a = H - y increasing
    y = mid[:, ::-1].ravel()
    wm = (dens * width)[:, ::-1].ravel()
    H = chain.L * 2.0 ** -target_level
    a = H - y
    rng = np.random.default_rng(seed)
    z = np.zeros(n_samples)
    prev = 0.0
    total = np.zeros(n_samples)
    for ak, wk in zip(a, wm):
        da = ak - prev
        if da > 0:
            z = da * rng.noncentral_chisquare(2.0, z / da)
        total += z * wk
        prev = ak
    return total
