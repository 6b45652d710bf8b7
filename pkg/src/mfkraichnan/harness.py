"""
Configuration-driven experiment runner.

A run reads a flat INI file::

    [run]
    experiment = fig4
    root_seed = 7

    [params]
    n_realizations = 200

Unknown sections or keys are rejected.  Every parameter has a declared type
and default; resolved values (defaults included) are written into the run
manifest together with per-stage seeds, timings and SHA-256 digests of all
outputs.  Stage seeds are ``blake2b(root_seed, stage, replicate)`` truncated
to 64 bits.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import logging
import math
import os
import shutil
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__

logger = logging.getLogger(__name__)

OUTPUT_ENV = "MFK_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(ValueError):
    """A configuration was rejected; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


# seeds ------------------------------------------------------------------------------

def stage_seed(root_seed, stage, replicate=0):
    """64-bit seed from ``blake2b(root_seed | stage | replicate)``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(root_seed).to_bytes(8, "little", signed=False))
    h.update(stage.encode())
    h.update(int(replicate).to_bytes(8, "little", signed=False))
    return int.from_bytes(h.digest(), "little")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


# parameters -------------------------------------------------------------------------

def _floats(text):
    return [float(eval_fraction(t)) for t in str(text).replace(",", " ").split()]


def eval_fraction(token):
    """Parse ``'2/3'``, ``'-1/64'`` or a plain float."""
    token = str(token).strip()
    if "/" in token:
        num, den = token.split("/", 1)
        return float(num) / float(den)
    return float(token)


_TYPES = {
    "float": lambda v: eval_fraction(v),
    "int": lambda v: int(str(v).strip()),
    "floats": _floats,
    "str": lambda v: str(v).strip(),
    "bool": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
}


@dataclass(frozen=True)
class Param:
    kind: str
    default: object
    check: object = None          # callable -> bool
    help: str = ""


def _in(lo, hi, lo_open=False, hi_open=False):
    def f(v):
        vals = v if isinstance(v, list) else [v]
        return all((lo < x if lo_open else lo <= x) and (x < hi if hi_open else x <= hi)
                   for x in vals)
    return f


_GAMMA = _in(0.0, math.sqrt(2) / 2, hi_open=True)
_POS = _in(0.0, math.inf, lo_open=True)
_POW2 = (lambda v: v >= 64 and v & (v - 1) == 0)


@dataclass
class Experiment:
    name: str
    description: str
    citation: str
    params: dict
    stages: tuple
    runner: object = None


REGISTRY: dict[str, Experiment] = {}


def register(name, description, citation, params, stages):
    def deco(fn):
        REGISTRY[name] = Experiment(name, description, citation, params, tuple(stages), fn)
        return fn
    return deco


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    root_seed: int = 0
    output_dir: Path = Path("mfk-output")
    cache: bool = True
    jobs: int = 1

    def config_hash(self):
        blob = json.dumps({"experiment": self.experiment, "params": self.params,
                           "root_seed": self.root_seed}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def validate(experiment, raw_params, root_seed=0, output_dir=None, cache=True, jobs=1):
    """Resolve and check parameters; raises :class:`ConfigError`."""
    if experiment not in REGISTRY:
        raise ConfigError(f"unknown experiment {experiment!r}; valid: {', '.join(sorted(REGISTRY))}",
                          "experiment")
    exp = REGISTRY[experiment]
    unknown = set(raw_params) - set(exp.params)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown parameter {key!r} for {experiment}", key)
    resolved = {}
    for key, spec in exp.params.items():
        raw = raw_params.get(key, spec.default)
        try:
            val = _TYPES[spec.kind](raw) if isinstance(raw, str) else raw
            if spec.kind == "floats" and not isinstance(val, list):
                val = list(val)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"cannot parse {key}={raw!r}: {err}", key) from None
        if spec.check is not None and not spec.check(val):
            raise ConfigError(f"parameter {key}={val!r} out of range", key)
        resolved[key] = val
    try:
        root_seed = int(root_seed)
    except (TypeError, ValueError):
        raise ConfigError("root_seed must be an integer", "root_seed") from None
    if root_seed < 0:
        raise ConfigError("root_seed must be nonnegative", "root_seed")
    if output_dir is None:
        output_dir = os.environ.get(OUTPUT_ENV, "mfk-output")
    return ExperimentConfig(experiment, resolved, root_seed, Path(output_dir), bool(cache),
                            max(1, int(jobs)))


def load_config(path, seed=None, output_dir=None, cache=True, jobs=1):
    """Parse an INI run file strictly."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as err:
        raise ConfigError(f"cannot read config: {err}") from None
    extra = set(cp.sections()) - {"run", "params"}
    if extra:
        raise ConfigError(f"unknown section [{sorted(extra)[0]}]", sorted(extra)[0])
    if not cp.has_section("run") or "experiment" not in cp["run"]:
        raise ConfigError("missing [run] experiment", "experiment")
    run = dict(cp["run"])
    bad = set(run) - {"experiment", "root_seed", "output_dir"}
    if bad:
        raise ConfigError(f"unknown key {sorted(bad)[0]!r} in [run]", sorted(bad)[0])
    params = dict(cp["params"]) if cp.has_section("params") else {}
    root = seed if seed is not None else run.get("root_seed", 0)
    out = output_dir or run.get("output_dir")
    return validate(run["experiment"], params, root, out, cache, jobs)


def list_experiments():
    """Registry listing as ``[(name, description, citation)]``."""
    return [(e.name, e.description, e.citation) for e in sorted(REGISTRY.values(), key=lambda e: e.name)]


# run context ------------------------------------------------------------------------

@dataclass
class RunContext:
    config: ExperimentConfig
    outputs: list = dc_field(default_factory=list)
    seeds: dict = dc_field(default_factory=dict)
    timings: dict = dc_field(default_factory=dict)
    cached: dict = dc_field(default_factory=dict)

    @property
    def p(self):
        return self.config.params

    def seed(self, stage, replicate=0):
        s = stage_seed(self.config.root_seed, stage, replicate)
        self.seeds.setdefault(stage, s if replicate == 0 else self.seeds.get(stage, s))
        return s

    def path(self, name):
        return self.config.output_dir / name

    def stage(self, name, fn, files, keys=None):
        """Run ``fn(ctx)`` producing ``files`` unless a valid cached copy exists."""
        self.seed(name)
        subset = {k: self.p[k] for k in (keys if keys is not None else self.p)}
        key_blob = json.dumps({"stage": name, "params": subset, "root_seed": self.config.root_seed,
                               "version": __version__}, sort_keys=True, default=str)
        key = hashlib.sha256(key_blob.encode()).hexdigest()[:24]
        cdir = self.config.output_dir / ".cache" / f"{name}-{key}"
        t0 = time.perf_counter()
        if self.config.cache and _cache_valid(cdir, files):
            for f in files:
                shutil.copyfile(cdir / f, self.path(f))
            self.cached[name] = True
        else:
            fn(self)
            self.cached[name] = False
            if self.config.cache:
                cdir.mkdir(parents=True, exist_ok=True)
                digests = {}
                for f in files:
                    shutil.copyfile(self.path(f), cdir / f)
                    digests[f] = sha256_file(cdir / f)
                (cdir / "digests.json").write_text(json.dumps(digests, sort_keys=True))
        self.timings[name] = time.perf_counter() - t0
        self.outputs.extend(f for f in files if f not in self.outputs)


def _cache_valid(cdir, files):
    dfile = cdir / "digests.json"
    if not dfile.exists():
        return False
    try:
        digests = json.loads(dfile.read_text())
    except json.JSONDecodeError:
        return False
    for f in files:
        if f not in digests or not (cdir / f).exists() or sha256_file(cdir / f) != digests[f]:
            logger.warning("cache entry %s corrupt; recomputing", cdir.name)
            return False
    return True


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run_experiment(config: ExperimentConfig):
    """Execute the configured pipeline; returns the manifest dict."""
    exp = REGISTRY[config.experiment]
    config.output_dir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(config)
    exp.runner(ctx)
    files = []
    for f in ctx.outputs:
        files.append({"file": f, "sha256": sha256_file(ctx.path(f)),
                      "bytes": ctx.path(f).stat().st_size})
    manifest = {
        "experiment": config.experiment,
        "config_hash": config.config_hash(),
        "toolkit_version": __version__,
        "root_seed": config.root_seed,
        "params": config.params,
        "stage_seeds": ctx.seeds,
        "wall_clock_s": {k: round(v, 3) for k, v in ctx.timings.items()},
        "cached_stages": ctx.cached,
        "outputs": files,
        "output_dir": str(config.output_dir),
        "output_dir_env": os.environ.get(OUTPUT_ENV),
        "jobs": config.jobs,
    }
    mpath = config.output_dir / f"{config.experiment}_manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    manifest["manifest_path"] = str(mpath)
    return manifest


def verify_manifest(manifest_path):
    """Recompute output digests; returns ``(ok, mismatched_or_missing_files)``."""
    mpath = Path(manifest_path)
    man = json.loads(mpath.read_text())
    base = mpath.parent
    bad = []
    for entry in man["outputs"]:
        f = base / entry["file"]
        if not f.exists():
            bad.append(f"{entry['file']} (missing)")
        elif sha256_file(f) != entry["sha256"]:
            bad.append(entry["file"])
    return not bad, bad


def _deterministic_digest_fields(manifest):
    """Manifest content that must match between reruns (timings excluded)."""
    return {k: manifest[k] for k in ("config_hash", "toolkit_version", "stage_seeds", "outputs")}


# experiments ------------------------------------------------------------------------

@register("fig1", "deterministic coefficient A(r) against r^xi", "Figure 1",
          {"xi_values": Param("floats", "2/3 4/3", _in(0, 2, lo_open=True, hi_open=True)),
           "r_min": Param("float", 1e-4, _POS), "r_max": Param("float", 1.0, _POS),
           "per_decade": Param("int", 16, lambda v: v >= 2)},
          ["coefficient"])
def _fig1(ctx):
    from .kernel import KernelSpec, deterministic_profile
    from .scaling import loglog_slope

    def stage(c):
        rows, summary = [], []
        for xi in c.p["xi_values"]:
            prof = deterministic_profile(KernelSpec(xi=xi), r_min=c.p["r_min"],
                                         r_max=c.p["r_max"], per_decade=c.p["per_decade"])
            ratio = prof.values / prof.r ** xi
            rows += [(xi, r, a, q) for r, a, q in zip(prof.r, prof.values, ratio)]
            summary.append((xi, loglog_slope(prof.r, prof.values, (1e-4, 1e-2)),
                            ratio.max() / ratio.min()))
        write_csv(c.path("fig1_coefficient.csv"), ["xi", "r", "A_r", "A_over_r_xi"], rows)
        write_csv(c.path("fig1_summary.csv"), ["xi", "slope", "ratio_band"], summary)
    ctx.stage("coefficient", stage, ["fig1_coefficient.csv", "fig1_summary.csv"])


@register("fig2-left", "Bessel parameter a and effective dimension against xi",
          "Figure 2, left",
          {"n_xi": Param("int", 199, lambda v: v >= 2)}, ["bessel"])
def _fig2_left(ctx):
    from .paths import bessel_parameters

    def stage(c):
        xs = np.linspace(0, 2, c.p["n_xi"] + 2)[1:-1]
        write_csv(c.path("fig2left_bessel.csv"), ["xi", "a", "d_e"],
                  [(x, *bessel_parameters(x)) for x in xs])
    ctx.stage("bessel", stage, ["fig2left_bessel.csv"])


@register("fig2-right", "smoothed norms |r|_{eta,beta} for several beta", "Figure 2, right",
          {"eta": Param("float", 0.1, _POS), "betas": Param("floats", "1/2 1 3/2 2", _POS),
           "n_r": Param("int", 401, lambda v: v >= 3)}, ["norms"])
def _fig2_right(ctx):
    from .kernel import regularized_norm

    def stage(c):
        r = np.linspace(-2 * c.p["eta"], 2 * c.p["eta"], c.p["n_r"])
        rows = [(b, x, regularized_norm(x, c.p["eta"], b)) for b in c.p["betas"] for x in r]
        write_csv(c.path("fig2right_norms.csv"), ["beta", "r", "norm"], rows)
    ctx.stage("norms", stage, ["fig2right_norms.csv"])


@register("fig3", "chaos measure realizations for several gamma", "Figure 3",
          {"gammas": Param("floats", "0.1 0.3 0.5", _GAMMA), "n_points": Param("int", 1 << 16, _POW2),
           "stride": Param("int", 16, lambda v: v >= 1)}, ["realizations"])
def _fig3(ctx):
    from .field import build_chaos_measure, sample_log_field

    def stage(c):
        n = c.p["n_points"]
        fld = sample_log_field(n, 1.0, 1.0, 4.0 / n, c.seed("realizations"))
        rows = []
        for g in c.p["gammas"]:
            m = build_chaos_measure(fld, g)
            dens = m.density.reshape(-1, c.p["stride"]).mean(axis=1)
            x = fld.x[::c.p["stride"]]
            cum = m.cumulative[:-1:c.p["stride"]]
            rows += [(g, a, b, q) for a, b, q in zip(x, dens, cum)]
        write_csv(c.path("fig3_measures.csv"), ["gamma", "x", "density", "cumulative"], rows)
    ctx.stage("realizations", stage, ["fig3_measures.csv"])


def _fig4_member(args):
    xi, gamma, n_points, halfwidth, r_nodes, seed = args
    from .field import build_chaos_measure, sample_log_field
    from .kernel import KernelSpec, quenched_profile_fft
    dx = 2 * halfwidth / n_points
    m = build_chaos_measure(sample_log_field(n_points, halfwidth, 1.0, 2 * dx, seed), gamma)
    r, A = quenched_profile_fft(KernelSpec(xi=xi), m, r_nodes[-1] + dx)
    k = np.round(r_nodes / dx).astype(int)
    return A[k]


def _map(ctx, fn, items):
    if ctx.config.jobs > 1:
        with ProcessPoolExecutor(ctx.config.jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


@register("fig4", "compensated moments of the quenched coefficient", "Figure 4",
          {"xi": Param("float", "2/3", _in(0, 2, lo_open=True, hi_open=True)),
           "gamma": Param("float", 0.2, _GAMMA),
           "p_values": Param("floats", "-1/4 -1/8 -1/16 -1/32 -1/64 1/64 1/32 1/16 1/8 1/4"),
           "n_realizations": Param("int", 200, lambda v: v >= 10),
           "n_points": Param("int", 1 << 18, _POW2),
           "fit_min_eta": Param("float", 100.0, _POS), "fit_max": Param("float", 0.1, _POS),
           "n_bootstrap": Param("int", 200, lambda v: v >= 10)},
          ["ensemble", "fits"])
def _fig4(ctx):
    from .scaling import fit_moment_scaling, write_moment_csv
    p = ctx.p
    n = p["n_points"]
    half = 2.5
    dx = 2 * half / n
    eta = 2 * dx
    r_nodes = np.unique(np.round(np.geomspace(p["fit_min_eta"] * eta / 4, p["fit_max"] * 2, 40) / dx)) * dx
    store = {}

    def ensemble(c):
        seeds = [c.seed("ensemble", i) for i in range(p["n_realizations"])]
        items = [(p["xi"], p["gamma"], n, half, r_nodes, s % (2 ** 63)) for s in seeds]
        samples = np.array(_map(c, _fig4_member, items))
        store["samples"] = samples
        rows = [(i, r, a) for i, row in enumerate(samples) for r, a in zip(r_nodes, row)]
        write_csv(c.path("fig4_ensemble.csv"), ["realization", "r", "A_r"], rows)

    def fits(c):
        if "samples" not in store:
            data = np.loadtxt(c.path("fig4_ensemble.csv"), delimiter=",", skiprows=1)
            store["samples"] = data[:, 2].reshape(-1, r_nodes.size)
        rng = (p["fit_min_eta"] * eta, p["fit_max"])
        out = [fit_moment_scaling(r_nodes, store["samples"], q, rng, n_boot=p["n_bootstrap"],
                                  seed=c.seed("fits"), min_members=10)
               for q in p["p_values"]]
        write_moment_csv(c.path("fig4_summary.csv"), out)
    ctx.stage("ensemble", ensemble, ["fig4_ensemble.csv"])
    ctx.stage("fits", fits, ["fig4_summary.csv"])


def _raster_stage(ctx, settings, fname):
    from .phases import phase_raster
    xs = np.linspace(ctx.p["xi_max"] / ctx.p["resolution"], ctx.p["xi_max"], ctx.p["resolution"])
    gs = np.linspace(0, ctx.p["gamma_max"], ctx.p["resolution"], endpoint=False)
    rows = []
    from .phases import boundary_margin, NEAR_BOUNDARY
    for s in settings:
        ras = phase_raster(s, xs, gs)
        for i, g in enumerate(gs):
            for j, x in enumerate(xs):
                flag = "near_boundary" if boundary_margin(x, g, s) < NEAR_BOUNDARY else ""
                rows.append((x, g, s, ras[i, j], "analytic", flag))
    write_csv(ctx.path(fname), ["xi", "gamma", "setting", "verdict", "method", "flags"], rows)


def _raster_params(default_settings, xi_max):
    return {"settings": Param("str", default_settings),
            "resolution": Param("int", 64, lambda v: v >= 2),
            "xi_max": Param("float", xi_max, _POS),
            "gamma_max": Param("float", math.sqrt(2) / 2 * 0.999, _GAMMA)}


@register("fig5", "phase rasters of the multifractal Kraichnan flow", "Figure 5",
          _raster_params("mf_quenched", 2.0), ["raster"])
def _fig5(ctx):
    settings = ctx.p["settings"].replace(",", " ").split()
    for s in settings:
        if s not in ("mf_quenched", "mf_annealed", "monofractal"):
            raise ConfigError(f"setting {s!r} not available for fig5", "settings")
    ctx.stage("raster", lambda c: _raster_stage(c, settings, "fig5_raster.csv"), ["fig5_raster.csv"])


@register("fig7", "phase rasters of the multiplicative Liouville Brownian motion", "Figure 7",
          _raster_params("mlbm_quenched", 3.0), ["raster"])
def _fig7(ctx):
    settings = ctx.p["settings"].replace(",", " ").split()
    for s in settings:
        if s not in ("mlbm_quenched", "mlbm_annealed"):
            raise ConfigError(f"setting {s!r} not available for fig7", "settings")
    ctx.stage("raster", lambda c: _raster_stage(c, settings, "fig7_raster.csv"), ["fig7_raster.csv"])


@register("props34", "thickness exponents visited by MK and MLBM paths", "typical vs thick point occupation",
          {"xi": Param("float", 0.5, _in(0, 2)), "gamma": Param("float", 0.4, _GAMMA),
           "n_realizations": Param("int", 10, lambda v: v >= 1),
           "n_paths": Param("int", 100, lambda v: v >= 1),
           "n_points": Param("int", 1 << 20, _POW2),
           "brownian_time": Param("float", 0.5, _POS),
           "dt": Param("float", 1e-5, _POS)}, ["occupation"])
def _props34(ctx):
    from .mlbm import occupation_contrast, write_occupation_csv

    def stage(c):
        res = occupation_contrast(c.p["xi"], c.p["gamma"], c.p["n_realizations"], c.p["n_paths"],
                                  n_points=c.p["n_points"], brownian_time=c.p["brownian_time"],
                                  dt=c.p["dt"],
                                  seed=c.seed("occupation") % (2 ** 63))
        write_occupation_csv(c.path("props34_mk.csv"), res["mk"], "mk", c.p["xi"], c.p["gamma"],
                             c.config.root_seed)
        write_occupation_csv(c.path("props34_mlbm.csv"), res["mlbm"], "mlbm", c.p["xi"],
                             c.p["gamma"], c.config.root_seed)
    ctx.stage("occupation", stage, ["props34_mk.csv", "props34_mlbm.csv"])


@register("reg-limits", "vanishing-regularization limits of the speed measure near 0", "regularization trichotomy",
          {"xi": Param("float", "2/3", _in(0, 2, lo_open=True)),
           "beta_factors": Param("floats", "2 1 1/2", _POS)}, ["limits"])
def _reg_limits(ctx):
    from .phases import regularization_limit_study

    def stage(c):
        rows, curves = [], []
        for f in c.p["beta_factors"]:
            beta = f * c.p["xi"]
            r = regularization_limit_study(c.p["xi"], beta)
            rows.append((beta, r["slope"], r["predicted_slope"], r["limit"]))
            curves += [(beta, e, m) for e, m in zip(r["eta"], r["mass"])]
        write_csv(c.path("reglimits_summary.csv"), ["beta", "slope", "predicted_slope", "limit"], rows)
        write_csv(c.path("reglimits_curves.csv"), ["beta", "eta", "mass"], curves)
    ctx.stage("limits", stage, ["reglimits_summary.csv", "reglimits_curves.csv"])


@register("escape", "Monte Carlo exit times against the Green-function formula", "Green-function exit times",
          {"xi": Param("float", "2/3", _in(0, 2)), "kappa": Param("float", 1e-4, _in(0, 1)),
           "r1": Param("float", 0.1, _in(0, math.inf)), "r2": Param("float", 1.0, _POS),
           "start": Param("float", 0.3, _POS), "n_paths": Param("int", 1000, lambda v: v >= 10),
           "dt": Param("float", 1e-5, _POS)}, ["exits"])
def _escape(ctx):
    from .kernel import power_profile
    from .paths import escape_time_check, path_seeds, write_exit_csv
    p = ctx.p
    if not p["r1"] < p["start"] < p["r2"]:
        raise ConfigError("start must lie inside (r1, r2)", "start")

    def stage(c):
        prof = power_profile(p["xi"], 0.5, kappa=p["kappa"])
        s = c.seed("exits") % (2 ** 63)
        res = escape_time_check((p["r1"], p["r2"]), p["start"], p["n_paths"], p["dt"], s, prof)
        write_exit_csv(c.path("escape_exits.csv"), path_seeds(s, p["n_paths"]),
                       res["exit_times"], res["exit_side"])
        write_csv(c.path("escape_summary.csv"), ["mc_mean", "mc_se", "quadrature"],
                  [(res["mc_mean"], res["mc_se"], res["quadrature"])])
    ctx.stage("exits", stage, ["escape_exits.csv", "escape_summary.csv"])


# CLI --------------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="mfkraichnan",
                                 description="Multifractal Kraichnan / MLBM experiment runner")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a config file")
    r.add_argument("config")
    r.add_argument("--seed", type=int, default=None, help="override root_seed")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--output", default=None, help=f"output directory (default ${OUTPUT_ENV})")
    r.add_argument("--no-cache", action="store_true")
    sub.add_parser("list", help="list registered experiments")
    v = sub.add_parser("verify", help="recompute output digests of a manifest")
    v.add_argument("manifest")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        for name, desc, cite in list_experiments():
            print(f"{name:12s} {desc}  [{cite}]")
        return EXIT_OK
    if args.command == "verify":
        try:
            ok, bad = verify_manifest(args.manifest)
        except (OSError, json.JSONDecodeError, KeyError) as err:
            print(f"verification failed: {err}", file=sys.stderr)
            return EXIT_VERIFY
        if ok:
            print("PASS")
            return EXIT_OK
        print("FAIL: " + ", ".join(bad))
        return EXIT_VERIFY
    try:
        cfg = load_config(args.config, args.seed, args.output, not args.no_cache, args.jobs)
        man = run_experiment(cfg)
    except ConfigError as err:
        print(f"config rejected ({err.key}): {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        # parameter combinations refused by the numerical modules
        print(f"config rejected: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    print(man["manifest_path"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
