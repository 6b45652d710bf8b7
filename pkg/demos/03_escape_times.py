"""Mean exit times: Monte Carlo paths against the Green-function integral.

For a one-dimensional diffusion the mean time to leave an interval is an
integral of the Green function against the speed density.  We simulate
paths of the separation SDE and compare.
"""
from mfkraichnan.kernel import power_profile
from mfkraichnan.paths import escape_time_check

# the rough coefficient needs a finer step for the exit detection to be sharp
cases = [("Brownian motion on (0,1) from 0.5", (0.0, 1.0), 0.5,
          power_profile(1e-12, 0.5, r_min=1e-12), 1e-5),
         ("A(r) = r^(2/3)/2 + 1e-4 on (0.1,1) from 0.3", (0.1, 1.0), 0.3,
          power_profile(2 / 3, 0.5, kappa=1e-4), 1e-6)]
for label, interval, start, prof, dt in cases:
    res = escape_time_check(interval, start, n_paths=2000, dt=dt, seed=3, profile=prof)
    print(f"{label}:\n  Monte Carlo {res['mc_mean']:.4f} +- {res['mc_se']:.4f}   "
          f"quadrature {res['quadrature']:.4f}")
