"""From a log-correlated field to a rough, intermittent diffusion coefficient.

We sample one realization of the mollified log-correlated field, turn it into
a chaos measure for a few intermittency levels, and look at how the quenched
coefficient A(r) scales at small separations.  With gamma = 0 the coefficient
is the deterministic r^xi law; intermittency steepens the typical small-scale
slope to xi + 2 gamma^2.
"""
import numpy as np

from mfkraichnan.field import build_chaos_measure, sample_log_field
from mfkraichnan.kernel import KernelSpec, deterministic_profile, quenched_profile_fft
from mfkraichnan.scaling import closed_form_exponents, loglog_slope

xi = 2 / 3
n, half = 1 << 18, 2.5
dx = 2 * half / n
eta = 2 * dx
field = sample_log_field(n, half, 1.0, eta, seed=1)
print(f"field: {n} points on [-{half}, {half}), cutoff {eta:.2e}, var at 0 = {field.variance:.2f}")

# deterministic reference, computed by adaptive quadrature
det = deterministic_profile(KernelSpec(xi=xi), r_min=1e-4, r_max=1.0)
print(f"deterministic slope on [1e-4, 1e-2]: {loglog_slope(det.r, det.values, (1e-4, 1e-2)):.4f}")

window = (100 * eta, 0.1)
i0, i1 = n // 2, n // 2 + int(round(1.0 / dx))
for gamma in (0.0, 0.2, 0.4):
    mu = build_chaos_measure(field, gamma)
    r, A = quenched_profile_fft(KernelSpec(xi=xi), mu, 0.2)
    slope = loglog_slope(r[1:], A[1:], window)
    target = closed_form_exponents(xi, gamma).value("xi_eff")
    print(f"gamma={gamma:.1f}: mu[0,1]={mu.cumulative[i1] - mu.cumulative[i0]:.3f}  "
          f"single-realization slope {slope:.3f} (typical value {target:.3f})")

# One realization scatters widely around the typical slope.  The median over
# an ensemble approaches xi + 2 gamma^2; forty realizations still leave a
# standard error of about 0.05, and the acceptance tests use a thousand.
gamma = 0.2
slopes = []
for seed in range(40):
    mu = build_chaos_measure(sample_log_field(n, half, 1.0, eta, seed=100 + seed), gamma)
    r, A = quenched_profile_fft(KernelSpec(xi=xi), mu, 0.2)
    slopes.append(loglog_slope(r[1:], A[1:], window))
print(f"gamma=0.2 over 40 realizations: median slope {np.median(slopes):.3f}, "
      f"spread {np.std(slopes):.2f}")
