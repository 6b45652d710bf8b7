"""Is r^-xi integrable against the chaos near a point?

A typical point of the chaos measure is a thick point, so the measure of
[0, r] decays like r^(1 + 2 gamma^2) rather than r.  The integral of r^-xi
therefore converges up to xi = 1 + 2 gamma^2.  We judge convergence from how
the truncated sums grow as the cutoff shrinks.
"""
from mfkraichnan.mlbm import seiberg_grid

gamma = 0.3
xis = (0.7, 0.95, 1.4, 1.65)
# a fine grid matters: the truncated sums need cutoffs spanning several decades
res = seiberg_grid(xis, gamma, n_realizations=30, n_points=1 << 22, seed=0)
print(f"threshold 1 + 2 gamma^2 = {1 + 2 * gamma ** 2:.2f}")
for x in xis:
    votes = res[x]["votes"]
    print(f"xi={x:.2f}: {res[x]['verdict']:10s} ({votes.count('convergent')}/{len(votes)} convergent)")
