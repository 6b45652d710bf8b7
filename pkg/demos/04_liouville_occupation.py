"""Which points does a path spend its time on?

Both processes below run on the same Brownian path and the same chaos
realization.  The Kraichnan separation uses the smooth quenched coefficient
and spends its time at typical points of the field (thickness near 0).  The
multiplicative Liouville Brownian motion uses the chaos itself as its clock
and lingers on the thick points that carry the measure (thickness near 2 gamma).
"""
import numpy as np

from mfkraichnan.mlbm import occupation_contrast

xi, gamma = 0.5, 0.4
res = occupation_contrast(xi, gamma, n_realizations=2, n_paths=20, n_points=1 << 18, seed=0)
print(f"resolutions used for the thickness slopes: {np.round(res['resolutions'], 4)}")
for kind, label, target in (("mk", "Kraichnan separation", 0.0),
                            ("mlbm", "Liouville Brownian motion", 2 * gamma)):
    rep = res[kind]
    print(f"{label:28s} median thickness {rep['median']:+.3f}   (expected {target:.2f})")
    hist = rep["time_fraction"]
    centers = 0.5 * (rep["bins"][1:] + rep["bins"][:-1])
    for c, f in zip(centers, hist):
        if -1.0 <= c <= 2.0:
            print(f"   {c:+.2f} " + "*" * int(200 * f))
