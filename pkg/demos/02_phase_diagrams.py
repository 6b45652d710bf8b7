"""Where do two particles stick, bounce, or never meet?

The boundary at zero separation is regular, exit or natural depending on an
effective roughness exponent.  We print the analytic phase maps as text and
then classify two cells empirically from simulated speed measures.
"""
import numpy as np

from mfkraichnan.phases import analytic_phase, empirical_phase, phase_raster

SYMBOL = {"regular": ".", "exit": "x", "natural": "#"}
xs = np.linspace(0.05, 2.5, 50)
gs = np.linspace(0.0, 0.7, 12)

for setting in ("mf_quenched", "mf_annealed", "mlbm_quenched"):
    print(f"\n{setting}   (. regular, x exit, # natural; xi grows to the right)")
    ras = phase_raster(setting, xs, gs)
    for g, row in zip(gs[::-1], ras[::-1]):
        print(f"gamma={g:.2f} " + "".join(SYMBOL[v] for v in row))

# Monte Carlo check of two calibration cells
for xi, gamma, setting in ((0.5, 0.2, "mf_quenched"), (1.2, 0.3, "mf_quenched")):
    emp = empirical_phase(xi, gamma, setting, seed=0)
    ana = analytic_phase(xi, gamma, setting)
    print(f"{setting} xi={xi} gamma={gamma}: empirical {emp.verdict}, analytic {ana.verdict}")
