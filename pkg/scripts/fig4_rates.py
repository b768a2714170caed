"""Decay rate versus tau / tau* for four couplings (N = 9)."""

import sys

from _common import run

out = sys.argv[1] if len(sys.argv) > 1 else "results/fig4"
grid = dict(start=0.02, stop=3.0, count=400, spacing="linear", scaled=True)
for gamma in (0.25, 0.5, 0.75, 1.0):
    run("rate-scan", f"{out}/gamma_{gamma:g}", n_chain=9, gamma=gamma, tau_grid=grid, workers=4)
