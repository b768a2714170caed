"""Dot survival probability for N = 9 at short and long measurement intervals."""

import sys

from _common import run

out = sys.argv[1] if len(sys.argv) > 1 else "results/fig3"
for tau in (0.01, 0.02, 0.05, 0.1, 0.2, 0.5):
    run("evolve", f"{out}/short_tau_{tau:g}", n_chain=9, gamma=1.0, tau=tau, n_steps=round(10 / tau))
for tau in (1.0, 1.5, 2.0, 3.0, 5.0):
    run("evolve", f"{out}/long_tau_{tau:g}", n_chain=9, gamma=1.0, tau=tau, n_steps=round(400 / tau))
