"""Density-matrix tomography at T = 4 and T = 50 (uniform chain), plus the
random-energy N = 4 run whose off-diagonal average decays exponentially."""

import sys

from _common import run

out = sys.argv[1] if len(sys.argv) > 1 else "results/fig1"
run("tomography", f"{out}/uniform", n_chain=9, gamma=1.0, tau=1.0, n_steps=50, snapshots=[4, 50])
run("evolve", f"{out}/random", n_chain=4, gamma=1.0, epsilons="random", seed=1, tau=1.0, n_steps=100)
