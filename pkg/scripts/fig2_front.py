"""Population heatmap of a 50-site chain for frequent (tau = 0.2) and sparse
(tau = 5) measurements; prints the fitted front velocity of each."""

import csv
import sys

import numpy as np

from _common import run
from zenochain.channel import TrajectoryRecord, front_velocity

out = sys.argv[1] if len(sys.argv) > 1 else "results/fig2"
for tau, steps, sub in [(0.2, 300, 1), (5.0, 12, 25)]:
    d = f"{out}/tau_{tau:g}"
    run("evolve", d, n_chain=50, gamma=1.0, tau=tau, n_steps=steps, substeps=sub)
    with open(f"{d}/trajectory.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    recs = [
        TrajectoryRecord(int(r[0]), float(r[1]), float(r[2]), np.array(r[4:], dtype=float), float(r[3]))
        for r in rows
    ]
    print(f"tau = {tau:g}: front velocity {front_velocity(recs):.3f}")
