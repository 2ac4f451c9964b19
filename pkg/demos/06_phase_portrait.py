"""Phase portraits written as SVG through the library's renderer."""

import os

import numpy as np

from _common import OUT
from pendulum_phase import ModelParams, PhaseState, phase_portrait
from pendulum_phase.output import portrait_svg

os.makedirs(OUT, exist_ok=True)
for beta, gamma in ((0.5, 0.2), (1.0, 1.0), (1.5, 0.5)):
    params = ModelParams(beta, gamma)
    seeds = [PhaseState(p, z) for p in np.linspace(-3, 3, 5) for z in (-1.5, 0.5, 2.5)]
    portrait = phase_portrait(params, seeds)
    path = os.path.join(OUT, f"06_portrait_b{beta}_g{gamma}.svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(portrait_svg(portrait))
    print(f"wrote {path} ({len(portrait.trajectories)} trajectories)")
