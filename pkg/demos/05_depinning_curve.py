"""Mean velocity against drive, with adiabatic up/down scans showing bistability."""

import numpy as np

from _common import plt, save
from pendulum_phase import hysteresis_scan, velocity_curve

gamma = 0.3
betas = np.round(np.linspace(0.05, 2.0, 40), 6)
rows = velocity_curve(gamma, betas, workers=4)
up = hysteresis_scan(gamma, betas[::3], "up")
down = hysteresis_scan(gamma, betas[::3], "down")
print(f"beta0 = {rows[0].beta0:.6f}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(betas, [r.mean_velocity for r in rows], "k-", label="cycle (2 pi / T)")
ax.plot([r.beta for r in up], [r.mean_velocity for r in up], "^", label="scan up")
ax.plot([r.beta for r in down], [r.mean_velocity for r in down], "v", label="scan down")
ax.axvline(rows[0].beta0, color="grey", ls=":", label="beta0")
ax.axvline(1, color="grey", lw=0.6)
ax.set(xlabel="beta", ylabel="mean velocity", title=f"depinning, gamma={gamma}")
ax.legend()
save(fig, "05_depinning_curve.png")
