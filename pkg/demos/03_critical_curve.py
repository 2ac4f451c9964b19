"""Critical drive beta0(gamma) with its small-damping slope 4/pi and the plateau at 1."""

import numpy as np

from _common import plt, save
from pendulum_phase import critical_curve

gammas = np.concatenate((np.linspace(0.02, 1.2, 24), [1.25, 1.5, 2.0]))
rows = critical_curve(gammas, tol=1e-5, workers=4)
for r in rows:
    print(f"gamma={r.gamma:.3f} beta0={r.beta0:.6f} {r.status}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot([r.gamma for r in rows], [r.beta0 for r in rows], "o-", ms=3, label="beta0")
ax.plot(gammas[:8], 4 / np.pi * gammas[:8], "--", label="4 gamma / pi")
ax.axhline(1, color="grey", lw=0.6)
ax.set(xlabel="gamma", ylabel="beta0", title="critical drive")
ax.legend()
save(fig, "03_critical_curve.png")
