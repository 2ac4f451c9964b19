"""Equilibria, the nullcline G and the four slope regions for one parameter pair."""

import numpy as np

from _common import plt, save
from pendulum_phase import FixedPointKind, ModelParams, PhaseState, classify_region, curve_g, equilibria, main_interval

params = ModelParams(beta=0.5, gamma=0.4)
lo, hi = main_interval(params)

for fp in equilibria(params, (0, 1)):
    print(f"n={fp.index:+d} phi={fp.phi:+.6f} {fp.kind.value:12s} slopes={fp.slopes} disc={fp.discriminant:+.4f}")

phi = np.linspace(lo, hi, 400)
z = np.linspace(-2.0, 4.5, 300)
P, Z = np.meshgrid(phi, z)
codes = {"Lambda1": 1, "Lambda2": 2, "Lambda3": 3, "Lambda4": 4}
labels = np.vectorize(lambda p, v: codes.get(classify_region(PhaseState(p, v), params).value, 0))(P, Z)

fig, ax = plt.subplots(figsize=(7, 4))
ax.pcolormesh(P, Z, labels, cmap="Pastel1", shading="auto")
ax.plot(phi, curve_g(phi, params), "g", lw=1.5, label="G")
ax.axhline(0, color="k", lw=0.6)
for fp in equilibria(params, (-1, 1)):
    ax.plot(fp.phi, 0, "x" if fp.kind is FixedPointKind.SADDLE else "o", color="k")
ax.set(xlabel="phi", ylabel="z", title=f"beta={params.beta}, gamma={params.gamma}")
ax.legend()
save(fig, "01_equilibria_regions.png")
