"""Rotational limit cycle, its mean height identity and its contraction rate."""

import math

from _common import plt, save
from pendulum_phase import ModelParams, find_limit_cycle

fig, ax = plt.subplots(figsize=(7, 4))
for beta, gamma in ((0.8, 0.5), (1.5, 1.0), (3.0, 0.3)):
    orbit = find_limit_cycle(ModelParams(beta, gamma))
    print(f"beta={beta} gamma={gamma}: z*={orbit.z_start:.9f} T={orbit.period_T:.6f} "
          f"int z dphi={orbit.phase_integral:.9f} (2 pi beta/gamma={2 * math.pi * beta / gamma:.9f}) "
          f"slope={orbit.contraction:.3e} exp(-gamma T)={orbit.expected_contraction:.3e}")
    ax.plot(orbit.phi, orbit.samples, label=f"beta={beta}, gamma={gamma}")
ax.set(xlabel="phi (section to section + 2 pi)", ylabel="z", title="running solutions")
ax.legend()
save(fig, "04_limit_cycle.png")
