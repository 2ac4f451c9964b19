"""Unstable separatrix from the saddle A0 below, near and above the critical drive."""

from _common import plt, save
from pendulum_phase import ModelParams, critical_beta, shoot_unstable_manifold

gamma = 0.5
beta0 = critical_beta(gamma).beta0
print(f"beta0({gamma}) = {beta0:.8f}")

fig, ax = plt.subplots(figsize=(7, 4))
for beta in (beta0 - 0.05, beta0 - 1e-4, beta0 + 1e-4, beta0 + 0.05):
    shot = shoot_unstable_manifold(ModelParams(beta, gamma))
    seg = shot.trajectory
    print(f"beta={beta:.6f}: {shot.kind.value} phi_c={shot.phi_c} z_c={shot.z_c}")
    ax.plot(seg.phi, seg.z, label=f"beta={beta:.4f} ({shot.kind.value})")
ax.axhline(0, color="k", lw=0.6)
ax.set(xlabel="phi", ylabel="z", title=f"separatrix shots, gamma={gamma}")
ax.legend(fontsize=8)
save(fig, "02_separatrix_shooting.png")
