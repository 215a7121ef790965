"""Phase portraits of the limit map for the three piecewise potentials.

The shift-antisymmetric profiles (va, vb) keep a line of slow points along
the angle axis; points escaping from its ends climb toward the 2*pi replica
of the structure. The reflection-only profile (vc) has no such line: every
point leaves the axis after one kick.
"""

import numpy as np
import matplotlib.pyplot as plt

import dkrotor as dk
from dkrotor.pseudoclassical import (
    RescaledParams,
    default_portrait_seeds,
    phase_portrait,
)

K = 5.0
planck = dk.PlanckSpec(1, 1, 1e-3)
params = RescaledParams.from_planck(K, planck)
steps = 4000

fig, axes = plt.subplots(1, 3, figsize=(12, 4), sharey=True)
for ax, factory in zip(axes, (dk.va, dk.vb, dk.vc)):
    pot = factory()
    orbits = phase_portrait(pot, params, default_portrait_seeds(), steps)
    for theta, p in orbits:
        ax.plot(theta, p, ",", color="navy", alpha=0.5)
    ax.set_title(pot.name)
    ax.set_xlabel(r"$\tilde\theta$")
    ax.set_xlim(-np.pi, np.pi)
    ax.set_ylim(0, 2 * np.pi)
axes[0].set_ylabel(r"$\tilde p$ mod $2\pi$")
fig.tight_layout()
fig.savefig("phase_portraits.png", dpi=160)
print("wrote phase_portraits.png")
