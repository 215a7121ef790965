"""Scaling of the characteristic quantities with the detuning.

Sweeps tilde over 1.5 decades, measures the crossover time t_c from quantum
runs and the saturation time/energy from limit-map runs, and fits the
slopes of the three power laws (expected -1/2, -1, -2).

Several minutes of compute at the default grid.
"""

import numpy as np
import matplotlib.pyplot as plt

import dkrotor as dk
from dkrotor import analysis as an
from dkrotor.pseudoclassical import (
    RescaledParams,
    evolve_ensemble,
    saturation_estimates,
    uniform_ensemble,
)

K = 5.0
tildes = [1e-2, 3e-3, 1e-3, 3e-4]
reports = []
for tilde in tildes:
    planck = dk.PlanckSpec(1, 1, tilde)
    params = RescaledParams.from_planck(K, planck)
    t_s_nom, _ = saturation_estimates(params)

    D = dk.ballistic_coefficient(dk.va(), K, planck)
    t_c_est = 3 * np.pi**4 * planck.hbar * D / (16 * K**3 * tilde)
    steps_q = int(min(max(16 * t_c_est, 400), 0.85 * t_s_nom))
    print(f"tilde = {tilde:.0e}: quantum to t = {steps_q}, "
          f"limit map to t = {int(3.8 * t_s_nom)}")
    quantum = dk.evolve(
        dk.momentum_eigenstate(dk.default_grid_size(planck)),
        dk.va(), K, planck, steps_q, record_times=dk.log_record_times(steps_q),
    )
    classical = evolve_ensemble(
        uniform_ensemble(10_000, seed=11, stratified=True),
        dk.va(), params, int(3.8 * t_s_nom),
        record_times=dk.log_record_times(int(3.8 * t_s_nom)),
    )
    merged = an.FitReport(meta={"tilde": tilde})
    merged.t_c = an.analyze_series(quantum).t_c
    c_rep = an.analyze_series(classical)
    merged.t_s, merged.E_s = c_rep.t_s, c_rep.E_s
    reports.append(merged)

slopes = an.scaling_regression(reports)
for name, (slope, err) in slopes.items():
    print(f"slope log {name} / log tilde = {slope:+.3f} +- {err:.3f}")

x = np.array(tildes)
fig, ax = plt.subplots(figsize=(5.5, 4.5))
ax.loglog(x, [r.t_c for r in reports], "o", label=r"$t_c$")
ax.loglog(x, [r.t_s for r in reports], "^", label=r"$t_s$")
ax.loglog(x, 3.2 / np.sqrt(x), "--", color="gray")
ax.loglog(x, np.pi**2 * 2 * np.pi / (2 * K * x), "-.", color="gray")
ax.set_xlabel(r"$\tilde\hbar$")
ax.set_ylabel("kicks")
ax.legend()
fig.tight_layout()
fig.savefig("detuning_scaling.png", dpi=160)
print("wrote detuning_scaling.png")
