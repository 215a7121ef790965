"""Classical limit map of the detuned double kicked rotor.

Treating the detuning tilde as a virtual Planck constant and sending it to
zero turns one kicking period into the area-preserving map

    rho   = p + Ktilde * f(theta)          f = -dV/dtheta
    o     = theta + rho + pi      (mod 2 pi)
    p'    = rho + Ktilde * f(o)
    theta'= o - p' + pi           (mod 2 pi)

on rescaled variables theta in [-pi, pi), p unbounded, with rescaled kick
strength Ktilde = K * tilde / hbar. Angles are wrapped after every update;
momentum is kept unwrapped because the energy needs it, even though the
phase-space structure is 2*pi-periodic in p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import wrap_angle
from .series import EnergySeries

DEFAULT_ENSEMBLE_SIZE = 10_000


@dataclass(frozen=True)
class RescaledParams:
    """Rescaled kick strength and the factors needed to undo the rescaling."""

    ktilde: float
    hbar: float
    tilde: float
    K: float

    @classmethod
    def from_planck(cls, K, planck):
        if not K > 0:
            raise ValueError("kick strength K must be positive")
        hbar = planck.hbar
        return cls(ktilde=K * planck.tilde / hbar, hbar=hbar, tilde=planck.tilde, K=K)

    @property
    def delta(self):
        """Per-step angular drift 2*Ktilde/pi of the triangle-profile axis points."""
        return 2.0 * self.ktilde / np.pi

    @property
    def energy_rescale(self):
        """Factor hbar^2/tilde^2 mapping map energy onto rotor energy."""
        return (self.hbar / self.tilde) ** 2


@dataclass
class ClassicalEnsemble:
    """Phase points (theta in [-pi, pi), p unbounded) plus their seed."""

    theta: np.ndarray
    p: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if self.theta.shape != self.p.shape:
            raise ValueError("theta and p must have the same shape")

    @property
    def size(self):
        return len(self.theta)


def uniform_ensemble(size=DEFAULT_ENSEMBLE_SIZE, seed=0, stratified=False):
    """Initial conditions matching the zero-momentum quantum state:
    p0 = 0, theta0 uniform on [-pi, pi).

    ``stratified`` jitters one point per equal-width stratum instead of
    sampling i.i.d., which cuts the Monte-Carlo variance of smooth
    ensemble averages without losing determinism.
    """
    rng = np.random.default_rng(seed)
    if stratified:
        u = (np.arange(size) + rng.random(size)) / size
    else:
        u = rng.random(size)
    theta = -np.pi + 2.0 * np.pi * u
    return ClassicalEnsemble(theta=theta, p=np.zeros(size), seed=seed)


def map_step(theta, p, potential, params):
    """One period of the limit map; accepts scalars or arrays."""
    kt = params.ktilde
    rho = p + kt * potential.force(theta)
    o = wrap_angle(theta + rho + np.pi)
    p_new = rho + kt * potential.force(o)
    theta_new = wrap_angle(o - p_new + np.pi)
    return theta_new, p_new


def va_one_step(theta0, params):
    """Closed-form single step of the triangle profile for axis points (p0 = 0).

    The four branches: interior points drift by +-delta along the axis and
    stay on it; points within delta of the edge at +pi (respectively -pi)
    leave with momentum +2*delta (respectively -2*delta). The momentum sign
    on the -pi edge follows from the map's (theta, p) -> (-theta, -p)
    symmetry for even potentials. Valid for delta < pi.
    """
    theta0 = np.asarray(theta0, dtype=float)
    # match the bit-level arithmetic of map_step on the triangle profile:
    # force = -slope with slope = 2/pi, so the drift is ktilde * (2/pi)
    delta = params.ktilde * (2.0 / np.pi)
    if not delta < np.pi:
        raise ValueError("one-step branch form needs delta < pi")
    theta1 = np.where(theta0 < 0.0, theta0 - delta, theta0 + delta)
    p1 = np.zeros_like(theta0)
    upper = theta0 >= np.pi - delta
    lower = theta0 < delta - np.pi
    theta1 = np.where(upper, theta0 - delta, theta1)
    p1 = np.where(upper, 2.0 * delta, p1)
    theta1 = np.where(lower, theta0 + delta, theta1)
    p1 = np.where(lower, -2.0 * delta, p1)
    return theta1, p1


def cubic_energy(t, params):
    """Exact ensemble energy of the triangle profile before saturation:
    Etilde(t) = delta^3 / (3 pi) * t (t+1) (2t+1), valid for t < pi/delta.

    At each step a fraction delta/pi of the axis points departs and then
    climbs at 2*delta per step, so cohorts aged k carry energy 2 k^2 delta^2.
    """
    t = np.asarray(t, dtype=float)
    t_s = saturation_estimates(params)[0]
    if np.any(t >= t_s):
        raise ValueError(f"cubic law is valid only for t < t_s ~ {t_s:.4g}")
    d = params.delta
    return d**3 / (3.0 * np.pi) * t * (t + 1.0) * (2.0 * t + 1.0)


def cubic_energy_rescaled(t, params):
    """cubic_energy in rotor units; approaches 16 K^3 tilde/(3 pi^4 hbar) t^3."""
    return cubic_energy(t, params) * params.energy_rescale


def saturation_estimates(params):
    """(t_s, E_s): saturation time pi/delta = pi^2 hbar / (2 K tilde) and
    plateau energy (2 pi)^2/2 * hbar^2/tilde^2 from the 2*pi momentum period
    of the phase-space structure."""
    if params.tilde == 0.0:
        raise ValueError("saturation is undefined at tilde = 0")
    t_s = np.pi**2 * params.hbar / (2.0 * params.K * abs(params.tilde))
    E_s = 0.5 * (2.0 * np.pi) ** 2 * params.energy_rescale
    return t_s, E_s


def evolve_ensemble(
    ensemble,
    potential,
    params,
    steps,
    record_stride=1,
    record_times=None,
    with_stderr=False,
):
    """Iterate the map over all points, recording the rescaled mean energy
    E(t) = <p^2/2> * hbar^2/tilde^2 (optionally with its standard error)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if record_times is None:
        record_times = np.arange(0, steps + 1, record_stride)
    record_times = np.unique(np.clip(np.asarray(record_times, dtype=np.int64), 0, steps))
    if record_times[0] != 0:
        record_times = np.concatenate(([0], record_times))
    if record_times[-1] != steps:
        record_times = np.concatenate((record_times, [steps]))

    theta = ensemble.theta.copy()
    p = ensemble.p.copy()
    n = len(p)
    scale = params.energy_rescale
    energies = np.empty(len(record_times))
    errors = np.empty(len(record_times)) if with_stderr else None

    def record(k):
        e_pts = 0.5 * p * p
        energies[k] = e_pts.mean() * scale
        if with_stderr:
            errors[k] = e_pts.std(ddof=1) / np.sqrt(n) * scale

    k = 0
    if record_times[0] == 0:
        record(0)
        k = 1
    for t in range(1, steps + 1):
        theta, p = map_step(theta, p, potential, params)
        if k < len(record_times) and record_times[k] == t:
            record(k)
            k += 1
    meta = {
        "engine": "pseudoclassical",
        "potential": potential.name,
        "K": params.K,
        "tilde": params.tilde,
        "size": n,
    }
    if ensemble.seed is not None:
        meta["seed"] = ensemble.seed
    return EnergySeries(t=record_times, E=energies, meta=meta, stderr=errors)


def off_axis_fraction(ensemble, potential, params, steps, tol=None):
    """Fraction of an axis ensemble that has left p = 0 after each step.

    For shift-antisymmetric piecewise-linear potentials this grows linearly
    until saturation; it is the portion factor in the cubic energy law.
    """
    if tol is None:
        tol = 1e-12 * max(1.0, params.ktilde)
    theta = ensemble.theta.copy()
    p = ensemble.p.copy()
    out = np.empty(steps)
    for t in range(steps):
        theta, p = map_step(theta, p, potential, params)
        out[t] = np.mean(np.abs(p) > tol)
    return out


def axis_persistence(potential, params, samples=100_000, seed=1, tol=None):
    """Fraction of p = 0 points still on the axis after one step.

    tol defaults to 1e-12 * max(1, Ktilde). Shift-antisymmetric piecewise
    potentials keep all but the O(delta/pi) edge slivers; potentials without
    the symmetry lose essentially everything.
    """
    if tol is None:
        tol = 1e-12 * max(1.0, params.ktilde)
    ens = uniform_ensemble(samples, seed=seed)
    _, p1 = map_step(ens.theta, ens.p, potential, params)
    return float(np.mean(np.abs(p1) <= tol))


def phase_portrait(potential, params, seeds, steps):
    """Orbits of the map for a list of (theta0, p0) seeds.

    Returns a list of (theta, p_display) arrays of length steps+1 per seed,
    the momentum reduced mod 2*pi into [0, 2*pi) for display; the dynamics
    itself never wraps momentum.
    """
    orbits = []
    for theta0, p0 in seeds:
        theta = np.empty(steps + 1)
        p = np.empty(steps + 1)
        theta[0], p[0] = wrap_angle(float(theta0)), float(p0)
        th, mom = theta[0], p[0]
        for i in range(1, steps + 1):
            th, mom = map_step(th, mom, potential, params)
            theta[i], p[i] = th, mom
        orbits.append((theta, np.mod(p, 2.0 * np.pi)))
    return orbits


def default_portrait_seeds():
    """Axis points plus a generic spread of off-axis points."""
    seeds = [(th, 0.0) for th in np.linspace(-3.0, 3.0, 7)]
    for p0 in (0.5, 1.5, 2.5, 3.5, 4.5, 5.5):
        for th in (-2.4, -0.8, 0.8, 2.4):
            seeds.append((th, p0))
    return seeds


def write_portrait_csv(orbits, path, meta=None):
    """CSV rows seed_id,t,theta,p with optional # key=value header."""
    with open(path, "w", newline="\n") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write("seed_id,t,theta,p\n")
        for sid, (theta, p) in enumerate(orbits):
            for t, (th, mom) in enumerate(zip(theta, p)):
                fh.write(f"{sid},{t},{repr(float(th))},{repr(float(mom))}\n")
