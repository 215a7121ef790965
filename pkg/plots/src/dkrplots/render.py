"""Renderers for the three figure kinds.

Inputs are never modified; rendering the same spec twice overwrites the
output with identical content.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import (
    FigureSpec,
    FigureSpecError,
    read_energy_csv,
    read_portrait_csv,
    read_results_csv,
)

ENERGY_STYLE = {
    "quantum": dict(marker="o", ms=3, ls="none", color="crimson"),
    "pseudoclassical": dict(marker="s", ms=3, ls="none", mfc="none", color="royalblue"),
}
GUIDE_STYLE = {"t2": ":", "t3": "--"}
SCALING_GUIDES = {"t_c": (-0.5, "--"), "t_s": (-1.0, "-."), "E_s": (-2.0, ":")}


def render_energy(spec):
    """Log-log E(t) overlay of one or more series with power-law guides."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    t_ref = e_ref = None
    for path in spec.inputs:
        meta, t, e = read_energy_csv(path)
        keep = (t >= 1) & (e > 0)
        engine = meta.get("engine", path)
        label = engine
        if "tilde" in meta:
            label += f" tilde={meta['tilde']}"
        style = ENERGY_STYLE.get(engine, dict(marker=".", ls="none"))
        ax.loglog(t[keep], e[keep], label=label, **style)
        if t_ref is None and keep.any():
            t_ref, e_ref = t[keep], e[keep]
    if t_ref is not None:
        span = np.geomspace(t_ref[0], t_ref[-1], 50)
        mid = len(t_ref) // 2
        for guide in spec.guides:
            if guide not in GUIDE_STYLE:
                raise FigureSpecError(f"unknown guide {guide!r}")
            power = float(guide[1:])
            amp = e_ref[mid] / t_ref[mid] ** power
            ax.loglog(span, amp * span**power, GUIDE_STYLE[guide], color="gray",
                      label=rf"$\sim t^{{{int(power)}}}$")
    ax.set_xlabel("t (kicks)")
    ax.set_ylabel("E(t)")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=160)
    plt.close(fig)
    return spec.out


def render_portrait(spec):
    """Scatter of (theta, p mod 2*pi) per seed; empty orbits are fine."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for path in spec.inputs:
        orbits = read_portrait_csv(path)
        for sid, (theta, p) in sorted(orbits.items()):
            ax.plot(theta, p, ",", color="navy", alpha=0.6)
    ax.set_xlim(-np.pi, np.pi)
    ax.set_ylim(0, 2 * np.pi)
    ax.set_xlabel(r"$\tilde\theta$")
    ax.set_ylabel(r"$\tilde p$ mod $2\pi$")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=160)
    plt.close(fig)
    return spec.out


def render_scaling(spec):
    """Measured t_c/t_s/E_s against the detuning with predicted-slope guides."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    markers = {"t_c": "o", "t_s": "^", "E_s": "s"}
    drew = False
    for path in spec.inputs:
        rows = read_results_csv(path)
        for name, (slope, style) in SCALING_GUIDES.items():
            pairs = [
                (row["tilde"], row[name])
                for row in rows
                if row.get("tilde") and row.get(name)
            ]
            if not pairs:
                continue
            drew = True
            tilde = np.array([p[0] for p in pairs])
            value = np.array([p[1] for p in pairs])
            order = np.argsort(tilde)
            tilde, value = tilde[order], value[order]
            ax.loglog(tilde, value, markers[name], ls="none", label=name)
            span = np.geomspace(tilde[0], tilde[-1], 20)
            anchor = value[len(value) // 2] / tilde[len(value) // 2] ** slope
            ax.loglog(span, anchor * span**slope, style, color="gray",
                      label=rf"$\sim\tilde\hbar^{{{slope:g}}}$")
    if not drew:
        raise FigureSpecError("results CSV holds no plottable t_c/t_s/E_s columns")
    ax.set_xlabel(r"$\tilde\hbar$")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=160)
    plt.close(fig)
    return spec.out


RENDERERS = {
    "energy-loglog": render_energy,
    "portrait": render_portrait,
    "scaling": render_scaling,
}


def render(spec):
    if isinstance(spec, (str, bytes)):
        spec = FigureSpec.from_file(spec)
    return RENDERERS[spec.kind](spec)
