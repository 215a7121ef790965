"""Run configuration: parsing, validation, and horizon/grid resolution.

A run is described by a flat key=value text file (``#`` comments allowed)
with command-line overrides layered on top. Validation happens before any
computation; every violated invariant is named. ``steps=auto`` sizes the
horizon from the saturation estimate (and, for quantum runs of
superballistic potentials, from the crossover estimate via the measured
ballistic coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import potentials as pots
from .pseudoclassical import RescaledParams, saturation_estimates
from .quantum import PlanckSpec, ballistic_coefficient, default_grid_size

ENGINES = ("quantum", "pseudoclassical", "both")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the violated invariant."""


@dataclass
class RunConfig:
    engine: str = "both"
    potential: str = "va"
    g: float | None = None
    vertices: str | None = None  # custom potential: "theta:value,theta:value,..."
    K: float = 5.0
    M: int = 1
    N: int = 1
    tilde: float = 1e-3
    steps: int | str = "auto"
    record: int | str = "log"  # "log" (powers of 1.1) or a fixed integer stride
    ensemble: int = 10_000
    stratified: bool = False
    grid: int | None = None  # half grid size J override
    seed: int = 0
    out: str | None = None

    def planck(self):
        try:
            return PlanckSpec(self.M, self.N, self.tilde)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def make_potential(self):
        verts = None
        if self.vertices:
            verts = parse_vertices(self.vertices)
        try:
            return pots.by_name(self.potential, g=self.g, vertices=verts)
        except (pots.PotentialError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def validate(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if not self.K > 0:
            raise ConfigError("kick strength K must be positive")
        self.planck()
        self.make_potential()
        if isinstance(self.steps, str) and self.steps != "auto":
            raise ConfigError(f"steps must be an integer or 'auto', got {self.steps!r}")
        if isinstance(self.steps, int) and self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.steps == "auto" and self.tilde == 0.0:
            raise ConfigError("steps=auto needs tilde != 0; give steps explicitly")
        if isinstance(self.record, str) and self.record != "log":
            raise ConfigError("record must be 'log' or an integer stride")
        if isinstance(self.record, int) and self.record < 1:
            raise ConfigError("record stride must be >= 1")
        if self.ensemble < 2:
            raise ConfigError("ensemble size must be >= 2")
        if self.grid is not None and self.grid < 2:
            raise ConfigError("grid override J must be >= 2")
        return self

    def resolve_steps(self):
        """Concrete kick count for this run (resolves steps=auto)."""
        if isinstance(self.steps, int):
            return self.steps
        planck = self.planck()
        params = RescaledParams.from_planck(self.K, planck)
        t_s, _ = saturation_estimates(params)
        if self.engine == "pseudoclassical":
            return int(np.ceil(3.5 * t_s))
        if self.engine == "both":
            return int(np.ceil(1.6 * t_s))
        # quantum: far enough past the crossover to fit the cubic stage
        potential = self.make_potential()
        tags = pots.classify_symmetries(potential)
        if pots.predict_regime(tags) == pots.SUPERBALLISTIC:
            D = ballistic_coefficient(potential, self.K, planck, J=self.resolve_grid())
            t_c = 3.0 * np.pi**4 * planck.hbar * D / (16.0 * self.K**3 * abs(self.tilde))
            return int(min(max(16.0 * t_c, 400.0), np.ceil(0.85 * t_s)))
        return int(np.ceil(0.8 * t_s))

    def resolve_grid(self):
        if self.grid is not None:
            return self.grid
        if self.tilde == 0.0:
            raise ConfigError("grid size is not derivable at tilde = 0; set grid=J")
        return default_grid_size(self.planck())

    def record_times(self, steps):
        from .series import log_record_times

        if self.record == "log":
            return log_record_times(steps)
        return np.arange(0, steps + 1, self.record)

    def stride_label(self):
        return "log1.1" if self.record == "log" else str(self.record)


def parse_vertices(text):
    """Parse 'theta:value,theta:value,...' into an ordered vertex list."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            theta, _, value = chunk.partition(":")
            out.append((float(theta), float(value)))
        except ValueError:
            raise ConfigError(f"bad vertex {chunk!r}; expected theta:value") from None
    if not out:
        raise ConfigError("empty vertex list")
    return out


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}


def _coerce(name, raw):
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    raw = raw.strip()
    if name in ("M", "N", "ensemble", "seed"):
        return int(raw)
    if name in ("K", "tilde"):
        return float(raw)
    if name == "g":
        return None if raw.lower() in ("", "none") else float(raw)
    if name == "grid":
        return None if raw.lower() in ("", "none") else int(raw)
    if name == "stratified":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"stratified must be a boolean, got {raw!r}")
    if name in ("steps", "record"):
        return raw if raw == "log" or raw == "auto" else int(raw)
    return raw


def load_config(path=None, overrides=None):
    """Build a RunConfig from an optional file plus key=value overrides."""
    values = {}
    if path is not None:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, raw = line.partition("=")
                values[key.strip()] = _coerce(key.strip(), raw)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, _, raw = item.partition("=")
        values[key.strip()] = _coerce(key.strip(), raw)
    config = RunConfig(**values)
    config.validate()
    return config


def run_meta(config, engine, steps, J=None):
    """Metadata header for an emitted series, in canonical key order.

    The header must reconstruct a config that reproduces the run, so it
    carries every field the engines read.
    """
    meta = {"engine": engine, "potential": config.potential}
    if config.potential in ("vb", "vc"):
        meta["g"] = 0.5 if config.g is None else config.g
    if config.vertices:
        meta["vertices"] = config.vertices
    meta.update(K=config.K, M=config.M, N=config.N, tilde=config.tilde)
    if engine == "quantum":
        meta["J"] = J
    else:
        meta["size"] = config.ensemble
        meta["stratified"] = config.stratified
    meta["seed"] = config.seed
    meta["stride"] = config.stride_label()
    meta["steps"] = steps
    return meta


def config_from_meta(meta):
    """Reconstruct the single-engine RunConfig encoded in a CSV header."""
    engine = meta.get("engine")
    if engine not in ("quantum", "pseudoclassical"):
        raise ConfigError(f"metadata names no known engine: {engine!r}")
    stride = meta.get("stride", "log1.1")
    record = "log" if str(stride).startswith("log") else int(stride)
    config = RunConfig(
        engine=engine,
        potential=str(meta.get("potential", "va")),
        g=float(meta["g"]) if "g" in meta else None,
        vertices=str(meta["vertices"]) if "vertices" in meta else None,
        K=float(meta["K"]),
        M=int(meta["M"]),
        N=int(meta["N"]),
        tilde=float(meta["tilde"]),
        steps=int(meta["steps"]),
        record=record,
        seed=int(meta.get("seed", 0)),
    )
    if engine == "quantum" and "J" in meta:
        config.grid = int(meta["J"])
    if engine == "pseudoclassical":
        if "size" in meta:
            config.ensemble = int(meta["size"])
        config.stratified = str(meta.get("stratified", "false")).lower() == "true"
    return config.validate()
