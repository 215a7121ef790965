"""Figure specifications and the CSV schemas they reference.

A figure spec is a small JSON file:

    {
      "kind": "energy-loglog" | "portrait" | "scaling",
      "inputs": ["run.quantum.csv", "run.pseudoclassical.csv"],
      "guides": ["t2", "t3"],
      "out": "figure.png"
    }

The renderer only ever reads the documented CSV formats: energy series
(``# key=value`` header lines then ``t,E`` rows), phase portraits
(``seed_id,t,theta,p`` rows), and sweep results (one header row naming the
columns, which must include ``tilde`` plus whichever of ``t_c``, ``t_s``,
``E_s`` are being plotted).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

KINDS = ("energy-loglog", "portrait", "scaling")


class FigureSpecError(ValueError):
    """Bad figure spec or input file not matching its schema."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    out: str
    guides: list = field(default_factory=list)
    title: str = ""

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FigureSpecError(f"cannot read figure spec {path}: {exc}") from None
        return cls.from_dict(raw, base=os.path.dirname(os.path.abspath(path)))

    @classmethod
    def from_dict(cls, raw, base="."):
        try:
            kind = raw["kind"]
            inputs = list(raw["inputs"])
            out = raw["out"]
        except (KeyError, TypeError) as exc:
            raise FigureSpecError(f"figure spec needs kind/inputs/out: {exc}") from None
        if kind not in KINDS:
            raise FigureSpecError(f"kind must be one of {KINDS}, got {kind!r}")
        if not inputs:
            raise FigureSpecError("inputs list is empty")
        inputs = [p if os.path.isabs(p) else os.path.join(base, p) for p in inputs]
        out = out if os.path.isabs(out) else os.path.join(base, out)
        spec = cls(
            kind=kind,
            inputs=inputs,
            out=out,
            guides=list(raw.get("guides", [])),
            title=str(raw.get("title", "")),
        )
        spec.validate()
        return spec

    def validate(self):
        for path in self.inputs:
            if not os.path.exists(path):
                raise FigureSpecError(f"input CSV does not exist: {path}")
        return self


def read_energy_csv(path):
    """Energy series: metadata dict plus (t, E) arrays."""
    meta = {}
    ts, es = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            if line == "t,E":
                continue
            try:
                t_str, e_str = line.split(",")
                ts.append(int(t_str))
                es.append(float(e_str))
            except ValueError:
                raise FigureSpecError(f"{path}: bad energy row {line!r}") from None
    if not ts:
        raise FigureSpecError(f"{path}: no energy records")
    return meta, np.array(ts), np.array(es)


def read_portrait_csv(path):
    """Phase portrait: {seed_id: (theta, p)} arrays (may be empty)."""
    orbits = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("seed_id"):
                continue
            try:
                sid, _, theta, p = line.split(",")
                orbits.setdefault(int(sid), []).append((float(theta), float(p)))
            except ValueError:
                raise FigureSpecError(f"{path}: bad portrait row {line!r}") from None
    return {
        sid: (np.array([q[0] for q in pts]), np.array([q[1] for q in pts]))
        for sid, pts in orbits.items()
    }


def read_results_csv(path):
    """Sweep results: list of row dicts with numeric coercion where possible."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if "tilde" not in header:
            raise FigureSpecError(f"{path}: results CSV must have a tilde column")
        for line in fh:
            cells = line.rstrip("\n").split(",")
            row = {}
            for key, cell in zip(header, cells):
                if cell == "":
                    row[key] = None
                    continue
                try:
                    row[key] = float(cell)
                except ValueError:
                    row[key] = cell
            rows.append(row)
    if not rows:
        raise FigureSpecError(f"{path}: no result rows")
    return rows
