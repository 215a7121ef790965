"""Energy time series and their CSV wire format.

A series is the record of E(t) over kick counts, with the run parameters
carried as metadata. On disk: ``# key=value`` header lines, a ``t,E``
column header, then one row per record. Floats are written with shortest
round-trip repr so identical runs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EnergySeries:
    """E(t) records at strictly increasing kick counts t."""

    t: np.ndarray
    E: np.ndarray
    meta: dict = field(default_factory=dict)
    stderr: np.ndarray | None = None  # Monte-Carlo standard error, in-memory only

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.int64)
        self.E = np.asarray(self.E, dtype=float)
        if self.t.shape != self.E.shape:
            raise ValueError("t and E must have the same length")
        if len(self.t) and np.any(np.diff(self.t) <= 0):
            raise ValueError("t must be strictly increasing")
        if len(self.E) and np.any(self.E < 0):
            raise ValueError("energies must be nonnegative")

    def __len__(self):
        return len(self.t)

    def window(self, t_lo, t_hi):
        """Records with t_lo <= t <= t_hi (stderr, if any, sliced along)."""
        mask = (self.t >= t_lo) & (self.t <= t_hi)
        err = self.stderr[mask] if self.stderr is not None else None
        return EnergySeries(self.t[mask], self.E[mask], dict(self.meta), err)


def _format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse_value(s):
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def write_csv(series, path):
    with open(path, "w", newline="\n") as fh:
        for key, value in series.meta.items():
            fh.write(f"# {key}={_format_value(value)}\n")
        fh.write("t,E\n")
        for t, e in zip(series.t, series.E):
            fh.write(f"{int(t)},{repr(float(e))}\n")


def read_csv(path):
    meta = {}
    ts = []
    es = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = _parse_value(value.strip())
                continue
            if line == "t,E":
                continue
            t_str, _, e_str = line.partition(",")
            ts.append(int(t_str))
            es.append(float(e_str))
    return EnergySeries(np.array(ts, dtype=np.int64), np.array(es), meta)


def log_record_times(steps, base=1.1):
    """Logarithmic recording grid: powers of ``base`` rounded to integers,
    deduplicated, always including 0, 1 and the final step."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    ts = [0, 1]
    x = 1.0
    while x <= steps:
        ts.append(int(round(x)))
        x *= base
    ts.append(steps)
    return np.unique(np.clip(np.array(ts, dtype=np.int64), 0, steps))
