"""Kick potentials on the circle: evaluation, forces, and symmetry classification.

All potentials are 2*pi-periodic functions of the angle theta, evaluated on
the fundamental domain [-pi, pi). The built-in family consists of three
piecewise-linear profiles (``va``, ``vb``, ``vc``) sharing the turning points
(-pi, -1) and (0, 1), a piecewise-quadratic profile (``vd``), and pure
cosine harmonics. The half-period shift antisymmetry V(theta) = -V(theta+pi)
is what decides the spreading regime near a resonance, so classification is
measured on a grid rather than trusted from the constructor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

SUPERBALLISTIC = "superballistic"
BALLISTIC = "ballistic"
EXPONENTIAL = "exponential"


def wrap_angle(theta):
    """Reduce angles mod 2*pi into [-pi, pi)."""
    return theta - TWO_PI * np.floor((theta + np.pi) / TWO_PI)


class PotentialError(ValueError):
    """Malformed potential definition (bad vertices, unknown name)."""


@dataclass(frozen=True)
class SymmetryTags:
    """Measured symmetry properties of a potential.

    shift_antisymmetric: V(theta) = -V(theta + pi)
    reflection_symmetric: V(theta) = V(-theta)
    kam: smooth (analytic) on the whole circle
    """

    shift_antisymmetric: bool
    reflection_symmetric: bool
    kam: bool


class Potential:
    """Base class: a named 2*pi-periodic potential with a force."""

    name = "potential"
    smooth = False  # analytic on the whole circle

    def evaluate(self, theta):
        raise NotImplementedError

    def force(self, theta):
        """f(theta) = -dV/dtheta."""
        raise NotImplementedError

    def __call__(self, theta):
        return self.evaluate(theta)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class PiecewiseLinear(Potential):
    """Linear interpolation through an ordered vertex list.

    Vertices are (theta, value) pairs with theta strictly increasing,
    starting exactly at -pi; the closure vertex at +pi takes the value of
    the -pi vertex so the profile is continuous across the seam. The force
    is piecewise constant; at a kink it takes the value of the segment to
    the right, which keeps runs bit-reproducible without affecting any
    ensemble statistic.
    """

    def __init__(self, vertices, name="piecewise"):
        vertices = [(float(t), float(v)) for t, v in vertices]
        if len(vertices) < 2:
            raise PotentialError("need at least two vertices")
        thetas = np.array([t for t, _ in vertices])
        values = np.array([v for _, v in vertices])
        if abs(thetas[0] + np.pi) > 1e-9:
            raise PotentialError("first vertex must sit at theta = -pi")
        thetas[0] = -np.pi
        if np.any(np.diff(thetas) <= 0):
            raise PotentialError("vertex angles must be strictly increasing")
        if thetas[-1] >= np.pi:
            raise PotentialError("vertices must lie in [-pi, pi)")
        self.name = name
        # closure vertex at +pi repeats the -pi value
        self._breaks = np.append(thetas, np.pi)
        self._values = np.append(values, values[0])
        self._slopes = np.diff(self._values) / np.diff(self._breaks)

    @property
    def vertices(self):
        return list(zip(self._breaks[:-1], self._values[:-1]))

    def evaluate(self, theta):
        th = wrap_angle(np.asarray(theta, dtype=float))
        return np.interp(th, self._breaks, self._values)

    def force(self, theta):
        th = wrap_angle(np.asarray(theta, dtype=float))
        idx = np.searchsorted(self._breaks, th, side="right") - 1
        idx = np.clip(idx, 0, len(self._slopes) - 1)
        return -self._slopes[idx]


class PiecewiseQuadratic(Potential):
    """The two-parabola profile: 1 - 2(theta/pi)^2 on [-pi, 0) and
    2(theta/pi - 1)^2 - 1 on [0, pi).

    Hard-coded closed form so the quadratic segments stay exact; it is
    shift-antisymmetric but non-smooth at 0 and +-pi.
    """

    name = "vd"

    def evaluate(self, theta):
        th = wrap_angle(np.asarray(theta, dtype=float))
        x = th / np.pi
        return np.where(th < 0.0, 1.0 - 2.0 * x * x, 2.0 * (x - 1.0) ** 2 - 1.0)

    def force(self, theta):
        th = wrap_angle(np.asarray(theta, dtype=float))
        # right-segment convention at the kinks (0 and -pi)
        return np.where(th < 0.0, 4.0 * th / np.pi**2, 4.0 * (np.pi - th) / np.pi**2)


class Cosine(Potential):
    """cos(m*theta); the only analytic (KAM) potentials in the library."""

    smooth = True

    def __init__(self, harmonic=1):
        m = int(harmonic)
        if m < 1:
            raise PotentialError("harmonic must be a positive integer")
        self.harmonic = m
        self.name = f"cos:{m}"

    def evaluate(self, theta):
        return np.cos(self.harmonic * np.asarray(theta, dtype=float))

    def force(self, theta):
        return self.harmonic * np.sin(self.harmonic * np.asarray(theta, dtype=float))


def va():
    """Triangle profile through (-pi, -1) and (0, 1); both symmetries."""
    return PiecewiseLinear([(-np.pi, -1.0), (0.0, 1.0)], name="va")


def vb(g=0.5):
    """Shoulder profile with extra vertices (-pi/2, g), (pi/2, -g).

    Shift-antisymmetric for any g but reflection-asymmetric for g != 0;
    g = 0 reduces to va.
    """
    return PiecewiseLinear(
        [(-np.pi, -1.0), (-np.pi / 2, g), (0.0, 1.0), (np.pi / 2, -g)],
        name="vb",
    )


def vc(g=0.5):
    """Shoulder profile with extra vertices (-pi/2, g), (pi/2, g).

    Reflection-symmetric but not shift-antisymmetric for g != 0;
    g = 0 reduces to va.
    """
    return PiecewiseLinear(
        [(-np.pi, -1.0), (-np.pi / 2, g), (0.0, 1.0), (np.pi / 2, g)],
        name="vc",
    )


def vd():
    return PiecewiseQuadratic()


def cosine(m=1):
    return Cosine(m)


def by_name(name, g=None, vertices=None):
    """Resolve a potential from its run-configuration name.

    Accepts ``va``, ``vb``, ``vc``, ``vd``, ``cos:<m>`` and ``custom``
    (which requires an explicit vertex list). ``g`` overrides the shoulder
    parameter of vb/vc.
    """
    key = name.strip().lower()
    if key == "va":
        return va()
    if key == "vb":
        return vb(0.5 if g is None else g)
    if key == "vc":
        return vc(0.5 if g is None else g)
    if key == "vd":
        return vd()
    if key.startswith("cos:"):
        return cosine(int(key.split(":", 1)[1]))
    if key == "cos":
        return cosine(1)
    if key == "custom":
        if not vertices:
            raise PotentialError("custom potential needs a vertex list")
        return PiecewiseLinear(vertices, name="custom")
    raise PotentialError(f"unknown potential {name!r}")


def classify_symmetries(potential, points=4096, tol=1e-12):
    """Measure the symmetry tags on a dense grid.

    The two reflection/shift tags are numerical (max deviation below tol on
    ``points`` samples); smoothness is structural, since the piecewise kinds
    are non-analytic at their vertices by construction.
    """
    theta = -np.pi + TWO_PI * np.arange(points) / points
    v = potential.evaluate(theta)
    v_shift = potential.evaluate(wrap_angle(theta + np.pi))
    v_mirror = potential.evaluate(wrap_angle(-theta))
    return SymmetryTags(
        shift_antisymmetric=bool(np.max(np.abs(v + v_shift)) < tol),
        reflection_symmetric=bool(np.max(np.abs(v - v_mirror)) < tol),
        kam=bool(potential.smooth),
    )


def predict_regime(tags):
    """Spreading regime expected near a resonance hbar ~ 2*pi*M/N.

    Shift antisymmetry creates the slow structure along the angle axis of
    the limit map; with a non-smooth potential that structure feeds cubic
    (superballistic) energy growth, with a smooth one it turns into
    exponential spreading, and without the symmetry spreading stays
    ballistic.
    """
    if tags.shift_antisymmetric and not tags.kam:
        return SUPERBALLISTIC
    if tags.shift_antisymmetric and tags.kam:
        return EXPONENTIAL
    return BALLISTIC
