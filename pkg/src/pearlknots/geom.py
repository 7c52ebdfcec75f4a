"""Inversive geometry kernel: points, round spheres, and sphere inversions.

Everything lives in the R^3 chart of the one-point compactification of
3-space; the point at infinity is never represented.  Maps that would
produce it raise PoleError instead.  All functions here are pure and safe
for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import PoleError

#: Pole guard: |x - center| below POLE_TOL * radius counts as hitting the pole.
POLE_TOL = 1e-12


def vec(x, y, z):
    """Make a point from three coordinates."""
    return np.array([float(x), float(y), float(z)])


def as_point(p):
    """Coerce p to a finite 3-vector (float64)."""
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


@dataclass(frozen=True, eq=False)
class Sphere:
    """Round 2-sphere given by center and positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_point(self.center).copy()
        c.setflags(write=False)
        r = float(self.radius)
        if not (r > 0.0 and np.isfinite(r)):
            raise ValueError(f"sphere radius must be positive and finite, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def contains(self, x, tol=0.0):
        """True if x lies in the closed ball bounded by this sphere, inflated by tol."""
        return float(np.linalg.norm(as_point(x) - self.center)) <= self.radius + tol

    def isclose(self, other, tol=1e-9):
        return (
            float(np.linalg.norm(self.center - other.center)) <= tol
            and abs(self.radius - other.radius) <= tol
        )

    def __repr__(self):
        cx, cy, cz = self.center
        return f"Sphere(({cx:.6g}, {cy:.6g}, {cz:.6g}), r={self.radius:.6g})"


def invert_point(m: Sphere, x) -> np.ndarray:
    """Reflect the point x through the sphere m.

    x maps to  c + r^2 (x - c) / |x - c|^2  where c, r are the mirror's
    center and radius.  Fixes m pointwise and is an involution.
    """
    x = as_point(x)
    v = x - m.center
    d2 = float(v @ v)
    if d2 <= (POLE_TOL * m.radius) ** 2:
        raise PoleError("point at the mirror center maps to infinity")
    return m.center + (m.radius * m.radius / d2) * v


def conformal_scale(m: Sphere, x) -> float:
    """Isotropic stretch factor r^2 / |x - c|^2 of inversion in m at x."""
    x = as_point(x)
    v = x - m.center
    d2 = float(v @ v)
    if d2 <= (POLE_TOL * m.radius) ** 2:
        raise PoleError("conformal scale undefined at the mirror center")
    return m.radius * m.radius / d2


def invert_jacobian(m: Sphere, x) -> np.ndarray:
    """Exact Jacobian matrix of invert_point at x.

    Equals conformal_scale(m, x) times the Householder reflection
    I - 2 vv^T/|v|^2, so its determinant is -scale^3.
    """
    x = as_point(x)
    v = x - m.center
    d2 = float(v @ v)
    if d2 <= (POLE_TOL * m.radius) ** 2:
        raise PoleError("Jacobian undefined at the mirror center")
    s = m.radius * m.radius / d2
    return s * (np.eye(3) - 2.0 * np.outer(v, v) / d2)


def invert_sphere(m: Sphere, s: Sphere) -> Sphere:
    """Image of the sphere s under inversion in m.

    With d^2 = |s.center - m.center|^2 and k = r_m^2 / (d^2 - r_s^2), the
    image has center  m.center + k (s.center - m.center)  and radius
    |k| r_s.  Raises PoleError when s passes through the mirror center
    (the image would be a plane, which signals invalid input here).
    """
    w = s.center - m.center
    d2 = float(w @ w)
    denom = d2 - s.radius * s.radius
    if abs(denom) <= POLE_TOL * m.radius * m.radius:
        raise PoleError("sphere through the mirror center maps to a plane")
    k = m.radius * m.radius / denom
    return Sphere(m.center + k * w, abs(k) * s.radius)


class Contact(Enum):
    """Mutual position of two spheres."""

    EXTERNALLY_TANGENT = "externally_tangent"
    DISJOINT = "disjoint"
    OVERLAPPING = "overlapping"
    NESTED = "nested"


class TangencyResult(NamedTuple):
    kind: Contact
    point: Optional[np.ndarray]  # set only for EXTERNALLY_TANGENT


def tangency(a: Sphere, b: Sphere, tol: float) -> TangencyResult:
    """Classify the contact of two spheres to tolerance tol.

    External tangency wins ties; the tangency point is returned on the
    center segment.  Internal tangency and containment both report NESTED.
    """
    w = b.center - a.center
    d = float(np.linalg.norm(w))
    s = a.radius + b.radius
    if abs(d - s) <= tol:
        p = a.center + (a.radius / d) * w
        return TangencyResult(Contact.EXTERNALLY_TANGENT, p)
    if d > s:
        return TangencyResult(Contact.DISJOINT, None)
    if d <= abs(a.radius - b.radius) + tol:
        return TangencyResult(Contact.NESTED, None)
    return TangencyResult(Contact.OVERLAPPING, None)
