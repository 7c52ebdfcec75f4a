"""Pearl necklaces: validation, canonical constructions, and template knots.

A necklace is a cyclic chain of n >= 3 round spheres in which consecutive
pearls are externally tangent and all other pairs are disjoint with a
positive margin.  Joining the tangency points in cyclic order gives the
polygonal template knot; straight chart segments stand in for spherical
geodesics, which does not change the isotopy class for configurations
away from infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    NotDisjoint,
    NotTangent,
    PoleRisk,
    TooFewPearls,
    UnequalEdges,
)
from .geom import POLE_TOL, Contact, Sphere, as_point, tangency

#: Non-consecutive pearls must clear each other by at least this many tols.
DISJOINT_MARGIN = 10.0


@dataclass(frozen=True, eq=False)
class PolygonalKnot:
    """Closed polyline through cyclically ordered vertices."""

    vertices: np.ndarray  # (m, 3)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (m, 3), got {v.shape}")
        if len(v) < 3:
            raise ValueError("a polygonal knot needs at least 3 vertices")
        gaps = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(gaps == 0.0):
            raise ValueError("consecutive vertices must be distinct")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    def edge_lengths(self):
        return np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)


@dataclass(frozen=True, eq=False)
class Necklace:
    """Validated cyclic chain of tangent pearls.

    Pearl labels are 1-based throughout the package: label j refers to
    pearls[j - 1], and tangency_points[i] is where pearls i+1 and i+2
    (cyclically) touch.
    """

    pearls: tuple
    tangency_points: np.ndarray  # (n, 3)
    tol: float

    @property
    def n(self):
        return len(self.pearls)

    @cached_property
    def centers(self):
        c = np.array([p.center for p in self.pearls])
        c.setflags(write=False)
        return c

    @cached_property
    def radii(self):
        r = np.array([p.radius for p in self.pearls])
        r.setflags(write=False)
        return r

    def __repr__(self):
        return f"Necklace(n={self.n}, tol={self.tol:.1e})"


def validate(pearls, tol: float = 1e-9) -> Necklace:
    """Check the necklace axioms and return a Necklace with tangency points.

    Raises NotTangent(i) if pearls i, i+1 are not externally tangent,
    NotDisjoint(i, j) if a non-consecutive pair intersects or nests (a gap
    of at least 10*tol is required so that reflected copies stay separated
    at every stage), TooFewPearls, and PoleRisk(i, j) if pearl j passes
    through pearl i's center, which would blow up later reflections.
    """
    pearls = tuple(pearls)
    n = len(pearls)
    if n < 3:
        raise TooFewPearls(n)
    for p in pearls:
        if not isinstance(p, Sphere):
            raise TypeError(f"expected Sphere, got {type(p).__name__}")

    points = []
    for i in range(n):
        res = tangency(pearls[i], pearls[(i + 1) % n], tol)
        if res.kind is not Contact.EXTERNALLY_TANGENT:
            raise NotTangent(i + 1, detail=res.kind.value)
        points.append(res.point)

    centers = np.array([p.center for p in pearls])
    radii = np.array([p.radius for p in pearls])
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            d = float(np.linalg.norm(centers[j] - centers[i]))
            gap = d - (radii[i] + radii[j])
            if gap < DISJOINT_MARGIN * tol:
                raise NotDisjoint(i + 1, j + 1, gap)

    # A pearl through another pearl's center cannot occur once the checks
    # above pass at tight tol, but sloppy tolerances can sneak one in.
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d2 = float(np.sum((centers[j] - centers[i]) ** 2))
            if abs(d2 - radii[j] * radii[j]) <= POLE_TOL * radii[i] * radii[i]:
                raise PoleRisk(i + 1, j + 1)

    tp = np.array(points)
    tp.setflags(write=False)
    return Necklace(pearls, tp, float(tol))


def unknot_necklace(n: int, R: float = 1.0, tol: float = 1e-9) -> Necklace:
    """Symmetric circular necklace: n pearls of radius R*sin(pi/n) centered
    at angles 2*pi*m/n on the circle of radius R in the xy-plane.

    Its limit set is the round circle of radius R*cos(pi/n) (every pearl is
    orthogonal to the sphere of that radius about the origin), the tame case
    against which wild templates are contrasted.
    """
    if n < 3:
        raise TooFewPearls(n)
    if R <= 0:
        raise ValueError("R must be positive")
    r = R * np.sin(np.pi / n)
    ang = 2.0 * np.pi * np.arange(n) / n
    pearls = [
        Sphere(np.array([R * np.cos(a), R * np.sin(a), 0.0]), r) for a in ang
    ]
    return validate(pearls, tol)


def necklace_from_polygon(knot: PolygonalKnot, tol: float = 1e-9) -> Necklace:
    """Necklace around an equal-edge closed polyline.

    One pearl per edge, with radius L/2 (half the common edge length): the
    pearl for vertex v is centered at v, so consecutive pearls meet exactly
    at the edge midpoints, which become the tangency points.  Edges must
    all have length L within tol or UnequalEdges is raised; the polygon's
    non-adjacent edges must clear each other by more than L or validation
    fails.
    """
    lengths = knot.edge_lengths()
    L = float(np.mean(lengths))
    spread = float(np.max(np.abs(lengths - L)))
    if spread > tol:
        raise UnequalEdges(spread, tol)
    pearls = [Sphere(v, L / 2.0) for v in knot.vertices]
    return validate(pearls, tol)


def template(nk: Necklace) -> PolygonalKnot:
    """Polygonal template knot: tangency points joined in cyclic pearl order."""
    return PolygonalKnot(np.asarray(nk.tangency_points))


def resample_equal_chords(points, m: int, tol: float = 1e-9) -> np.ndarray:
    """Resample a closed polyline into m points with equal consecutive chords.

    The chord length is found by bisection on the signed parameter overshoot
    after walking m chords from the start point; each chord endpoint is
    located by bisection within the first polyline segment whose far vertex
    reaches the target distance (the distance to a point is convex along a
    segment, so the first such vertex brackets the first crossing).
    Converges to |overshoot| <= tol.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 4:
        raise ValueError("need a dense (N, 3) closed polyline")
    if m < 3:
        raise ValueError("m must be at least 3")
    if np.linalg.norm(pts[0] - pts[-1]) > 0:
        pts = np.vstack([pts, pts[0]])
    seg = np.diff(pts, axis=0)
    seglen = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = float(cum[-1])

    def point_at(s):
        s = s % total
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), len(seg) - 1)
        t = (s - cum[i]) / seglen[i]
        return pts[i] + t * seg[i]

    def advance(s, c):
        """Smallest s' > s with |point_at(s') - point_at(s)| = c (absolute s)."""
        base = s % total
        p0 = point_at(base)
        # Scan vertices ahead of base, wrapping once; unwrapped arclengths.
        i0 = int(np.searchsorted(cum, base, side="right"))
        idx = np.concatenate([np.arange(i0, len(pts)), np.arange(1, i0)])
        svals = np.concatenate([cum[i0:], total + cum[1:i0]])
        d = np.linalg.norm(pts[idx] - p0, axis=1)
        hit = np.nonzero(d >= c)[0]
        if len(hit) == 0:
            raise ValueError("chord longer than the curve diameter")
        k = int(hit[0])
        s_hi = float(svals[k])
        s_lo = base if k == 0 else float(svals[k - 1])
        # Distance to p0 is convex along each segment, so the bracket holds
        # exactly one crossing; bisect it down.
        for _ in range(200):
            mid = 0.5 * (s_lo + s_hi)
            if float(np.linalg.norm(point_at(mid) - p0)) < c:
                s_lo = mid
            else:
                s_hi = mid
            if s_hi - s_lo <= tol * 1e-3:
                break
        return s + (0.5 * (s_lo + s_hi) - base)

    def overshoot(c):
        s = 0.0
        for _ in range(m):
            s = advance(s, c)
        return s - total

    lo, hi = 0.5 * total / m, 1.5 * total / m
    while overshoot(hi) < 0:
        hi *= 1.3
    while overshoot(lo) > 0:
        lo *= 0.7
    c = 0.5 * (lo + hi)
    for _ in range(200):
        err = overshoot(c)
        if abs(err) <= tol:
            break
        if err < 0:
            lo = c
        else:
            hi = c
        c = 0.5 * (lo + hi)
    out = np.empty((m, 3))
    s = 0.0
    for i in range(m):
        out[i] = point_at(s)
        s = advance(s, c)
    return out


def torus_knot_polyline(
    p: int,
    q: int,
    major: float,
    minor: float,
    samples: int,
    phase: float = 0.0,
    dense: int = 20000,
    tol: float = 1e-9,
) -> PolygonalKnot:
    """Equal-chord polyline on the (p, q) torus knot.

    The knot winds p times around the torus axis and q times around the
    tube; (2, 3) gives a trefoil.  A nonzero phase offsets the start point,
    which also breaks the round curve's rotational symmetries in the
    sampled vertex set.
    """
    t = phase + 2.0 * np.pi * np.arange(dense) / dense
    rad = major + minor * np.cos(q * t)
    curve = np.column_stack([rad * np.cos(p * t), rad * np.sin(p * t), minor * np.sin(q * t)])
    return PolygonalKnot(resample_equal_chords(curve, samples, tol))
