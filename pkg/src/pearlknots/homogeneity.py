"""Homogeneity maps realized on the limit set.

Any point of the limit set can be carried to any other by a
homeomorphism of the whole set: in coordinates the map is just the
rotation theta -> theta + delta, conjugated back through the coding.
Group elements themselves move limit points within a dense orbit, and the
symmetric circular necklace additionally admits honest rigid-motion
symmetries; all three flavors live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .coding import (
    address_from_coordinate,
    coordinate_of_point,
    locate,
    point_from_coordinate,
)
from .errors import NotInLimit
from .geom import as_point, invert_jacobian, invert_point
from .necklace import Necklace
from .orbit import stage_count


def group_move(nk: Necklace, word, x) -> np.ndarray:
    """Apply the word map (leftmost letter outermost) to the point x.

    The word need not be reduced; repeated letters cancel as involutions.
    Maps the limit set into itself.
    """
    y = as_point(x)
    for j in reversed(tuple(word)):
        y = invert_point(nk.pearls[j - 1], y)
    return y


def word_jacobian(nk: Necklace, word, x) -> np.ndarray:
    """Exact Jacobian of the word map at x, by the chain rule.

    Its determinant has sign (-1)^len(word): even words preserve
    orientation, odd words reverse it.
    """
    y = as_point(x)
    jac = np.eye(3)
    for j in reversed(tuple(word)):
        mirror = nk.pearls[j - 1]
        jac = invert_jacobian(mirror, y) @ jac
        y = invert_point(mirror, y)
    return jac


@dataclass(frozen=True, eq=False)
class LambdaHomeo:
    """Limit-set self-map sending p to q: rotation by delta in the cyclic
    coordinate, evaluated at stage-`depth` resolution."""

    necklace: Necklace = field(repr=False)
    source: np.ndarray
    target: np.ndarray
    delta: Fraction
    depth: int

    def coordinate_map(self, theta) -> Fraction:
        return (Fraction(theta) + self.delta) % 1

    def __call__(self, x) -> np.ndarray:
        th = coordinate_of_point(self.necklace, x, self.depth)
        return point_from_coordinate(self.necklace, self.coordinate_map(th), self.depth)


def lambda_homeo(nk: Necklace, p, q, depth: int, tol: float = None) -> LambdaHomeo:
    """Build the coordinate-rotation homeomorphism of the limit set with
    h(p) = q up to stage-`depth` resolution.

    Both points must locate to the given depth (NotInLimit otherwise);
    tangency points use their exact shared-endpoint coordinate, so deltas
    compose exactly: delta(p, q) + delta(q, r) = delta(p, r) mod 1.
    """
    tp = coordinate_of_point(nk, p, depth, tol)
    tq = coordinate_of_point(nk, q, depth, tol)
    return LambdaHomeo(nk, as_point(p), as_point(q), (tq - tp) % 1, depth)


@dataclass(frozen=True, eq=False)
class HomeoReport:
    """verify_homeo outcome: membership, injectivity, surjectivity at the
    coarsest stage resolvable by the sample count, and adjacency."""

    samples: int
    depth: int
    membership_failures: int
    injective: bool
    surjective_stage: int
    surjective: bool
    order_preserved: bool
    max_gap_distortion: float

    @property
    def membership_ok(self):
        return self.membership_failures == 0

    @property
    def all_passed(self):
        return (
            self.membership_ok
            and self.injective
            and self.surjective
            and self.order_preserved
        )


def verify_homeo(nk: Necklace, h, samples: int) -> HomeoReport:
    """Exercise a limit-set self-map on deterministically sampled points.

    Sample coordinates follow the golden-ratio low-discrepancy sequence
    theta_i = (1/2 + i (sqrt 5 - 1)/2) mod 1, realized as stage-depth
    representative points.  Checks: (a) images stay within stage-depth
    resolution of the limit set; (b) distinct sample addresses map to
    distinct image addresses; (c) image coordinates hit every interval of
    the finest stage whose interval count does not exceed the sample count;
    (d) coordinate gaps between adjacent samples are preserved within twice
    the stage-depth interval width, with cyclic order intact.
    """
    depth = h.depth
    n = nk.n
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    thetas = [Fraction((0.5 + i * golden) % 1.0) for i in range(samples)]
    xs = [point_from_coordinate(nk, t, depth) for t in thetas]

    src_thetas = []
    src_addrs = []
    img_thetas = []
    img_addrs = []
    membership_failures = 0
    for x in xs:
        sa = locate(nk, x, depth)[0]
        st = coordinate_of_point(nk, x, depth)
        y = h(x)
        try:
            ia = locate(nk, y, depth)[0]
            it = coordinate_of_point(nk, y, depth)
        except NotInLimit:
            membership_failures += 1
            continue
        src_addrs.append(sa)
        src_thetas.append(st)
        img_addrs.append(ia)
        img_thetas.append(it)

    mapping = {}
    consistent = True
    for sa, ia in zip(src_addrs, img_addrs):
        if sa in mapping and mapping[sa] != ia:
            consistent = False
        mapping[sa] = ia
    injective = consistent and len(set(mapping.values())) == len(mapping)

    surj_stage = 1
    while stage_count(n, surj_stage + 1) <= len(img_thetas):
        surj_stage += 1
    coarse = stage_count(n, surj_stage)
    hit = {int(t * coarse) for t in img_thetas}
    surjective = len(hit) == coarse

    order = np.argsort([float(t) for t in src_thetas], kind="stable")
    img_seq = [img_thetas[i] for i in order]
    src_seq = [src_thetas[i] for i in order]
    m = len(img_seq)
    width = Fraction(1, stage_count(n, depth))
    descents = 0
    max_distortion = Fraction(0)
    for i in range(m):
        a, b = img_seq[i], img_seq[(i + 1) % m]
        if b < a:
            descents += 1
        img_gap = (b - a) % 1
        src_gap = (src_seq[(i + 1) % m] - src_seq[i]) % 1
        distortion = abs(img_gap - src_gap)
        if distortion > max_distortion:
            max_distortion = distortion
    order_preserved = descents <= 1 and max_distortion <= 2 * width

    return HomeoReport(
        samples=samples,
        depth=depth,
        membership_failures=membership_failures,
        injective=injective,
        surjective_stage=surj_stage,
        surjective=surjective,
        order_preserved=order_preserved,
        max_gap_distortion=float(max_distortion),
    )


@dataclass(frozen=True, eq=False)
class RigidMap:
    """Isometry of 3-space permuting the pearls: label j maps to
    shift + j (forward) or shift - j (reversed), 1-based mod n."""

    matrix: np.ndarray  # (3, 3) orthogonal
    translation: np.ndarray  # (3,)
    shift: int
    reverses: bool

    def apply(self, x):
        pts = np.asarray(x, dtype=float)
        return pts @ self.matrix.T + self.translation

    def label_map(self, j: int, n: int) -> int:
        img = self.shift - j if self.reverses else self.shift + j
        return (img - 1) % n + 1

    @property
    def is_identity(self):
        return not self.reverses and self.shift == 0


def _kabsch(P, Q):
    """Proper rotation R and translation t minimizing |R P + t - Q|."""
    mu = P.mean(axis=0)
    nu = Q.mean(axis=0)
    H = (P - mu).T @ (Q - nu)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    return R, nu - R @ mu


def stage_symmetries(nk: Necklace, tol: float = 1e-6) -> list:
    """Rigid motions of 3-space preserving the necklace as a labeled cycle.

    Tries all 2n dihedral pearl permutations (cyclic shifts, forward and
    reversed) and keeps those realized by a rigid motion within tol.  The
    symmetric circular necklace yields all 2n; a generic necklace only the
    identity.  Every surviving map permutes each stage's pearl set.
    """
    n = nk.n
    C = np.asarray(nk.centers)
    r = np.asarray(nk.radii)
    scale = max(1.0, float(np.ptp(C)) + float(r.max()))
    maps = []
    for reverses in (False, True):
        for s in range(n):
            # perm[i] is the 0-based index of label_map(i + 1, n).
            if reverses:
                perm = [(s - i - 2) % n for i in range(n)]
            else:
                perm = [(s + i) % n for i in range(n)]
            if np.max(np.abs(r - r[perm])) > tol * scale:
                continue
            R, t = _kabsch(C, C[perm])
            resid = float(np.max(np.linalg.norm(C @ R.T + t - C[perm], axis=1)))
            if resid <= tol * scale:
                maps.append(RigidMap(R, t, s, reverses))
    return maps
