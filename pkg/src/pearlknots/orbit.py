"""Reflection-orbit engine over a validated necklace.

Stage-k pearls are indexed by reduced words ("addresses") in the pearl
labels 1..n: the pearl of address w = j1..jk is the image of ball j_k
under the reflections j1..j_{k-1}, applied leftmost-outermost.  The engine
never composes word maps explicitly.  Each tree node carries the image of
the whole base necklace under its word map; descending into child j
inverts that configuration in its own j-th sphere, which is exactly the
conjugation identity  W o I_j = I_{W(S_j)} o W.  One sphere inversion per
child, constant work per node.

Canonical order is lexicographic by address (schedule-independent); the
geometric cyclic order lives in the coding module.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, EmptyCloud, PoleError
from .geom import POLE_TOL, Sphere, as_point
from .necklace import Necklace

DEFAULT_BUDGET = 10_000_000
MAX_DEPTH_LIMIT = 500


class _Frame(NamedTuple):
    """Image of the full base necklace under one word map."""

    centers: np.ndarray  # (n, 3)
    radii: np.ndarray  # (n,)


def _root_frame(nk: Necklace) -> _Frame:
    return _Frame(nk.centers, nk.radii)


def _descend(frame: _Frame, j: int) -> _Frame:
    """Invert the whole configuration in its own sphere j (1-based)."""
    c = frame.centers[j - 1]
    r = frame.radii[j - 1]
    v = frame.centers - c
    d2 = np.einsum("ij,ij->i", v, v)
    denom = d2 - frame.radii * frame.radii
    # Row j has denom = -r^2 and lands on k = -1: the mirror sphere is fixed.
    if np.min(np.abs(denom)) <= POLE_TOL * r * r:
        raise PoleError("configuration sphere through a mirror center")
    k = (r * r) / denom
    return _Frame(c + k[:, None] * v, np.abs(k) * frame.radii)


def _frame_at(nk: Necklace, address) -> _Frame:
    frame = _root_frame(nk)
    for j in address:
        frame = _descend(frame, j)
    return frame


def check_address(nk: Necklace, address) -> tuple:
    """Validate a reduced word in the labels 1..n and return it as a tuple."""
    w = tuple(int(j) for j in address)
    for j in w:
        if not 1 <= j <= nk.n:
            raise ValueError(f"letter {j} outside 1..{nk.n}")
    for a, b in zip(w, w[1:]):
        if a == b:
            raise ValueError(f"word {w} is not reduced (repeated letter {a})")
    return w


@dataclass(frozen=True, eq=False)
class PearlNode:
    """One pearl of the orbit tree: a reduced word and its ball."""

    address: tuple
    ball: Sphere
    _frame: Optional[_Frame] = field(default=None, repr=False, compare=False)

    @property
    def depth(self):
        return len(self.address)

    @property
    def parity(self):
        """Chirality of the template copy drawn through this pearl.

        The ball of address j1..jk is carried by k-1 reflections, so the
        copy is a mirror image exactly when k-1 is odd.
        """
        return "mirror" if (len(self.address) - 1) % 2 == 1 else "plain"


@dataclass(frozen=True, eq=False)
class StageNecklace:
    """All pearls of one stage, in lexicographic address order."""

    k: int
    nodes: tuple

    def __len__(self):
        return len(self.nodes)

    @property
    def addresses(self):
        return [nd.address for nd in self.nodes]

    def centers(self):
        return np.array([nd.ball.center for nd in self.nodes])

    def radii(self):
        return np.array([nd.ball.radius for nd in self.nodes])


@dataclass(frozen=True, eq=False)
class LimitCloud:
    """Centers of pruned orbit balls: an epsilon-approximation of the limit set.

    When capped == 0 every point is the center of a ball of radius below
    epsilon that meets the limit set, hence lies within epsilon of it.
    Depth-capped leaves are kept in the cloud and counted, never dropped.
    """

    points: np.ndarray  # (N, 3)
    epsilon: float
    capped: int = 0

    def __len__(self):
        return len(self.points)


def stage_count(n: int, k: int) -> int:
    """Number of stage-k pearls: n (n-1)^(k-1)."""
    return n * (n - 1) ** (k - 1)


def children(nk: Necklace, node: Optional[PearlNode] = None) -> list:
    """Child pearls of a node; for the root (node=None), the n stage-1 pearls."""
    if node is None:
        frame = _root_frame(nk)
        return [
            PearlNode((j,), nk.pearls[j - 1], _descend(frame, j))
            for j in range(1, nk.n + 1)
        ]
    frame = node._frame if node._frame is not None else _frame_at(nk, node.address)
    last = node.address[-1]
    out = []
    for j in range(1, nk.n + 1):
        if j == last:
            continue
        ball = Sphere(frame.centers[j - 1], frame.radii[j - 1])
        out.append(PearlNode(node.address + (j,), ball, _descend(frame, j)))
    return out


def stage(nk: Necklace, k: int, budget: int = DEFAULT_BUDGET) -> StageNecklace:
    """Enumerate all stage-k pearls in lexicographic address order."""
    if k < 1:
        raise ValueError("stage index must be >= 1")
    n = nk.n
    total = stage_count(n, k)
    if total > budget:
        raise BudgetExceeded(total, budget)
    nodes = []

    def rec(addr, frame):
        depth = len(addr)
        last = addr[-1] if addr else 0
        for j in range(1, n + 1):
            if j == last:
                continue
            child = addr + (j,)
            if depth + 1 == k:
                nodes.append(
                    PearlNode(child, Sphere(frame.centers[j - 1], frame.radii[j - 1]))
                )
            else:
                rec(child, _descend(frame, j))

    rec((), _root_frame(nk))
    return StageNecklace(k, tuple(nodes))


def parity_counts(nk, k: int) -> tuple:
    """Template copies composing the stage-(k+1) knot, split by chirality.

    One copy per reduced word of length <= k including the empty word;
    a copy is a mirror image exactly when its word length is odd.  Accepts
    a Necklace or a plain pearl count n.
    """
    n = nk.n if isinstance(nk, Necklace) else int(nk)
    if n < 3:
        raise ValueError("need n >= 3")
    if k < 1:
        raise ValueError("k must be >= 1")
    plain, mirror = 1, 0
    for m in range(1, k + 1):
        count = stage_count(n, m)
        if m % 2 == 1:
            mirror += count
        else:
            plain += count
    return plain, mirror


def _enum_recursive(addr, frame, epsilon, max_depth, budget, n):
    """DFS below one expanded node; returns (points, capped, nodes_visited)."""
    points = []
    capped = 0
    visited = 0

    def rec(a, f):
        nonlocal capped, visited
        last = a[-1]
        for j in range(1, n + 1):
            if j == last:
                continue
            visited += 1
            if visited > budget:
                raise BudgetExceeded(visited, budget)
            r = f.radii[j - 1]
            child = a + (j,)
            if r < epsilon:
                points.append(f.centers[j - 1])
            elif len(child) >= max_depth:
                points.append(f.centers[j - 1])
                capped += 1
            else:
                rec(child, _descend(f, j))

    rec(addr, frame)
    return points, capped, visited


def enumerate_pruned(
    nk: Necklace,
    epsilon: float,
    max_depth: int = 64,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> LimitCloud:
    """Depth-first orbit enumeration pruned at ball radius < epsilon.

    A node becomes a leaf when its ball radius drops below epsilon or its
    depth reaches max_depth; leaf centers are returned in lexicographic
    address order regardless of schedule, so the output is bit-identical
    across runs and worker counts.  Work is split over the depth-2 subtrees
    and merged in canonical order.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 1 <= max_depth <= MAX_DEPTH_LIMIT:
        raise ValueError(f"max_depth must be in 1..{MAX_DEPTH_LIMIT}")
    n = nk.n
    root = _root_frame(nk)

    # plan: ordered list of ('leaf', point) / ('capped', point) / ('task', idx)
    plan = []
    tasks = []
    visited = 0
    for j in range(1, n + 1):
        visited += 1
        rj = root.radii[j - 1]
        if rj < epsilon:
            plan.append(("leaf", root.centers[j - 1]))
            continue
        if max_depth == 1:
            plan.append(("capped", root.centers[j - 1]))
            continue
        fj = _descend(root, j)
        for i in range(1, n + 1):
            if i == j:
                continue
            visited += 1
            ri = fj.radii[i - 1]
            if ri < epsilon:
                plan.append(("leaf", fj.centers[i - 1]))
            elif max_depth == 2:
                plan.append(("capped", fj.centers[i - 1]))
            else:
                plan.append(("task", len(tasks)))
                tasks.append(((j, i), _descend(fj, i)))

    def run(task):
        addr, frame = task
        return _enum_recursive(addr, frame, epsilon, max_depth, budget, n)

    if workers > 1 and tasks:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    points = []
    capped = 0
    for kind, payload in plan:
        if kind == "leaf":
            points.append(payload)
        elif kind == "capped":
            points.append(payload)
            capped += 1
        else:
            pts, cap, vis = results[payload]
            points.extend(pts)
            capped += cap
            visited += vis
    if visited > budget:
        raise BudgetExceeded(visited, budget)
    arr = np.array(points) if points else np.empty((0, 3))
    arr.setflags(write=False)
    return LimitCloud(arr, float(epsilon), capped)


@dataclass(frozen=True, eq=False)
class NestingReport:
    """Outcome of nesting_check: containment of children plus the sibling
    tangent/disjoint pattern of the finer stage."""

    stage: int
    tol: float
    children_checked: int
    max_violation: float
    containment_violations: tuple
    degree_defects: tuple  # pearls without exactly two tangent stage-mates
    overlap_pairs: tuple

    @property
    def ok(self):
        return (
            not self.containment_violations
            and not self.degree_defects
            and not self.overlap_pairs
        )


def nesting_check(
    nk: Necklace, k: int, tol: float = 1e-9, budget: int = DEFAULT_BUDGET
) -> NestingReport:
    """Verify |T_{k+1}| inside |T_k| pearl by pearl.

    Checks |child center - parent center| + r_child <= r_parent + tol for
    every stage-(k+1) pearl against its parent, then the stage-(k+1)
    sibling pattern: every pearl externally tangent to exactly two
    stage-mates and overlapping none.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = nk.n
    total = stage_count(n, k + 1)
    if total > budget:
        raise BudgetExceeded(total, budget)

    violations = []
    max_violation = -math.inf
    checked = 0
    addrs = []
    cents = np.empty((total, 3))
    rads = np.empty(total)
    pos = 0

    def rec(addr, frame):
        nonlocal max_violation, checked, pos
        depth = len(addr)
        last = addr[-1] if addr else 0
        take = [j - 1 for j in range(1, n + 1) if not (depth and j == last)]
        if depth:  # root's stage-1 balls have no parent to nest in
            pc = frame.centers[last - 1]
            pr = frame.radii[last - 1]
            excess = (
                np.linalg.norm(frame.centers[take] - pc, axis=1)
                + frame.radii[take]
                - pr
            )
            checked += len(take)
            worst = float(excess.max())
            if worst > max_violation:
                max_violation = worst
            for t, e in zip(take, excess):
                if e > tol:
                    violations.append((addr + (t + 1,), float(e)))
        if depth + 1 == k + 1:
            for t in take:
                addrs.append(addr + (t + 1,))
            m = len(take)
            cents[pos : pos + m] = frame.centers[take]
            rads[pos : pos + m] = frame.radii[take]
            pos += m
        else:
            for t in take:
                rec(addr + (t + 1,), _descend(frame, t + 1))

    rec((), _root_frame(nk))

    pairs = contact_pairs(cents, rads, 100.0 * tol)
    degree = np.zeros(total, dtype=int)
    overlaps = []
    if len(pairs):
        d = np.linalg.norm(cents[pairs[:, 0]] - cents[pairs[:, 1]], axis=1)
        s = rads[pairs[:, 0]] + rads[pairs[:, 1]]
        tangent = np.abs(d - s) <= tol
        np.add.at(degree, pairs[tangent, 0], 1)
        np.add.at(degree, pairs[tangent, 1], 1)
        for a, b, gap in zip(
            pairs[d < s - tol, 0], pairs[d < s - tol, 1], (s - d)[d < s - tol]
        ):
            overlaps.append((addrs[a], addrs[b], float(gap)))
    defects = tuple(
        (addrs[i], int(degree[i])) for i in range(total) if degree[i] != 2
    )
    return NestingReport(
        stage=k,
        tol=tol,
        children_checked=checked,
        max_violation=max_violation,
        containment_violations=tuple(violations),
        degree_defects=defects,
        overlap_pairs=tuple(overlaps),
    )


def max_radius(nk: Necklace, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """Largest pearl radius over stage k (strictly decreasing in k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = nk.n
    if stage_count(n, k) > budget:
        raise BudgetExceeded(stage_count(n, k), budget)
    best = 0.0

    def rec(addr, frame):
        nonlocal best
        depth = len(addr)
        last = addr[-1] if addr else 0
        for j in range(1, n + 1):
            if depth and j == last:
                continue
            if depth + 1 == k:
                r = frame.radii[j - 1]
                if r > best:
                    best = r
            else:
                rec(addr + (j,), _descend(frame, j))

    rec((), _root_frame(nk))
    return best


def _stage_arrays(nk: Necklace, k: int, budget: int = DEFAULT_BUDGET):
    """Addresses, centers (N, 3), radii (N,) of stage k, lexicographic order."""
    if k < 1:
        raise ValueError("stage index must be >= 1")
    n = nk.n
    total = stage_count(n, k)
    if total > budget:
        raise BudgetExceeded(total, budget)
    addrs = []
    cents = np.empty((total, 3))
    rads = np.empty(total)
    pos = 0

    def rec(addr, frame):
        nonlocal pos
        depth = len(addr)
        last = addr[-1] if addr else 0
        if depth + 1 == k:
            for j in range(1, n + 1):
                if depth and j == last:
                    continue
                addrs.append(addr + (j,))
            take = [j - 1 for j in range(1, n + 1) if not (depth and j == last)]
            m = len(take)
            cents[pos : pos + m] = frame.centers[take]
            rads[pos : pos + m] = frame.radii[take]
            pos += m
        else:
            for j in range(1, n + 1):
                if depth and j == last:
                    continue
                rec(addr + (j,), _descend(frame, j))

    rec((), _root_frame(nk))
    return addrs, cents, rads


def contact_pairs(cents, rads, slop):
    """Index pairs (i, j), i < j, of spheres with d <= r_i + r_j + slop.

    Radii in a reflection orbit span many octaves, so a single uniform
    query radius over-collects by orders of magnitude; binning spheres by
    log2(radius) and querying bin pairs at their own radius sums keeps the
    candidate set near the true contact count.
    """
    cents = np.asarray(cents)
    rads = np.asarray(rads)
    octave = np.floor(np.log2(rads)).astype(int)
    keys = [int(v) for v in np.unique(octave)]
    idx_by = {v: np.nonzero(octave == v)[0] for v in keys}
    tree_by = {v: cKDTree(cents[idx_by[v]]) for v in keys}
    out_a, out_b = [], []
    for ai, a in enumerate(keys):
        ia = idx_by[a]
        for b in keys[ai:]:
            ib = idx_by[b]
            r = 2.0 ** (a + 1) + 2.0 ** (b + 1) + slop
            if a == b:
                pairs = tree_by[a].query_pairs(r, output_type="ndarray")
                if len(pairs):
                    out_a.append(ia[pairs[:, 0]])
                    out_b.append(ia[pairs[:, 1]])
            else:
                hits = tree_by[a].query_ball_tree(tree_by[b], r)
                for i, near in enumerate(hits):
                    if near:
                        out_a.append(np.full(len(near), ia[i]))
                        out_b.append(ib[near])
    if not out_a:
        return np.empty((0, 2), dtype=int)
    pa = np.concatenate(out_a)
    pb = np.concatenate(out_b)
    d = np.linalg.norm(cents[pa] - cents[pb], axis=1)
    keep = d <= rads[pa] + rads[pb] + slop
    return np.column_stack([pa[keep], pb[keep]])


def _cloud_points(a):
    pts = a.points if isinstance(a, LimitCloud) else np.asarray(a, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("expected an (N, 3) point set")
    return pts


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets.

    Nearest neighbors come from a KD-tree, which returns the same exact
    distances as the brute-force scan.
    """
    A = _cloud_points(a)
    B = _cloud_points(b)
    if len(A) == 0 or len(B) == 0:
        raise EmptyCloud("both point sets must be non-empty")
    d_ab = cKDTree(B).query(A)[0].max()
    d_ba = cKDTree(A).query(B)[0].max()
    return float(max(d_ab, d_ba))
