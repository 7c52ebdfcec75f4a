"""Point <-> address coding of the limit set and its cyclic coordinate.

Every stage refines the previous one: the n-1 children of a pearl sit in a
contiguous arc of the finer cycle, chained between the two points where the
parent touches its own stage-mates.  Splitting each pearl's coordinate
interval into n-1 equal half-open subintervals along that chain realizes
the limit set as the inverse limit of refining cyclic decompositions, with
tangency points receiving the shared endpoint (they are exactly the
2-to-1 coded points).

Orientation bookkeeping collapses to a parity rule: walking a parent's
interval left to right, the children of a node at odd depth with last
letter j appear in descending label order j-1, j-2, ..., j+1, and in
ascending order j+1, ..., j-1 at even depth.  This is the combinatorial
shadow of reflections reversing orientation; the geometric tangency graph
built by cyclic_order is the normative order, and the test suite checks
the two agree on every fixture.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, NotACycle, NotInLimit
from .geom import as_point
from .necklace import Necklace
from .orbit import (
    DEFAULT_BUDGET,
    _descend,
    _root_frame,
    check_address,
    stage,
    stage_count,
)


def _norm_label(i: int, n: int) -> int:
    return (i - 1) % n + 1


def _child_order(n: int, j: int, depth: int) -> list:
    """Interval order of the children of a depth-`depth` node with letter j."""
    if depth % 2 == 1:
        return [_norm_label(j - 1 - t, n) for t in range(n - 1)]
    return [_norm_label(j + 1 + t, n) for t in range(n - 1)]


@dataclass(frozen=True)
class Interval:
    """Half-open cyclic-coordinate interval [lo, hi) with exact endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, theta) -> bool:
        return self.lo <= theta < self.hi


@dataclass(frozen=True, eq=False)
class CyclicOrder:
    """Cyclic position of every stage-k address, read off the tangency graph."""

    k: int
    order: tuple  # addresses in cyclic order
    position: dict  # address -> index in order

    def __len__(self):
        return len(self.order)


def cyclic_order(nk: Necklace, k: int, tol: float = None, budget: int = DEFAULT_BUDGET) -> CyclicOrder:
    """Compute the stage-k cyclic order geometrically.

    Builds the tangency graph of the stage-k pearls (each must touch
    exactly two stage-mates), then walks the cycle starting at the
    alternating address (1,2,1,2,...) truncated to length k, in the
    direction whose second pearl is lexicographically smaller.  Raises
    NotACycle if the graph is not a single 2-regular cycle, which signals
    a tangency misclassification; retry with an adjusted tol.
    """
    if tol is None:
        tol = nk.tol
    sn = stage(nk, k, budget)
    addrs = sn.addresses
    cents = sn.centers()
    rads = sn.radii()
    total = len(addrs)

    neighbors = [[] for _ in range(total)]
    tree = cKDTree(cents)
    rmax = float(rads.max())
    pairs = tree.query_pairs(2.0 * rmax + 100.0 * tol, output_type="ndarray")
    for a, b in pairs:
        d = float(np.linalg.norm(cents[a] - cents[b]))
        if abs(d - (rads[a] + rads[b])) <= tol:
            neighbors[a].append(b)
            neighbors[b].append(a)
    bad = [i for i in range(total) if len(neighbors[i]) != 2]
    if bad:
        raise NotACycle(
            f"stage {k}: {len(bad)} pearls without exactly 2 tangent mates "
            f"(first: {addrs[bad[0]]} with {len(neighbors[bad[0]])})"
        )

    index = {a: i for i, a in enumerate(addrs)}
    start_addr = tuple((1, 2)[i % 2] for i in range(k))
    start = index[start_addr]
    nb = sorted(neighbors[start], key=lambda i: addrs[i])
    prev, cur = start, nb[0]
    walk = [start, cur]
    while cur != start:
        a, b = neighbors[cur]
        nxt = b if a == prev else a
        prev, cur = cur, nxt
        if cur != start:
            walk.append(cur)
        if len(walk) > total:
            raise NotACycle(f"stage {k}: tangency graph splits into several cycles")
    if len(walk) != total:
        raise NotACycle(f"stage {k}: cycle closes after {len(walk)} of {total} pearls")
    order = tuple(addrs[i] for i in walk)
    return CyclicOrder(k, order, {a: i for i, a in enumerate(order)})


def locate(nk: Necklace, x, depth: int, tol: float = None) -> list:
    """Addresses of the stage-`depth` balls containing x: one generically,
    two when x sits at a tangency point (within tol).

    Raises NotInLimit when at some stage no ball contains x.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if tol is None:
        tol = nk.tol
    x = as_point(x)
    n = nk.n
    branches = [((), _root_frame(nk))]
    for _ in range(depth):
        nxt = []
        for addr, frame in branches:
            last = addr[-1] if addr else 0
            for j in range(1, n + 1):
                if j == last:
                    continue
                c = frame.centers[j - 1]
                r = frame.radii[j - 1]
                slack = float(np.linalg.norm(x - c)) - r
                if slack <= tol:
                    nxt.append((slack, addr + (j,), frame, j))
        if not nxt:
            raise NotInLimit(
                f"no stage-{len(branches[0][0]) + 1} ball contains the point"
            )
        nxt.sort(key=lambda t: (t[0], t[1]))
        branches = [(a, _descend(f, j)) for _, a, f, j in nxt[:2]]
    return sorted(a for a, _ in branches)


def point_of(nk: Necklace, w, extend: int = 0, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Representative point of the address w: the center of the ball reached
    by extending w with its alternating tail (last two letters repeated) for
    `extend` more stages.

    The returned point is within that final ball's radius of the limit
    point coded by the extended sequence; when the tail letters are
    adjacent pearls the sequence converges to their (image) tangency point.
    """
    w = check_address(nk, w)
    if not w:
        raise ValueError("address must be non-empty")
    if extend < 0:
        raise ValueError("extend must be >= 0")
    if len(w) + extend > budget:
        raise BudgetExceeded(len(w) + extend, budget)
    if len(w) >= 2:
        a, b = w[-2], w[-1]
    else:
        a, b = _norm_label(w[0] + 1, nk.n), w[0]
    letters = list(w) + [(a, b)[i % 2] for i in range(extend)]
    frame = _root_frame(nk)
    for j in letters[:-1]:
        frame = _descend(frame, j)
    last = letters[-1]
    return np.array(frame.centers[last - 1])


def necklace_coordinate(nk: Necklace, w) -> Interval:
    """Exact coordinate interval of the pearl at address w.

    Stage-1 pearl m owns [(m-1)/n, m/n); each further letter splits the
    interval into n-1 equal parts in the chain order of the children, so
    all stage-k intervals have width 1/(n (n-1)^(k-1)) and partition [0, 1).
    """
    w = check_address(nk, w)
    if not w:
        raise ValueError("address must be non-empty")
    n = nk.n
    lo = Fraction(w[0] - 1, n)
    width = Fraction(1, n)
    for depth, (j, m) in enumerate(zip(w, w[1:]), start=1):
        pos = _child_order(n, j, depth).index(m)
        width /= n - 1
        lo += pos * width
    return Interval(lo, lo + width)


def point_from_coordinate(nk: Necklace, theta, depth: int) -> np.ndarray:
    """Representative point of the stage-`depth` pearl whose interval
    contains theta: the inverse of necklace_coordinate up to the stage ball
    radius."""
    addr = address_from_coordinate(nk, theta, depth)
    return point_of(nk, addr)


def address_from_coordinate(nk: Necklace, theta, depth: int) -> tuple:
    """Stage-`depth` address whose half-open interval contains theta (mod 1).

    Descends a single interval chain, so the cost is linear in depth even
    though the stage itself may be far beyond enumeration budgets.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > DEFAULT_BUDGET:
        raise BudgetExceeded(depth, DEFAULT_BUDGET)
    n = nk.n
    th = Fraction(theta) % 1
    first = int(th * n) + 1
    addr = [first]
    lo = Fraction(first - 1, n)
    width = Fraction(1, n)
    for d in range(1, depth):
        order = _child_order(n, addr[-1], d)
        width /= n - 1
        pos = int((th - lo) / width)
        pos = min(pos, n - 2)
        addr.append(order[pos])
        lo += pos * width
    return tuple(addr)


def coordinate_of_point(nk: Necklace, x, depth: int, tol: float = None) -> Fraction:
    """Coordinate of a limit point at stage-`depth` resolution.

    Generic points get the midpoint of their located interval; tangency
    points (two codings) get the exact shared endpoint, which makes maps
    built on the coordinate well-defined on double-coded points.
    """
    addrs = locate(nk, x, depth, tol)
    if len(addrs) == 1:
        return necklace_coordinate(nk, addrs[0]).mid
    ia = necklace_coordinate(nk, addrs[0])
    ib = necklace_coordinate(nk, addrs[1])
    if ia.hi == ib.lo:
        return ia.hi
    if ib.hi == ia.lo:
        return ib.hi
    if ia.lo == 0 and ib.hi == 1:
        return Fraction(0)
    if ib.lo == 0 and ia.hi == 1:
        return Fraction(0)
    raise NotInLimit(
        f"double-coded point has non-adjacent intervals {ia} and {ib}"
    )
