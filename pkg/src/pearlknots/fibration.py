"""Fiber accounting for necklaces whose template is a fibered knot.

Each reflection stage arc-sums fresh copies of the base Seifert surface
onto the fiber, one joining arc per copy, so the combinatorics reduce to
integer bookkeeping over reduced words: copy counts split by chirality,
Euler characteristic dropping by one per arc sum, and genus growing
without bound.
"""

from __future__ import annotations

from dataclasses import dataclass

from .orbit import parity_counts


@dataclass(frozen=True)
class FiberStats:
    """Copy counts and surface bookkeeping for the stage-(k+1) fiber."""

    stage: int
    base_genus: int
    copies_plain: int
    copies_mirror: int
    total_copies: int
    euler_char: int
    genus: int


def fiber_stats(n: int, g: int, k: int) -> FiberStats:
    """Fiber of the stage-(k+1) necklace built from a genus-g fibered template.

    One copy of the base fiber per reduced word of length <= k (empty word
    included), mirror-imaged when the word length is odd.  Arc-summing a
    one-boundary surface drops Euler characteristic by one, so with C
    copies: euler = C (1 - 2g) - (C - 1) = 1 - 2 g C and genus = g C, with
    a single boundary component throughout.
    """
    if g < 1:
        raise ValueError("base genus must be >= 1 (the template is a nontrivial fibered knot)")
    plain, mirror = parity_counts(n, k)
    total = plain + mirror
    return FiberStats(
        stage=k,
        base_genus=g,
        copies_plain=plain,
        copies_mirror=mirror,
        total_copies=total,
        euler_char=1 - 2 * g * total,
        genus=g * total,
    )


def arc_count(n: int, k: int) -> int:
    """Number of joining arcs: the copies form a tree, so one less than
    the copy count."""
    plain, mirror = parity_counts(n, k)
    return plain + mirror - 1
