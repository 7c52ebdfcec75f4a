"""Exception types shared across the package."""


class PearlError(Exception):
    """Base class for every error raised by this package."""


class PoleError(PearlError):
    """An inversion would send its argument through the mirror center to infinity."""


class NecklaceError(PearlError):
    """A sphere list failed necklace validation."""


class TooFewPearls(NecklaceError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"a necklace needs at least 3 pearls, got {n}")


class NotTangent(NecklaceError):
    def __init__(self, i, detail=""):
        self.index = i
        msg = f"pearl {i} is not externally tangent to its cyclic successor"
        super().__init__(msg + (f": {detail}" if detail else ""))


class NotDisjoint(NecklaceError):
    def __init__(self, i, j, gap):
        self.pair = (i, j)
        self.gap = gap
        super().__init__(
            f"non-consecutive pearls {i} and {j} intersect or nest (gap {gap:.3e})"
        )


class PoleRisk(NecklaceError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(
            f"pearl {j} passes through the center of pearl {i}; reflections would blow up"
        )


class UnequalEdges(NecklaceError):
    def __init__(self, spread, tol):
        self.spread = spread
        super().__init__(
            f"polygon edges are not of equal length (spread {spread:.3e} > tol {tol:.1e})"
        )


class BudgetExceeded(PearlError):
    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(f"orbit enumeration needs ~{needed} nodes, budget is {budget}")


class NotACycle(PearlError):
    """The stage tangency graph is not a single 2-regular cycle (tolerance issue)."""


class NotInLimit(PearlError):
    """No orbit ball of the requested stage contains the point."""


class EmptyCloud(PearlError):
    """Hausdorff distance of an empty point set is undefined."""


class ConfigError(PearlError):
    """Run configuration missing, malformed, or inconsistent."""
