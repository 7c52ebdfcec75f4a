"""Computational engine for pearl necklaces of tangent spheres and the
knots their reflection groups trace out.

Validate a necklace, iterate its reflection group by reduced words, prune
the orbit into limit-set point clouds, code limit points by addresses and
a cyclic coordinate, move points around by homogeneity maps, and account
for the fibers of fibered templates.
"""

from .coding import (
    CyclicOrder,
    Interval,
    address_from_coordinate,
    coordinate_of_point,
    cyclic_order,
    locate,
    necklace_coordinate,
    point_from_coordinate,
    point_of,
)
from .errors import (
    BudgetExceeded,
    ConfigError,
    EmptyCloud,
    NecklaceError,
    NotACycle,
    NotDisjoint,
    NotInLimit,
    NotTangent,
    PearlError,
    PoleError,
    PoleRisk,
    TooFewPearls,
    UnequalEdges,
)
from .fibration import FiberStats, arc_count, fiber_stats
from .geom import (
    Contact,
    Sphere,
    TangencyResult,
    as_point,
    conformal_scale,
    invert_jacobian,
    invert_point,
    invert_sphere,
    tangency,
    vec,
)
from .homogeneity import (
    HomeoReport,
    LambdaHomeo,
    RigidMap,
    group_move,
    lambda_homeo,
    stage_symmetries,
    verify_homeo,
    word_jacobian,
)
from .necklace import (
    Necklace,
    PolygonalKnot,
    necklace_from_polygon,
    resample_equal_chords,
    template,
    torus_knot_polyline,
    unknot_necklace,
    validate,
)
from .orbit import (
    DEFAULT_BUDGET,
    LimitCloud,
    NestingReport,
    PearlNode,
    StageNecklace,
    children,
    enumerate_pruned,
    hausdorff,
    max_radius,
    nesting_check,
    parity_counts,
    stage,
    stage_count,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
