"""Sign-changing Poisson problem on planar domains and balls.

Finite-difference solver, exact radial solutions, explicit Green kernels,
closed-form bounds and a bathtub-based search for the worst placement of the
negative source set.
"""
from .errors import (
    CoincidentPoints, ConfigError, EmptyRaster, MassInfeasible, NonConvergence, NotNonnegative,
    NumericalFailure, PointOutsideWedge, SignPoissonError, TruncationFailure,
)
from .fdpoisson import (
    RelaxedSet, ScalarField, SolveReport, essinf, green_column, lambda_bottom, solve,
    solve_indicator, torsion, torsion_field,
)
from .geometry import (
    Annulus, Disk, GridDomain, Polygon, Sector, Triangle, UnionOfDisks, contains,
    equilateral_triangle, measure, rasterize,
)
from .radial import (
    RadialConfig, RadialSolution, central_value_ball, central_value_disk, find_rc, min_radial,
    solve_radial,
)
from .shapeopt import bathtub_fill, estimate_c_minus, level_set_integral_opt, minimize_essinf

__version__ = "0.1.0"
