"""Periodic ellipse packings whose slight enlargement covers the plane, and
the matching lower bound for disc packings."""
from .errors import (
    BudgetExceeded,
    CalibrationError,
    CertificationError,
    ConfigurationError,
    ConstantsInfeasible,
    InternalError,
    InvalidArgument,
    InvalidState,
    InvariantViolation,
    RingcoverError,
)
from .geometry import AffineMap2, ConvexPolygon, Disc, Ellipse, Triangle, enlarge
from .inscription import ProperTile, choose_n, mu, properly_inscribe, reference_polygon
from .packer import PackingConfig, PeriodicPacking, build_cell, choose_delta, estimate_tiles
from .tiler import next_tile, pockets, tile_until
from .verify import CoverageReport, cell_region, verify_covering, verify_packing

__version__ = "0.1.0"

__all__ = [
    "AffineMap2", "BudgetExceeded", "CalibrationError", "CertificationError", "ConfigurationError",
    "ConstantsInfeasible", "ConvexPolygon", "CoverageReport", "Disc", "Ellipse", "InternalError",
    "InvalidArgument", "InvalidState", "InvariantViolation", "PackingConfig", "PeriodicPacking",
    "ProperTile", "RingcoverError", "Triangle", "build_cell", "cell_region", "choose_delta",
    "choose_n", "enlarge", "estimate_tiles", "mu", "next_tile", "pockets", "properly_inscribe",
    "reference_polygon", "tile_until", "verify_covering", "verify_packing",
]
