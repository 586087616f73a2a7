"""Lower bound for disc packings: a chase for points no enlarged disc covers."""
from .chase import ChaseStep, ChaseTrace, chase, crescent_step, square_step
from .constants import AuditReport, Constants, audit_constants, calibrate, derive_window_constants
from .generators import DiscPacking, brute_force_uncovered, random_greedy_packing
from .regions import AnnularSector, Crescent, DiscProbe, Square, bites

__all__ = [
    "AnnularSector",
    "AuditReport",
    "ChaseStep",
    "ChaseTrace",
    "Constants",
    "Crescent",
    "DiscPacking",
    "DiscProbe",
    "Square",
    "audit_constants",
    "bites",
    "brute_force_uncovered",
    "calibrate",
    "chase",
    "crescent_step",
    "derive_window_constants",
    "random_greedy_packing",
    "square_step",
]
