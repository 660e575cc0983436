"""Shared math primitives: seeded RNG, 3-vectors, quaternions, SPD solve.

Matrices throughout the package are plain 2-D float64 numpy arrays in
row-major (C) order; all reals are IEEE-754 binary64.
"""

from physbench.core.linalg import solve_spd
from physbench.core.quat import (
    Quat,
    Vec3,
    quat_from_axis_angle,
    quat_mul,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
)
from physbench.core.rng import Rng, derive_child_seed

__all__ = [
    "Quat",
    "Rng",
    "Vec3",
    "derive_child_seed",
    "quat_from_axis_angle",
    "quat_mul",
    "quat_normalize",
    "quat_rotate",
    "quat_to_matrix",
    "solve_spd",
]
