"""Numerical tools for the spatial numerical range of finite-dimensional Banach algebras."""

from .algebra import (
    AlgebraSpec,
    NormSpec,
    PreconditionError,
    SpecificationError,
    is_associative,
    multiply,
    submultiplicative_scale,
)
from .duality import dual_norm, norming_functionals, verify_functional
from .engine import PointCloud, estimate_snr, numerical_radius, snr_at
from .geometry import convex_hull, convexity_defect, hausdorff, hull_hausdorff
from .hunt import HuntConfig, hunt_nonconvex
from .oracles import product_rule, table_algebra, table_oracle
from .sampling import SphereSampler

__all__ = [
    "AlgebraSpec",
    "HuntConfig",
    "NormSpec",
    "PointCloud",
    "PreconditionError",
    "SpecificationError",
    "SphereSampler",
    "convex_hull",
    "convexity_defect",
    "dual_norm",
    "estimate_snr",
    "hausdorff",
    "hunt_nonconvex",
    "hull_hausdorff",
    "is_associative",
    "multiply",
    "norming_functionals",
    "numerical_radius",
    "product_rule",
    "snr_at",
    "submultiplicative_scale",
    "table_algebra",
    "table_oracle",
    "verify_functional",
]
