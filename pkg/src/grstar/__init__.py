"""Exact arithmetic in Gr(P) for the free planar algebra, its cup subalgebra,
planar tangles acting on it, and the spectral checks on the model operator."""

from .kernels import BACKEND
from .ncpoly import (
    DegreeError,
    GrElement,
    bullet,
    cap_left,
    cap_right,
    cup,
    cup_pow,
    inner,
    involution,
    star,
    trace,
)
from .scalars import ContextMismatch, FieldScalar, field

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ContextMismatch",
    "DegreeError",
    "FieldScalar",
    "GrElement",
    "bullet",
    "cap_left",
    "cap_right",
    "cup",
    "cup_pow",
    "field",
    "inner",
    "involution",
    "star",
    "trace",
]
