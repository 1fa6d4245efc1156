"""divflux: divergence functions and split-gradient solvers.

A library of separable divergences between non-negative fields, their
scale-invariant forms, and multiplicative/interior-point minimization
under non-negativity and sum constraints, with NMF and blind
deconvolution built on top.
"""

from .errors import (
    ConstraintError,
    DecompositionError,
    DivfluxError,
    DomainError,
    InvariantError,
    NoClosedForm,
    NotDecomposable,
    ParamError,
    ShapeError,
    StallError,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintError",
    "DecompositionError",
    "DivfluxError",
    "DomainError",
    "InvariantError",
    "NoClosedForm",
    "NotDecomposable",
    "ParamError",
    "ShapeError",
    "StallError",
    "__version__",
]
