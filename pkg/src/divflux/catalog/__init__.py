"""Catalog of named divergence families with closed-form values, gradients,
parameter metadata, and capability flags (scale factors, gradient splits,
canonical reductions)."""
from ._base import (DivergenceSpec, FamilyEntry, ParamSpec, evaluate,
                    family_names, get_entry, gradient_q, metadata_table,
                    reduce_special_case, value_terms)

# populate the registry; order only matters for intra-module reuse
from . import _classic  # noqa: E402,F401
from . import _power    # noqa: E402,F401
from . import _chi      # noqa: E402,F401
from . import _means    # noqa: E402,F401
from . import _mixed    # noqa: E402,F401

from ._power import ghosh_conformance

__all__ = [
    "DivergenceSpec",
    "FamilyEntry",
    "ParamSpec",
    "evaluate",
    "family_names",
    "get_entry",
    "ghosh_conformance",
    "gradient_q",
    "metadata_table",
    "reduce_special_case",
    "value_terms",
]
