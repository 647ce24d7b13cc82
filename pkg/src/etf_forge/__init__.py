"""Exact constructions, symmetry groups and matroid structure of equiangular tight frames."""

from __future__ import annotations

__version__ = "0.1.0"

from .cyclotomic import Cyclotomic, root_of_unity
from .errors import (
    BudgetExceeded,
    ConsistencyError,
    EtfForgeError,
    NotAnEtfError,
    OrderMismatchError,
    OutOfReach,
)
from .finite_field import FieldSpec, field_new
from .frames import FrameMatrix, GramMatrix, TripleTable

__all__ = [
    "__version__",
    "Cyclotomic",
    "root_of_unity",
    "FieldSpec",
    "field_new",
    "FrameMatrix",
    "GramMatrix",
    "TripleTable",
    "EtfForgeError",
    "OrderMismatchError",
    "ConsistencyError",
    "NotAnEtfError",
    "BudgetExceeded",
    "OutOfReach",
]
