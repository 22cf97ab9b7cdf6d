"""Schur triples in finite abelian groups: exact counting, extremal
constructions, closed-form minima and an exhaustive verification oracle."""

from .groups import (
    ElementSet,
    GroupSpec,
    GroupSpecError,
    SubgroupHandle,
    classify_group_type,
    enumerate_subgroups,
    make_group,
    max_sumfree_size,
    parse_group,
)
from .triples import count_schur, count_schur_naive, count_schur_transform, is_sum_free

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ElementSet",
    "GroupSpec",
    "GroupSpecError",
    "SubgroupHandle",
    "classify_group_type",
    "enumerate_subgroups",
    "make_group",
    "max_sumfree_size",
    "parse_group",
    "count_schur",
    "count_schur_naive",
    "count_schur_transform",
    "is_sum_free",
]
