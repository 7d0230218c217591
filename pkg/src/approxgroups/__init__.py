"""Approximate subgroups of finite and windowed local groups: covering,
refinement and core-chain constructions with replayable certificates."""

from .errors import (
    ApproxGroupsError,
    BudgetExceeded,
    InvalidInstance,
    InvalidSpec,
    LocalOverflow,
    NotEquivalent,
    NotSymmetric,
    PreconditionViolated,
    SearchFailed,
    Uncoverable,
    UndefinedProduct,
)
from .groups import LocalGroup, GroupTable, build_group, cyclic, dihedral, direct_product, heisenberg, symmetric
from .sets import (
    GroupSet,
    MeasureContext,
    approx_constant,
    generated,
    inverse_set,
    measure,
    power,
    product_set,
    sym_diff,
    translate,
)
from .covering import cover_by_translates, equivalence_refine, ruzsa_cover, wide_from_positive
from .sanders import build_schedule, eval_P, find_plateau, sanders_refine
from .normality import common_conjugate_core, normalize_refine
from .chain import core_chain
from .instances import Instance

__version__ = "0.1.0"

__all__ = [
    "ApproxGroupsError",
    "BudgetExceeded",
    "InvalidInstance",
    "InvalidSpec",
    "LocalOverflow",
    "NotEquivalent",
    "NotSymmetric",
    "PreconditionViolated",
    "SearchFailed",
    "Uncoverable",
    "UndefinedProduct",
    "LocalGroup",
    "GroupTable",
    "build_group",
    "cyclic",
    "dihedral",
    "direct_product",
    "heisenberg",
    "symmetric",
    "GroupSet",
    "MeasureContext",
    "approx_constant",
    "generated",
    "inverse_set",
    "measure",
    "power",
    "product_set",
    "sym_diff",
    "translate",
    "cover_by_translates",
    "equivalence_refine",
    "ruzsa_cover",
    "wide_from_positive",
    "build_schedule",
    "eval_P",
    "find_plateau",
    "sanders_refine",
    "common_conjugate_core",
    "normalize_refine",
    "core_chain",
    "Instance",
]
