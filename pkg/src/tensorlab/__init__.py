"""Exact k-tensor toolkit: flattening ranks, Kronecker powers, certified
restrictions onto matrix formats and Fekete-style asymptotic estimates."""

from .asymptotic import (
    FeketeReport,
    FunctionalDescriptor,
    IntervalEstimate,
    Radical,
    asymp_rank_interval,
    asymp_subrank_floor,
    axiom_check,
    regularize_upper,
)
from .catalog import catalog, cw, matmul, unit, unit_ij, w_tensor
from .certify import (
    CertBundle,
    FlushResult,
    SubrankCertificate,
    block_ranks,
    flush,
    matrix_subrank_cert,
    subrank_ij_brute,
    subrank_ij_lower,
    subrank_product_certify,
    verify_cert,
)
from .field import FieldSpec, Scalar, field_cardinality, field_ops, sample_scalar
from .rank import (
    ConciseResult,
    Decomposition,
    EchelonResult,
    echelon,
    flattening_rank,
    make_concise,
    matrix_rank,
    strassen_catalog,
    tensor_rank_brute,
    verify_decomposition,
)
from .tensor import (
    LegMap,
    Restriction,
    Tensor,
    apply_restriction,
    group_legs,
    kron,
    kron_power,
    make_tensor,
    pad_leg,
    permute_legs,
    slice_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "apply_restriction",
    "asymp_rank_interval",
    "asymp_subrank_floor",
    "axiom_check",
    "block_ranks",
    "catalog",
    "CertBundle",
    "ConciseResult",
    "cw",
    "Decomposition",
    "echelon",
    "EchelonResult",
    "FeketeReport",
    "field_cardinality",
    "field_ops",
    "FieldSpec",
    "flattening_rank",
    "flush",
    "FlushResult",
    "FunctionalDescriptor",
    "group_legs",
    "IntervalEstimate",
    "kron",
    "kron_power",
    "LegMap",
    "make_concise",
    "make_tensor",
    "matmul",
    "matrix_rank",
    "matrix_subrank_cert",
    "pad_leg",
    "permute_legs",
    "Radical",
    "regularize_upper",
    "Restriction",
    "sample_scalar",
    "Scalar",
    "slice_tensor",
    "strassen_catalog",
    "subrank_ij_brute",
    "subrank_ij_lower",
    "subrank_product_certify",
    "SubrankCertificate",
    "Tensor",
    "tensor_rank_brute",
    "unit",
    "unit_ij",
    "verify_cert",
    "verify_decomposition",
    "w_tensor",
]
