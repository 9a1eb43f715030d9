"""Constructive families in a chain of eleven sequence spaces.

Everything here is exact: scalars are rational pairs, sequence tails are
symbolic term rules, comparisons go through certified dyadic intervals.
Constructions emit self-contained JSON certificates; `recheck` walks them
back using only term evaluation and index-set membership.
"""

from .certificates import (
    CERT_KINDS,
    DEFAULT_SEED,
    SCHEMA_CERT,
    canonical_dumps,
    content_hash,
    read_json,
    write_json,
)
from .closed_families import (
    ClosedFamilySpec,
    build_closed_family,
    certify_combo_batch,
    certify_cross_batch,
    certify_extract_batch,
    pointwise_convergence_audit,
    random_combo,
)
from .dense_families import (
    DenseFamilySpec,
    build_dense_family,
    certify_density,
    certify_independence,
    certify_not_in_y_batch,
    certify_union_span,
    random_span_element,
)
from .enumeration import decode, encode
from .indexsets import BranchId, IndexSet, Progression, Ray, branch_set
from .metrics import distance, distance_cmp_frac
from .recheck import recheck
from .scalars import Scalar
from .sequences import SymbolicSequence
from .spaces import ChainParams, SpaceId, chain, member, parse_space
from .witnesses import NotAChainPair, certify_witness, witness, witness_tail

__version__ = "0.1.0"

__all__ = [
    "CERT_KINDS",
    "DEFAULT_SEED",
    "SCHEMA_CERT",
    "BranchId",
    "ChainParams",
    "ClosedFamilySpec",
    "DenseFamilySpec",
    "IndexSet",
    "NotAChainPair",
    "Progression",
    "Ray",
    "Scalar",
    "SpaceId",
    "SymbolicSequence",
    "branch_set",
    "build_closed_family",
    "build_dense_family",
    "canonical_dumps",
    "certify_combo_batch",
    "certify_cross_batch",
    "certify_density",
    "certify_extract_batch",
    "certify_independence",
    "certify_not_in_y_batch",
    "certify_union_span",
    "certify_witness",
    "chain",
    "content_hash",
    "decode",
    "distance",
    "distance_cmp_frac",
    "encode",
    "member",
    "parse_space",
    "pointwise_convergence_audit",
    "random_combo",
    "random_span_element",
    "read_json",
    "recheck",
    "witness",
    "witness_tail",
    "write_json",
]
