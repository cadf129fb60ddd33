"""Exact norm computations in Schlumprecht space on finitely supported vectors."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    NormEngine,
    NormResult,
    certified_norm,
    constant_block_norm,
    evaluate_certificate,
    f,
    level_norm,
    norm,
    norm_value,
    split_sum,
)
from .oracle import brute_force_norm  # noqa: E402
from .vectors import (  # noqa: E402
    CanonicalForm,
    IndexInterval,
    SparseVector,
    canonicalize,
    lattice_leq,
    parse_vector,
    restrict,
)

__all__ = [
    "CanonicalForm",
    "IndexInterval",
    "NormEngine",
    "NormResult",
    "SparseVector",
    "brute_force_norm",
    "canonicalize",
    "certified_norm",
    "constant_block_norm",
    "evaluate_certificate",
    "f",
    "lattice_leq",
    "level_norm",
    "norm",
    "norm_value",
    "parse_vector",
    "restrict",
    "split_sum",
]
