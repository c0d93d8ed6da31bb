"""Canonical bases for matrices selfadjoint in an indefinite inner product."""

from ._core import (
    BlockKind,
    BlockSpec,
    CanonError,
    JordanSpec,
    build_J,
    build_JR,
    build_P,
    build_S,
    check_cs,
    check_h_selfadjoint,
    focs_basis,
    focs_from_rc,
    gen_instance,
    rc_basis,
    toeplitz_inv_sqrt,
)

__all__ = [
    "BlockKind",
    "BlockSpec",
    "CanonError",
    "JordanSpec",
    "build_J",
    "build_JR",
    "build_P",
    "build_S",
    "check_cs",
    "check_h_selfadjoint",
    "focs_basis",
    "focs_from_rc",
    "gen_instance",
    "rc_basis",
    "toeplitz_inv_sqrt",
]
