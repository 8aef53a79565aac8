"""Unipotent pieces of GL and Sp over small finite fields."""

from ._core import (
    ScaleExceeded,
    UpiecesError,
    admissible_labels,
    canonical_representative,
    construct_n,
    count_sym_nondeg,
    dk_filtration,
    enumerate,
    gaussian_count,
    interpolate,
    label,
    piece_counts,
    run_suite,
    splitting_invariant,
)

__all__ = [
    "ScaleExceeded",
    "UpiecesError",
    "admissible_labels",
    "canonical_representative",
    "construct_n",
    "count_sym_nondeg",
    "dk_filtration",
    "enumerate",
    "gaussian_count",
    "interpolate",
    "label",
    "piece_counts",
    "run_suite",
    "splitting_invariant",
]
