"""Exact simulation of multiphoton bunching for partially distinguishable photons."""

from .errors import (
    BosonBunchError,
    DegenerateError,
    DimensionError,
    DomainError,
    FeasibilityError,
    ParseError,
    ShapeError,
    SizeLimitError,
    UnsupportedError,
)
from .explore import (
    fourier_table,
    haar_search,
    hadamard_table,
    pb_bounds,
    pb_gap,
    scan_family,
)
from .fixtures import load_table, residual_report, u3tilde
from .gram import (
    Gram3Params,
    GramMatrix,
    InternalStateSet,
    StatePrepParams,
    bargmann_invariant,
    cholesky_realize,
    gram_from_params,
    gram_from_states,
    states_from_prep,
    triad_phase,
)
from .interference import (
    OutputDistribution,
    PhotonConfig,
    antibunching_probability,
    extract_bargmann,
    fock_oracle_distribution,
    output_distribution,
    p_bunching,
    p_full_bunching,
)
from .matrices import (
    fourier_matrix,
    haar_random_unitary,
    read_matrix,
    sylvester_hadamard,
    write_matrix,
)
from .noise import (
    SourceModel,
    noisy_distribution,
    pseudo_pnr_correction,
    split_brightness,
)
from .permanent import permanent, permanent_naive

__version__ = "0.1.0"

__all__ = [
    "BosonBunchError",
    "DegenerateError",
    "DimensionError",
    "DomainError",
    "FeasibilityError",
    "Gram3Params",
    "GramMatrix",
    "InternalStateSet",
    "OutputDistribution",
    "ParseError",
    "PhotonConfig",
    "ShapeError",
    "SizeLimitError",
    "SourceModel",
    "StatePrepParams",
    "UnsupportedError",
    "antibunching_probability",
    "bargmann_invariant",
    "cholesky_realize",
    "extract_bargmann",
    "fock_oracle_distribution",
    "fourier_matrix",
    "fourier_table",
    "gram_from_params",
    "gram_from_states",
    "haar_random_unitary",
    "haar_search",
    "hadamard_table",
    "load_table",
    "noisy_distribution",
    "output_distribution",
    "p_bunching",
    "p_full_bunching",
    "pb_bounds",
    "pb_gap",
    "permanent",
    "permanent_naive",
    "pseudo_pnr_correction",
    "read_matrix",
    "residual_report",
    "scan_family",
    "split_brightness",
    "states_from_prep",
    "sylvester_hadamard",
    "triad_phase",
    "u3tilde",
    "write_matrix",
]
