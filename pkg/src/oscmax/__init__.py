"""Dyadic Hausdorff content, Choquet integrals, maximal functions and
capacitary mean-oscillation norms on dyadic grids."""

__version__ = "0.1.0"

from .choquet import choquet_integral, choquet_lp_norm, packing_check
from .content import CellSet, ContentParams, content, content_brute, content_value
from .corpus import CorpusSpec, generate
from .geometry import (
    CENTERED,
    CONTAINED,
    BaseDomain,
    DyadicCube,
    Window,
    comparison_cube,
    enumerate_windows,
    join_cube,
)
from .grid import GridFunction, load_grid, save_grid
from .maximal import (
    MaximalField,
    MaximalParams,
    beta_maximal,
    fractional_maximal,
    local_global_split,
)
from .oscillation import (
    NormReport,
    OscillationParams,
    blo_norm,
    bmo_norm,
    choquet_average,
    essinf_beta,
    mean_oscillation,
    oscillation_modulus,
)
from .verify import DecayFit, ExperimentConfig, Report, run_suite

__all__ = [
    "BaseDomain",
    "CENTERED",
    "CONTAINED",
    "CellSet",
    "ContentParams",
    "CorpusSpec",
    "DecayFit",
    "DyadicCube",
    "ExperimentConfig",
    "GridFunction",
    "MaximalField",
    "MaximalParams",
    "NormReport",
    "OscillationParams",
    "Report",
    "Window",
    "beta_maximal",
    "blo_norm",
    "bmo_norm",
    "choquet_average",
    "choquet_integral",
    "choquet_lp_norm",
    "comparison_cube",
    "content",
    "content_brute",
    "content_value",
    "enumerate_windows",
    "essinf_beta",
    "fractional_maximal",
    "generate",
    "join_cube",
    "load_grid",
    "local_global_split",
    "mean_oscillation",
    "oscillation_modulus",
    "packing_check",
    "run_suite",
    "save_grid",
]
