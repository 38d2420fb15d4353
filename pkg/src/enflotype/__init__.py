"""Type invariants of finite-dimensional lp spaces on discrete tori.

The package computes, estimates, and verifies three paired-moment
invariants: the Rademacher sign average, its hypercube metric analogue,
and the scaled torus analogue, together with the averaging operators,
the exponential witness chain relating the constants, and an experiment
harness with a CLI.
"""

from .errors import CapacityError, InternalError, InvalidInputError, UsageError
from .kernels import available_backends, get_backend, set_backend
from .space import (
    COMPLEXIFIED,
    REAL,
    LpSpace,
    combine,
    lift_to_complex,
    norm,
    norm_pows,
    norm_pows_diff,
    unit_rotate,
)
from .lattice import (
    DEFAULT_CAP,
    GridFunction,
    SamplingPlan,
    TorusDomain,
    even_box,
    expect_signs,
    integrate_torus,
    parity_slab,
    random_grid,
    shift,
)
from .functionals import (
    PairReport,
    enflo_pair,
    rademacher_pair,
    scaled_enflo_pair,
    theorem_margin,
)
from .operators import project, smooth, smoothing_margin, smoothing_bound_report
from .witness import (
    CheckResult,
    SymmetrizationResult,
    WitnessReport,
    build_witness,
    certify_T_le_2pi_tau,
    check_contraction_principle,
    check_edge_identity,
    check_half_shift_identity,
    check_symmetrization,
    rotation_table,
)
from .search import (
    EstimateReport,
    SearchBudget,
    brute_force_tau_oracle,
    maximize_rademacher_ratio,
    maximize_scaled_enflo_ratio,
)
from .harness import (
    ExperimentConfig,
    RunReport,
    config_from_mapping,
    execute,
    known_type_constant,
    load_config,
    report_to_csv,
    report_to_dict,
    report_to_json,
    select_parameters,
    write_report,
)
from .cli import main as cli_main

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "InternalError",
    "InvalidInputError",
    "UsageError",
    "available_backends",
    "get_backend",
    "set_backend",
    "COMPLEXIFIED",
    "REAL",
    "LpSpace",
    "combine",
    "lift_to_complex",
    "norm",
    "norm_pows",
    "norm_pows_diff",
    "unit_rotate",
    "DEFAULT_CAP",
    "GridFunction",
    "SamplingPlan",
    "TorusDomain",
    "even_box",
    "expect_signs",
    "integrate_torus",
    "parity_slab",
    "random_grid",
    "shift",
    "PairReport",
    "enflo_pair",
    "rademacher_pair",
    "scaled_enflo_pair",
    "theorem_margin",
    "project",
    "smooth",
    "smoothing_margin",
    "smoothing_bound_report",
    "CheckResult",
    "SymmetrizationResult",
    "WitnessReport",
    "build_witness",
    "certify_T_le_2pi_tau",
    "check_contraction_principle",
    "check_edge_identity",
    "check_half_shift_identity",
    "check_symmetrization",
    "rotation_table",
    "EstimateReport",
    "SearchBudget",
    "brute_force_tau_oracle",
    "maximize_rademacher_ratio",
    "maximize_scaled_enflo_ratio",
    "ExperimentConfig",
    "RunReport",
    "cli_main",
    "config_from_mapping",
    "execute",
    "known_type_constant",
    "load_config",
    "report_to_csv",
    "report_to_dict",
    "report_to_json",
    "select_parameters",
    "write_report",
]
