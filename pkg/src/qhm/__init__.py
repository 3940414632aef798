"""Energy maximization and negative-type classification for finite metric spaces."""

from ._kernels import HAS_NUMBA
from .classify import (
    Classification,
    DEFAULT_TOL,
    KernelFlatValue,
    Verdict,
    centered_form,
    classify,
    default_flatness_tol,
    kernel_flat_values,
)
from .energy import (
    MASS_TOL,
    SignedMeasure,
    atomic,
    energy,
    energy_bilinear,
    inner_extended,
    inner_zero,
    load_measure,
    measure,
    potential,
    save_measure,
    seminorm_zero,
    uniform,
)
from .errors import (
    InconsistencyError,
    QhmError,
    SolverBreakdown,
    SolverError,
    ValidationError,
)
from .experiments import (
    ExperimentResult,
    ball_chain,
    run_converge,
    run_equal_glue_demo,
    run_glue_diverge,
)
from .fixtures import Expected, Fixture, fixture, fixture_keys
from .msolver import (
    AscentTrace,
    GluePrediction,
    InvariantSolve,
    MDecision,
    MaximalityReport,
    SequenceRow,
    ascent_oracle,
    glued_invariant,
    glued_m_predict,
    invariant_measure,
    m_constant,
    sequence_diagnostics,
    sequence_rows_csv,
    verify_maximal,
)
from .spaces import (
    FiniteMetricSpace,
    GlueSpec,
    ball_discretization,
    diameter,
    euclidean_cloud,
    glue,
    interval_grid,
    load_space,
    random_metric,
    regular_polygon_arc,
    save_space,
    subspace,
    validate_metric,
)

__version__ = "0.1.0"

__all__ = [
    "AscentTrace",
    "Classification",
    "DEFAULT_TOL",
    "Expected",
    "ExperimentResult",
    "FiniteMetricSpace",
    "Fixture",
    "GluePrediction",
    "GlueSpec",
    "HAS_NUMBA",
    "InconsistencyError",
    "InvariantSolve",
    "KernelFlatValue",
    "MASS_TOL",
    "MDecision",
    "MaximalityReport",
    "QhmError",
    "SequenceRow",
    "SignedMeasure",
    "SolverBreakdown",
    "SolverError",
    "ValidationError",
    "Verdict",
    "ascent_oracle",
    "atomic",
    "ball_chain",
    "ball_discretization",
    "centered_form",
    "classify",
    "default_flatness_tol",
    "diameter",
    "energy",
    "energy_bilinear",
    "euclidean_cloud",
    "fixture",
    "fixture_keys",
    "glue",
    "glued_invariant",
    "glued_m_predict",
    "inner_extended",
    "inner_zero",
    "interval_grid",
    "invariant_measure",
    "kernel_flat_values",
    "load_measure",
    "load_space",
    "m_constant",
    "measure",
    "potential",
    "random_metric",
    "regular_polygon_arc",
    "run_converge",
    "run_equal_glue_demo",
    "run_glue_diverge",
    "save_measure",
    "save_space",
    "seminorm_zero",
    "sequence_diagnostics",
    "sequence_rows_csv",
    "subspace",
    "uniform",
    "validate_metric",
    "verify_maximal",
]
