"""Exact quantum states of a charged particle in a Penning trap built by
carrying stationary states along classical orbits.

``PENNING_THREADS`` caps the thread pools of the numerical libraries; it is
read here, before numpy is first imported by the submodules.
"""

import os as _os

_threads = _os.environ.get("PENNING_THREADS")
if _threads:
    if not _threads.isdigit() or int(_threads) < 1:
        raise ValueError(f"PENNING_THREADS must be a positive integer, got {_threads!r}")
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .classical import (  # noqa: E402
    Trajectory,
    canonical_rhs,
    evaluate_trajectory,
    hamiltonian_value,
    integrate_oracle,
    quadratic_form_Q,
    read_trajectory_csv,
    write_trajectory_csv,
)
from .ict import (  # noqa: E402
    IctState,
    IllConditionedWarning,
    central_moment,
    centroid,
    continuity_residual,
    current_ict,
    density_ict,
    eval_ict,
    schrodinger_residual,
)
from .numverify import (  # noqa: E402
    BoundaryMassWarning,
    GridField,
    GridSpec,
    auto_grid,
    born_points,
    gram_matrix,
    integrate,
    read_field_csv,
    sample,
    write_field_csv,
)
from .specialfn import QuantumNumbers, hermite, laguerre_assoc, log_normalization  # noqa: E402
from .stationary import StationaryState, energy, eval_density_current, eval_eigenfunction  # noqa: E402
from .superfid import (  # noqa: E402
    SpecialTrajectoryParams,
    SuperpositionState,
    eval_ground_ict,
    eval_superposition,
    fidelity_analytic,
    fidelity_numeric,
    special_trajectory,
    superposition_central_moments,
    superposition_moments_closed_form,
    trajectory_distance,
)
from .trapcore import (  # noqa: E402
    DerivedFrequencies,
    PhaseSpacePoint,
    TrapParameters,
    UntrappedConfigurationError,
    characteristic_lengths,
    check_stability,
    derive_frequencies,
)

__version__ = "0.1.0"

__all__ = [
    "Trajectory",
    "canonical_rhs",
    "evaluate_trajectory",
    "hamiltonian_value",
    "integrate_oracle",
    "quadratic_form_Q",
    "read_trajectory_csv",
    "write_trajectory_csv",
    "IctState",
    "IllConditionedWarning",
    "central_moment",
    "centroid",
    "continuity_residual",
    "current_ict",
    "density_ict",
    "eval_ict",
    "schrodinger_residual",
    "BoundaryMassWarning",
    "GridField",
    "GridSpec",
    "auto_grid",
    "born_points",
    "gram_matrix",
    "integrate",
    "read_field_csv",
    "sample",
    "write_field_csv",
    "QuantumNumbers",
    "hermite",
    "laguerre_assoc",
    "log_normalization",
    "StationaryState",
    "energy",
    "eval_density_current",
    "eval_eigenfunction",
    "SpecialTrajectoryParams",
    "SuperpositionState",
    "eval_ground_ict",
    "eval_superposition",
    "fidelity_analytic",
    "fidelity_numeric",
    "special_trajectory",
    "superposition_central_moments",
    "superposition_moments_closed_form",
    "trajectory_distance",
    "DerivedFrequencies",
    "PhaseSpacePoint",
    "TrapParameters",
    "UntrappedConfigurationError",
    "characteristic_lengths",
    "check_stability",
    "derive_frequencies",
]
