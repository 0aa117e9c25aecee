"""Quantum Rényi divergences, conditional Rényi entropies and checks of their duality relations"""

from .divergences import (
    AlphaError,
    AlphaParam,
    DensityOperator,
    StateError,
    d_alpha_z,
    d_old,
    d_sandwiched,
    relative_entropy,
    renyi_entropy,
)
from .entropies import (
    EntropyKind,
    EntropyResult,
    conditional_von_neumann,
    entropy,
    h_down_old,
    h_down_sandwiched,
    h_up_old,
    h_up_sandwiched,
)
from .objects import KrausChannel, Povm, PureState, SeededRng
from .operators import SubsystemLayout
from .optimize import OptimizerConfig
from .verify import Suite, SuiteSpec, VerificationReport, run_suite

# Do not update __version__ manually. Use bump2version.
__version__ = "0.1.0"

__all__ = [
    "AlphaError",
    "AlphaParam",
    "DensityOperator",
    "EntropyKind",
    "EntropyResult",
    "KrausChannel",
    "OptimizerConfig",
    "Povm",
    "PureState",
    "SeededRng",
    "StateError",
    "SubsystemLayout",
    "Suite",
    "SuiteSpec",
    "VerificationReport",
    "__version__",
    "conditional_von_neumann",
    "d_alpha_z",
    "d_old",
    "d_sandwiched",
    "entropy",
    "h_down_old",
    "h_down_sandwiched",
    "h_up_old",
    "h_up_sandwiched",
    "relative_entropy",
    "renyi_entropy",
    "run_suite",
]
