"""Ionization of a parametrically driven one-dimensional delta well.

Three routes to the decay of the bound state: time-domain integration of
the bound-amplitude integral equation, continued fractions in the Laplace
domain, and small-amplitude closed forms.
"""

from ._accel import BACKEND
from .asymptotics import (
    GammaEstimate,
    gamma_staircase,
    golden_rule_rate,
    resonance_rate,
    stark_shift_estimate,
)
from .errors import ConfigError, ConvergenceError, DeltaIonError, DomainError, NumericalFailure, SolverInstability
from .kernel import KernelEvaluator, eval_M, eval_M_oracle
from .ladder import (
    LadderProblem,
    PoleResult,
    find_decay_pole,
    gamma_vs_omega_scan,
    ladder_coefficients,
    minimal_ratio,
    secular_function,
    solve_inhomogeneous,
)
from .model import UNITS, BoundState, ContinuumState, DriveSpec, UnitsConvention, bound_continuum_coupling, eval_eta
from .spectrum import MomentumSpectrum, compute_spectrum, ionized_fraction, reconstruct_wavefunction, unitarity_defects
from .volterra import SolverConfig, Trajectory, convergence_order_study, fit_decay_rate, solve_Y

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundState",
    "ConfigError",
    "ContinuumState",
    "ConvergenceError",
    "DeltaIonError",
    "DomainError",
    "DriveSpec",
    "GammaEstimate",
    "KernelEvaluator",
    "LadderProblem",
    "MomentumSpectrum",
    "NumericalFailure",
    "PoleResult",
    "SolverConfig",
    "SolverInstability",
    "Trajectory",
    "UNITS",
    "UnitsConvention",
    "bound_continuum_coupling",
    "compute_spectrum",
    "convergence_order_study",
    "eval_M",
    "eval_M_oracle",
    "eval_eta",
    "find_decay_pole",
    "fit_decay_rate",
    "gamma_staircase",
    "gamma_vs_omega_scan",
    "golden_rule_rate",
    "ionized_fraction",
    "ladder_coefficients",
    "minimal_ratio",
    "reconstruct_wavefunction",
    "resonance_rate",
    "secular_function",
    "solve_Y",
    "solve_inhomogeneous",
    "stark_shift_estimate",
    "unitarity_defects",
]
