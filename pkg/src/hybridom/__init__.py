"""Probe response of a double-cavity optomechanical system coupled to a qubit."""
from .exceptions import (
    GridTooCoarse,
    HybridOMError,
    NonConvergence,
    NotSettled,
    SingularDenominator,
    StepTooLarge,
    UndefinedNormalization,
    ValidationError,
)
from .features import analyze, classify_omia, cpt_roots_closed_form, find_cps, find_cpt_numeric
from .io import load_config, load_preset, preset_names
from .oracle import integrate_response, oracle_check
from .params import DriveConfig, Linear, NoQubit, Nonlinear, SystemParams, validate
from .response import response_at, sweep, transmission_eT, transmission_eT_reduced
from .steady_state import drive_from_steady, solve_steady, steady_residual

__version__ = "0.1.0"

__all__ = [
    "DriveConfig", "GridTooCoarse", "HybridOMError", "Linear", "NoQubit", "NonConvergence",
    "Nonlinear", "NotSettled", "SingularDenominator", "StepTooLarge", "SystemParams",
    "UndefinedNormalization", "ValidationError", "analyze", "classify_omia",
    "cpt_roots_closed_form", "drive_from_steady", "find_cps", "find_cpt_numeric",
    "integrate_response", "load_config", "load_preset", "oracle_check", "preset_names",
    "response_at", "solve_steady", "steady_residual", "sweep", "transmission_eT",
    "transmission_eT_reduced", "validate",
]
