"""Energy-efficiency analysis and optimization of zero-forcing uplink multiuser MIMO."""

__version__ = "0.1.0"

from .core import (
    DesignPoint, DomainError, EEResult, NormalizedParams, PhysicalParams, achievable_rate,
    denormalize, evaluate_ee, gamma_u_upper_bound, inverse_zeta, mud_power, normalize,
    op_count, required_gamma_u,
)
from .ideal_csi import csi_optimum, fixed_k_penalty_bound, x_prime, zeta_csi
from .montecarlo import SimConfig, SimOutcome, simulate
from .optimizer import (
    Optimum, SearchCaps, optimize_fixed_k, optimize_fixed_mk, optimize_integer,
    optimize_relaxed,
)
from .regime import (
    Regime, RegimeReport, check_conditions, classify, k_max, nonmassive_condition,
    nonmassive_ee_bracket,
)

__all__ = [
    "DesignPoint", "DomainError", "EEResult", "NormalizedParams", "PhysicalParams",
    "achievable_rate", "denormalize", "evaluate_ee", "gamma_u_upper_bound", "inverse_zeta",
    "mud_power", "normalize", "op_count", "required_gamma_u",
    "csi_optimum", "fixed_k_penalty_bound", "x_prime", "zeta_csi",
    "SimConfig", "SimOutcome", "simulate",
    "Optimum", "SearchCaps", "optimize_fixed_k", "optimize_fixed_mk", "optimize_integer",
    "optimize_relaxed",
    "Regime", "RegimeReport", "check_conditions", "classify", "k_max",
    "nonmassive_condition", "nonmassive_ee_bracket",
]
