"""Optimal decode-and-forward relay thresholds: closed-form BER, Monte Carlo checks and ANN predictors."""

__version__ = "0.1.0"

from .ber_model import DEFAULT_VARIANT, FormulaVariant, OrderStatSize, closed_form_ber
from .link_model import LinkBudget, Scenario, average_link_snrs, db_to_linear, erfc, rayleigh_bpsk_ber
from .optimizer import OptimalThreshold, SearchConfig, optimal_threshold, threshold_sweep

__all__ = [
    "DEFAULT_VARIANT",
    "FormulaVariant",
    "LinkBudget",
    "OptimalThreshold",
    "OrderStatSize",
    "Scenario",
    "SearchConfig",
    "average_link_snrs",
    "closed_form_ber",
    "db_to_linear",
    "erfc",
    "optimal_threshold",
    "rayleigh_bpsk_ber",
    "threshold_sweep",
]
