"""Referral hiring with homophilous majority/minority networks.

Equilibrium wages, referral-offer shares, compensating network parameters,
welfare gaps, calibration from ego-network data, and a Monte Carlo oracle.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("refnet")
except PackageNotFoundError:  # source checkout without install
    __version__ = "0.1.0"

from .equilibrium import DegenerateScheduleError, Equilibrium, solve_equilibrium
from .model import CALIBRATION, DerivedRates, NetworkParams, ParameterError, WorkerCell, derived_rates
from .parity import compensating_bias, compensating_density, solve_parity
from .welfare import WelfareReport, welfare_report

__all__ = [
    "CALIBRATION",
    "DegenerateScheduleError",
    "DerivedRates",
    "Equilibrium",
    "NetworkParams",
    "ParameterError",
    "WelfareReport",
    "WorkerCell",
    "compensating_bias",
    "compensating_density",
    "derived_rates",
    "solve_equilibrium",
    "solve_parity",
    "welfare_report",
]
