"""Expected wages and the minority welfare gap.

The expected referral wage follows the calibration shortcut: offers are
treated as uniform draws on the quantile scale, the minority group is
normalized to one draw, and the majority group receives ``gamma`` draws, so
its expected best offer sits at quantile ``gamma / (gamma + 1)``. The exact
order-statistics value is available from :func:`exact_referral_wage` for
comparison.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import integrate

from .equilibrium import Equilibrium, solve_equilibrium, wage_at_quantile
from .model import DerivedRates, NetworkParams, WorkerCell

WELFARE_PARAMS = ("delta", "alpha", "tau_maj", "tau_min", "psi_maj", "psi_min")


@dataclass(frozen=True)
class WelfareReport:
    gamma_maj: float
    q_maj: float
    q_min: float
    ew_r_maj: float
    ew_r_min: float
    ew_maj: float
    ew_min: float
    gap: float
    w_m2: float
    w_r_max: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def gamma_ratio(rates: DerivedRates) -> float:
    """How much likelier a high-ability majority worker is to get a referral
    offer than a high-ability minority worker."""
    miss_min = 1.0 - rates.e[WorkerCell.H_MIN]
    if miss_min <= 0.0:
        raise ZeroDivisionError("high-ability minority workers receive no referral offers")
    return (1.0 - rates.e[WorkerCell.H_MAJ]) / miss_min


def expected_max_quantile(gamma: float) -> float:
    """Mean of the maximum of ``gamma`` standard uniforms, ``gamma`` real."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return gamma / (gamma + 1.0)


def expected_wage(escape: float, w_m2: float, ew_r: float) -> float:
    return escape * w_m2 + (1.0 - escape) * ew_r


def welfare_from_equilibrium(eq: Equilibrium) -> WelfareReport:
    rates = eq.rates
    gamma = gamma_ratio(rates)
    q_maj, q_min = expected_max_quantile(gamma), expected_max_quantile(1.0)
    ew_r_maj = wage_at_quantile(rates, eq.c, q_maj)
    ew_r_min = wage_at_quantile(rates, eq.c, q_min)
    ew_maj = expected_wage(rates.e[WorkerCell.H_MAJ], eq.w_m2, ew_r_maj)
    ew_min = expected_wage(rates.e[WorkerCell.H_MIN], eq.w_m2, ew_r_min)
    return WelfareReport(
        gamma_maj=gamma,
        q_maj=q_maj,
        q_min=q_min,
        ew_r_maj=ew_r_maj,
        ew_r_min=ew_r_min,
        ew_maj=ew_maj,
        ew_min=ew_min,
        gap=1.0 - ew_min / ew_maj,
        w_m2=eq.w_m2,
        w_r_max=eq.w_r_max,
    )


def welfare_report(params: NetworkParams) -> WelfareReport:
    return welfare_from_equilibrium(solve_equilibrium(params, n_quantiles=2))


def exact_referral_wage(eq: Equilibrium, cell: WorkerCell) -> float:
    """E[best referral wage | at least one offer] for a worker in ``cell``.

    With Poisson(p) offers at uniform quantiles the best quantile has CDF
    ``exp(-p (1 - q))`` on ``[0, 1]`` plus an atom ``exp(-p)`` at "no offer".
    """
    p = eq.rates.p[cell]
    if p <= 0.0:
        return math.nan
    dens = lambda q: eq.wage(q) * p * math.exp(-p * (1.0 - q))  # noqa: E731
    val, _ = integrate.quad(dens, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
    return val / -math.expm1(-p)


def exact_gap(eq: Equilibrium) -> float:
    """Welfare gap with order-statistics referral wages instead of the shortcut."""
    e = eq.rates.e
    ew_maj = expected_wage(e[WorkerCell.H_MAJ], eq.w_m2, exact_referral_wage(eq, WorkerCell.H_MAJ))
    ew_min = expected_wage(e[WorkerCell.H_MIN], eq.w_m2, exact_referral_wage(eq, WorkerCell.H_MIN))
    return 1.0 - ew_min / ew_maj


def welfare_sweep(
    varying: str, grid: Iterable[float], fixed: NetworkParams | Mapping[str, float]
) -> list[tuple[float, float]]:
    if varying not in WELFARE_PARAMS:
        raise ValueError(f"cannot sweep {varying!r}; choose from {', '.join(WELFARE_PARAMS)}")
    base = fixed if isinstance(fixed, NetworkParams) else NetworkParams.from_mapping(fixed)
    return [(float(v), welfare_report(base.replace(**{varying: float(v)})).gap) for v in grid]


def second_differences(values) -> np.ndarray:
    return np.diff(np.asarray(values, dtype=float), n=2)
