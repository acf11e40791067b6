"""Period-2 market wage, referral profit constant and the referral wage schedule.

The equilibrium offer distribution F has no closed form, but the
constant-profit condition is explicit in the wage once F is fixed, so the
schedule is carried as ``w(q)`` over the quantile ``q = F(w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .model import HIGH_CELLS, LOW_CELLS, DerivedRates, NetworkParams, WorkerCell, derived_rates

DEFAULT_QUANTILES = 1001
MONOTONE_CHECK_STEP = 1e-3


class DegenerateScheduleError(ArithmeticError):
    """The referral wage schedule is not strictly increasing."""


def market_wage(rates: DerivedRates, params: NetworkParams) -> float:
    """Expected productivity of the workers who end up in the period-2 market."""
    e, d = rates.e, params.delta
    num = e[WorkerCell.H_MAJ] * d + e[WorkerCell.H_MIN] * (1 - d)
    den = (e[WorkerCell.H_MAJ] + e[WorkerCell.L_MAJ]) * d + (e[WorkerCell.H_MIN] + e[WorkerCell.L_MIN]) * (1 - d)
    return num / den


def profit_constant(rates: DerivedRates, w_m2: float) -> float:
    """Expected referral profit of a high-ability-employing firm.

    Evaluated at the bottom of the support, where the referral is accepted
    only if the acquaintance has no other offer.
    """
    gain = sum(rates.p[x] * rates.e[x] for x in HIGH_CELLS) * (1 - w_m2)
    loss = sum(rates.p[x] * rates.e[x] for x in LOW_CELLS) * w_m2
    return gain - loss


def _weights(p: np.ndarray, q):
    q = np.asarray(q, dtype=float)
    # shape (..., 4): p[X] * exp(-p[X] (1 - q))
    return p * np.exp(-np.multiply.outer(1.0 - q, p))


def wage_at_quantile(rates: DerivedRates, c: float, q):
    """Referral wage offered by the fraction ``q`` of firms paying less.

    Accepts a scalar or an array of quantiles in ``[0, 1]``.
    """
    qa = np.asarray(q, dtype=float)
    if np.any((qa < 0) | (qa > 1)):
        raise ValueError("quantile must lie in [0, 1]")
    wts = _weights(rates.p_array(), qa)
    w = (wts[..., 0] + wts[..., 1] - c) / wts.sum(axis=-1)
    return float(w) if np.ndim(w) == 0 else w


def max_referral_wage(rates: DerivedRates, c: float) -> float:
    high = sum(rates.p[x] for x in HIGH_CELLS)
    low = sum(rates.p[x] for x in LOW_CELLS)
    return (high - c) / (high + low)


def period1_wage(c: float) -> float:
    """Period-1 market wage: mean productivity plus half the referral option value."""
    if c < 0:
        raise ValueError("profit constant must be non-negative")
    return 0.5 * (1.0 + c)


def expected_profit_high(rates: DerivedRates, w, q):
    """Expected referral profit of a firm with a high-ability worker offering
    wage ``w`` that sits at quantile ``q`` of the offer distribution."""
    wts = _weights(rates.p_array(), q)
    w = np.asarray(w, dtype=float)
    out = (wts[..., 0] + wts[..., 1]) * (1 - w) - (wts[..., 2] + wts[..., 3]) * w
    return float(out) if np.ndim(out) == 0 else out


def expected_profit_low(rates: DerivedRates, w_m2: float, q, c: float | None = None):
    """Expected profit of a low-ability-employing firm that deviates and refers.

    Its own tie reaches a low-ability worker with probability ``alpha``, so
    the targeting factor of each cell is swapped with its opposite-ability
    counterpart; the acceptance factor still reflects competing offers from
    the equilibrium referrers. ``w_m2`` fixes ``c`` when ``c`` is not given.
    """
    p = rates.p_array()
    if c is None:
        c = profit_constant(rates, w_m2)
    w = np.asarray(wage_at_quantile(rates, c, q))
    accept = np.exp(-np.multiply.outer(1.0 - np.asarray(q, dtype=float), p))
    own = p[[2, 3, 0, 1]]
    out = (own[0] * accept[..., 0] + own[1] * accept[..., 1]) * (1 - w) - (
        own[2] * accept[..., 2] + own[3] * accept[..., 3]
    ) * w
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Equilibrium:
    params: NetworkParams
    rates: DerivedRates
    w_m2: float
    c: float
    w_r_max: float
    w_m1: float
    quantiles: np.ndarray = field(repr=False)
    wages: np.ndarray = field(repr=False)

    @property
    def schedule(self) -> list[tuple[float, float]]:
        return list(zip(self.quantiles.tolist(), self.wages.tolist()))

    def wage(self, q):
        return wage_at_quantile(self.rates, self.c, q)

    def quantile_of_wage(self, w: float, wtol: float = 1e-10) -> float:
        """Invert the schedule by bisection; ``w`` must lie in the support."""
        lo, hi = self.w_m2, self.w_r_max
        if not (lo - wtol <= w <= hi + wtol):
            raise ValueError(f"wage {w} outside referral support [{lo}, {hi}]")
        if w <= lo:
            return 0.0
        if w >= hi:
            return 1.0
        return optimize.bisect(lambda q: self.wage(q) - w, 0.0, 1.0, xtol=0.1 * wtol)

    def summary(self) -> dict:
        return {
            "w_m2": self.w_m2,
            "c": self.c,
            "w_m1": self.w_m1,
            "w_r_max": self.w_r_max,
            "schedule_points": int(self.quantiles.size),
            "schedule_median": float(self.wage(0.5)),
        }


def check_monotone(rates: DerivedRates, c: float, step: float = MONOTONE_CHECK_STEP) -> None:
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    w = wage_at_quantile(rates, c, grid)
    if not np.all(np.diff(w) > 0):
        bad = int(np.argmin(np.diff(w)))
        raise DegenerateScheduleError(
            f"referral wage schedule not strictly increasing near q={grid[bad]:.3f}"
        )


def solve_equilibrium(params: NetworkParams, n_quantiles: int = DEFAULT_QUANTILES) -> Equilibrium:
    if n_quantiles < 2:
        raise ValueError("need at least two schedule points")
    rates = derived_rates(params)
    w_m2 = market_wage(rates, params)
    c = profit_constant(rates, w_m2)
    check_monotone(rates, c)
    q = np.linspace(0.0, 1.0, n_quantiles)
    wages = wage_at_quantile(rates, c, q)
    return Equilibrium(
        params=params,
        rates=rates,
        w_m2=w_m2,
        c=c,
        w_r_max=max_referral_wage(rates, c),
        w_m1=period1_wage(c),
        quantiles=q,
        wages=np.atleast_1d(wages),
    )
