"""Compensating minority network parameters for referral-offer parity.

Parity means the minority share of referral offers equals the minority share
of the labor force. The condition is linear in ``tau_min`` and in ``phi_min``,
so both solves are closed-form; ``alpha`` cancels and is accepted only for
call-site symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import NetworkParams, homophily_bias, homophily_share

PARITY_PARAMS = ("delta", "tau_maj", "tau_min", "psi_maj", "psi_min")


@dataclass(frozen=True)
class CompensatingValue:
    """A compensating parameter together with its feasibility.

    ``value`` is always the unclamped linear solution (``nan`` when the
    coefficient vanishes) so truncated sweeps remain diagnosable.
    """

    value: float
    feasible: bool
    residual: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ParitySolution:
    tau_min_eq: CompensatingValue
    psi_min_eq: CompensatingValue


def parity_residual(delta: float, tau_maj: float, tau_min: float, phi_maj: float, phi_min: float) -> float:
    """Left minus right side of the parity condition."""
    d = delta
    lhs = (1 - d) * (d * tau_maj * phi_maj + (1 - d) * tau_min * (1 - phi_min))
    rhs = d * (d * tau_maj * (1 - phi_maj) + (1 - d) * tau_min * phi_min)
    return lhs - rhs


def compensating_density(
    delta: float, alpha: float, tau_maj: float, psi_maj: float, psi_min: float
) -> CompensatingValue:
    """Minority network density that equalizes referral-offer shares."""
    NetworkParams(delta, alpha, tau_maj, tau_maj, psi_maj, psi_min)  # range validation
    d = delta
    phi_maj = homophily_share(d, psi_maj)
    phi_min = homophily_share(1 - d, psi_min)
    coef = (1 - d) * (d * phi_min - (1 - d) * (1 - phi_min))
    rhs = d * tau_maj * ((1 - d) * phi_maj - d * (1 - phi_maj))
    if coef == 0.0 or abs(coef) < 1e-15 * max(1.0, abs(rhs)):
        return CompensatingValue(math.nan, False, math.nan)
    tau = rhs / coef
    feasible = 0.0 < tau <= 1.0
    return CompensatingValue(tau, feasible, parity_residual(d, tau_maj, tau, phi_maj, phi_min))


def required_phi_min(delta: float, tau_maj: float, tau_min: float, phi_maj: float) -> float:
    d = delta
    num = (1 - d) * d * tau_maj * phi_maj + (1 - d) ** 2 * tau_min - d * d * tau_maj * (1 - phi_maj)
    return num / ((1 - d) * tau_min)


def compensating_bias(
    delta: float, alpha: float, tau_maj: float, tau_min: float, psi_maj: float
) -> CompensatingValue:
    """Minority in-group bias that equalizes referral-offer shares.

    Feasible whenever ``tau_min * (1 - delta) >= tau_maj * (phi_maj - delta)``,
    in particular whenever ``tau_min >= tau_maj``.
    """
    NetworkParams(delta, alpha, tau_maj, tau_min, psi_maj, 0.5)
    d = delta
    phi_maj = homophily_share(d, psi_maj)
    phi_min = required_phi_min(d, tau_maj, tau_min, phi_maj)
    w = 1 - d
    if not (w <= phi_min < 1.0):
        # report the bias the linear solve would need, extended past the valid range
        if phi_min >= 1.0:
            psi = 1.0 if phi_min == 1.0 else math.inf
        else:
            psi = phi_min * d / (phi_min * d + w * (1 - phi_min))
        return CompensatingValue(psi, False, math.nan)
    psi = homophily_bias(w, phi_min)
    feasible = 0.5 <= psi < 1.0
    residual = parity_residual(d, tau_maj, tau_min, phi_maj, homophily_share(w, psi)) if feasible else math.nan
    return CompensatingValue(psi, feasible, residual)


def solve_parity(params: NetworkParams) -> ParitySolution:
    return ParitySolution(
        tau_min_eq=compensating_density(params.delta, params.alpha, params.tau_maj, params.psi_maj, params.psi_min),
        psi_min_eq=compensating_bias(params.delta, params.alpha, params.tau_maj, params.tau_min, params.psi_maj),
    )


def parity_sweep(varying: str, grid: Iterable[float], fixed: NetworkParams | Mapping[str, float]) -> list[dict]:
    """Compensating parameters along a one-dimensional grid.

    Each row holds the swept ``value`` and both compensating values; the one
    that coincides with the swept parameter is omitted (``None``), and
    infeasible entries are ``None`` with the raw solve kept under ``*_raw``.
    """
    if varying not in PARITY_PARAMS:
        raise ValueError(f"cannot sweep {varying!r}; choose from {', '.join(PARITY_PARAMS)}")
    base = fixed if isinstance(fixed, NetworkParams) else NetworkParams.from_mapping(fixed)
    rows = []
    for value in grid:
        pr = base.replace(**{varying: float(value)})
        row: dict = {"value": float(value)}
        if varying != "tau_min":
            t = compensating_density(pr.delta, pr.alpha, pr.tau_maj, pr.psi_maj, pr.psi_min)
            row["tau_min_eq"] = t.value if t.feasible else None
            row["tau_min_eq_raw"] = t.value
        if varying != "psi_min":
            s = compensating_bias(pr.delta, pr.alpha, pr.tau_maj, pr.tau_min, pr.psi_maj)
            row["psi_min_eq"] = s.value if s.feasible else None
            row["psi_min_eq_raw"] = s.value
        rows.append(row)
    return rows
