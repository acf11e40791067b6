"""Model primitives: parameters, worker cells, homophily and offer-rate algebra.

Every other module consumes :class:`NetworkParams` and :class:`DerivedRates`.
All quantities are plain floats; the objects are frozen and safe to share.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import Mapping

import numpy as np


class ParameterError(ValueError):
    """Raised when a model input lies outside its admissible range."""

    def __init__(self, field: str, value: float, allowed: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} is outside the admissible range {allowed}")


class Ability(enum.Enum):
    HIGH = "H"
    LOW = "L"


class Group(enum.Enum):
    MAJORITY = "maj"
    MINORITY = "min"


class WorkerCell(enum.Enum):
    """The four period-2 worker categories."""

    H_MAJ = (Ability.HIGH, Group.MAJORITY)
    H_MIN = (Ability.HIGH, Group.MINORITY)
    L_MAJ = (Ability.LOW, Group.MAJORITY)
    L_MIN = (Ability.LOW, Group.MINORITY)

    @property
    def ability(self) -> Ability:
        return self.value[0]

    @property
    def group(self) -> Group:
        return self.value[1]

    @property
    def label(self) -> str:
        return f"{self.ability.value}_{self.group.value}"

    @classmethod
    def of(cls, ability: Ability, group: Group) -> "WorkerCell":
        return cls((ability, group))


CELLS: tuple[WorkerCell, ...] = tuple(WorkerCell)
HIGH_CELLS = (WorkerCell.H_MAJ, WorkerCell.H_MIN)
LOW_CELLS = (WorkerCell.L_MAJ, WorkerCell.L_MIN)

# (field, low, high, low_closed, high_closed)
_RANGES = {
    "delta": (0.5, 1.0, False, False),
    "alpha": (0.5, 1.0, False, True),
    "tau_maj": (0.0, 1.0, False, True),
    "tau_min": (0.0, 1.0, False, True),
    "psi_maj": (0.5, 1.0, True, False),
    "psi_min": (0.5, 1.0, True, False),
}


def _check_range(name: str, value: float, lo: float, hi: float, lo_closed: bool, hi_closed: bool) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, value, "(a real number)") from None
    ok_lo = v >= lo if lo_closed else v > lo
    ok_hi = v <= hi if hi_closed else v < hi
    if not (math.isfinite(v) and ok_lo and ok_hi):
        allowed = f"{'[' if lo_closed else '('}{lo:g}, {hi:g}{']' if hi_closed else ')'}"
        raise ParameterError(name, value, allowed)
    return v


@dataclass(frozen=True)
class NetworkParams:
    """The six model primitives.

    ``delta`` is the majority share of the labor force, ``alpha`` the ability
    in-group bias, ``tau_*`` the network densities and ``psi_*`` the type
    in-group biases. The closed upper bound on ``alpha`` and ``tau`` admits
    full ability sorting and certain ties.
    """

    delta: float
    alpha: float
    tau_maj: float
    tau_min: float
    psi_maj: float
    psi_min: float

    def __post_init__(self):
        for name, (lo, hi, lo_c, hi_c) in _RANGES.items():
            object.__setattr__(self, name, _check_range(name, getattr(self, name), lo, hi, lo_c, hi_c))

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> "NetworkParams":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise KeyError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        missing = names - set(data)
        if missing:
            raise KeyError(f"missing parameter(s): {', '.join(sorted(missing))}")
        return cls(**{k: data[k] for k in names})

    @classmethod
    def uniform(cls, delta: float, value: float, alpha: float | None = None) -> "NetworkParams":
        """Equal-magnitude parameters: both densities and both biases set to ``value``."""
        return cls(delta, value if alpha is None else alpha, value, value, value, value)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def replace(self, **changes: float) -> "NetworkParams":
        return NetworkParams(**{**self.as_dict(), **changes})

    @property
    def phi_maj(self) -> float:
        return homophily_share(self.delta, self.psi_maj)

    @property
    def phi_min(self) -> float:
        return homophily_share(1.0 - self.delta, self.psi_min)


CALIBRATION = NetworkParams(delta=0.70, alpha=1.0, tau_maj=0.41, tau_min=0.43, psi_maj=0.87, psi_min=0.83)
"""Parameter set estimated from the Add Health friendship networks."""


def homophily_share(w: float, psi: float) -> float:
    """Probability that a worker of a group with population share ``w`` knows
    someone of their own group, given in-group bias ``psi``."""
    w = _check_range("w", w, 0.0, 1.0, False, False)
    psi = _check_range("psi", psi, 0.5, 1.0, True, False)
    num = w * psi
    return num / (num + (1.0 - w) * (1.0 - psi))


def homophily_bias(w: float, phi: float) -> float:
    """Inverse of :func:`homophily_share` in ``psi``."""
    w = _check_range("w", w, 0.0, 1.0, False, False)
    phi = _check_range("phi", phi, 0.0, 1.0, True, False)
    if phi < w:
        raise ParameterError("phi", phi, f"[{w:g}, 1) (phi below the population share implies heterophily)")
    num = phi * (1.0 - w)
    return num / (num + w * (1.0 - phi))


@dataclass(frozen=True)
class DerivedRates:
    """Same-type tie shares, Poisson offer rates and escape probabilities.

    ``p[X]`` is the limiting expected number of referral offers a worker in
    cell ``X`` receives; ``e[X] = exp(-p[X])`` is the probability of receiving
    none (and hence taking the market wage).
    """

    phi_maj: float
    phi_min: float
    p: Mapping[WorkerCell, float]
    e: Mapping[WorkerCell, float]

    def p_array(self) -> np.ndarray:
        """Offer rates ordered as :data:`CELLS`."""
        return np.array([self.p[x] for x in CELLS])

    def e_array(self) -> np.ndarray:
        return np.array([self.e[x] for x in CELLS])


def _offer_rates(params: NetworkParams, phi_maj: float, phi_min: float, alpha: float) -> dict[WorkerCell, float]:
    d = params.delta
    to_maj = d * params.tau_maj * phi_maj + (1 - d) * params.tau_min * (1 - phi_min)
    to_min = d * params.tau_maj * (1 - phi_maj) + (1 - d) * params.tau_min * phi_min
    return {
        WorkerCell.H_MAJ: alpha * to_maj,
        WorkerCell.H_MIN: alpha * to_min,
        WorkerCell.L_MAJ: (1 - alpha) * to_maj,
        WorkerCell.L_MIN: (1 - alpha) * to_min,
    }


def derived_rates(params: NetworkParams) -> DerivedRates:
    phi_maj, phi_min = params.phi_maj, params.phi_min
    p = _offer_rates(params, phi_maj, phi_min, params.alpha)
    e = {x: math.exp(-v) for x, v in p.items()}
    return DerivedRates(phi_maj=phi_maj, phi_min=phi_min, p=p, e=e)


def referral_offer_shares(params: NetworkParams) -> tuple[float, float]:
    """Fractions of all referral offers that reach majority and minority workers.

    Independent of ``alpha``: the ability coin splits each group's offers
    without moving them across groups.
    """
    d = params.delta
    total = d * params.tau_maj + (1 - d) * params.tau_min
    to_maj = d * params.tau_maj * params.phi_maj + (1 - d) * params.tau_min * (1 - params.phi_min)
    share_maj = to_maj / total
    return share_maj, 1.0 - share_maj


def homophily_sensitivity(w: float, psi_grid) -> list[tuple[float, float, float]]:
    """Rows of ``(psi, phi, linear)`` where ``linear`` is the straight line from
    ``(1/2, w)`` to ``(1, 1)``, i.e. the no-amplification reference."""
    rows = []
    for psi in psi_grid:
        psi = float(psi)
        phi = homophily_share(w, psi)
        linear = w + (1.0 - w) * (psi - 0.5) / 0.5
        rows.append((psi, phi, linear))
    return rows
