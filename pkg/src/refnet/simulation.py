"""Finite-population urn-ball simulation of the referral market.

Used as an independent oracle for the analytic limits: offer receipt
probabilities ``1 - exp(-p[X])``, referral-offer shares, and the welfare gap.

Only the ``N`` firms that employ a high-ability period-1 worker refer.
Each refers with probability ``tau`` of its worker's group; the tie lands on
the same ability with probability ``alpha`` and, independently, on the same
group with probability ``phi`` of that group, then on a uniformly random
worker of the target cell. Tied firms draw a wage ``w(U)`` with ``U``
uniform; workers take their best offer or the market wage.

Two population layouts are supported. ``"equal"`` gives every cell ``N``
workers, which is the normalization under which the per-worker offer
intensity converges to ``p[X]``. ``"proportional"`` splits ``2N`` workers by
group share; there the intensity in cell ``X`` converges to ``p[X]`` divided
by the group share, so it does not reproduce the analytic escape rates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .equilibrium import Equilibrium, solve_equilibrium
from .model import CELLS, Group, NetworkParams
from .welfare import exact_gap, welfare_from_equilibrium

POPULATIONS = ("equal", "proportional")


class SimConfigError(ValueError):
    pass


def largest_remainder(total: int, weights: Sequence[float]) -> list[int]:
    w = np.asarray(weights, dtype=float)
    raw = total * w / w.sum()
    base = np.floor(raw).astype(int)
    short = total - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    return base.tolist()


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    n_firms: int
    replications: int = 1
    seed: int = 0
    equilibrium: Optional[Equilibrium] = field(default=None, repr=False)
    population: str = "equal"
    workers: int = 1

    def __post_init__(self):
        if self.n_firms < 10:
            raise SimConfigError("n_firms must be at least 10")
        if self.replications < 1:
            raise SimConfigError("replications must be positive")
        if self.population not in POPULATIONS:
            raise SimConfigError(f"population must be one of {POPULATIONS}")
        if not 0 <= self.seed < 2**64:
            raise SimConfigError("seed must fit in 64 unsigned bits")
        if self.equilibrium is None:
            object.__setattr__(self, "equilibrium", solve_equilibrium(self.params, n_quantiles=2))

    def cell_sizes(self) -> list[int]:
        n = self.n_firms
        if self.population == "equal":
            sizes = [n] * 4
        else:
            d = self.params.delta
            sizes = largest_remainder(2 * n, [d / 2, (1 - d) / 2, d / 2, (1 - d) / 2])
        if min(sizes) == 0:
            raise SimConfigError("a worker cell rounds to zero; increase n_firms")
        return sizes

    def firm_counts(self) -> tuple[int, int]:
        n_maj, n_min = largest_remainder(self.n_firms, [self.params.delta, 1 - self.params.delta])
        return n_maj, n_min


@dataclass(frozen=True)
class SimReport:
    offer_receipt_rate: dict[str, float]
    offer_receipt_se: dict[str, float]
    acceptance_given_offer: dict[str, float]
    acceptance_se: dict[str, float]
    mean_wage: dict[str, float]
    mean_wage_se: dict[str, float]
    minority_offer_share: float
    minority_offer_share_se: float
    gap_hat: float
    gap_se: float
    analytic: dict[str, float]
    n_firms: int
    replications: int
    seed: int
    population: str

    def to_json_dict(self) -> dict:
        return {
            "n_firms": self.n_firms,
            "replications": self.replications,
            "seed": self.seed,
            "population": self.population,
            "offer_receipt_rate": self.offer_receipt_rate,
            "offer_receipt_se": self.offer_receipt_se,
            "acceptance_given_offer": self.acceptance_given_offer,
            "acceptance_se": self.acceptance_se,
            "mean_wage": self.mean_wage,
            "mean_wage_se": self.mean_wage_se,
            "minority_offer_share": self.minority_offer_share,
            "minority_offer_share_se": self.minority_offer_share_se,
            "gap_hat": self.gap_hat,
            "gap_se": self.gap_se,
            "analytic": self.analytic,
        }


def _replicate(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """One market draw.

    Returns receipt rate per cell (4), acceptance rate per cell (4), mean
    high-ability wage by group (2), minority offer share, and the gap.
    """
    prm, eq = cfg.params, cfg.equilibrium
    sizes = np.array(cfg.cell_sizes())
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    n_maj, n_min = cfg.firm_counts()

    # every simulated firm employs a high-ability worker; low-ability firms never refer
    firm_group = np.repeat([0, 1], [n_maj, n_min])  # 0 = majority, 1 = minority
    tau = np.where(firm_group == 0, prm.tau_maj, prm.tau_min)
    tied = rng.random(cfg.n_firms) < tau
    g = firm_group[tied]
    m = g.size

    phi = np.where(g == 0, prm.phi_maj, prm.phi_min)
    same_ability = rng.random(m) < prm.alpha
    same_group = rng.random(m) < phi
    target_group = np.where(same_group, g, 1 - g)
    # cell index follows CELLS: H_maj, H_min, L_maj, L_min
    target_cell = np.where(same_ability, 0, 2) + target_group
    idx = (rng.random(m) * sizes[target_cell]).astype(np.int64)
    worker = offsets[target_cell] + idx
    wages = np.asarray(eq.wage(rng.random(m)), dtype=float).reshape(-1)

    total = int(sizes.sum())
    assert m <= cfg.n_firms
    assert m == 0 or (wages.min() >= eq.w_m2 - 1e-12 and wages.max() <= eq.w_r_max + 1e-12)

    n_offers = np.bincount(worker, minlength=total)
    best = np.full(total, -np.inf)
    np.maximum.at(best, worker, wages)
    accepted = wages == best[worker]
    realized = np.where(n_offers > 0, best, eq.w_m2)

    out = []
    for k in range(4):
        sl = slice(offsets[k], offsets[k] + sizes[k])
        out.append(np.mean(n_offers[sl] > 0))
    offers_in = np.bincount(target_cell, minlength=4)
    acc_in = np.bincount(target_cell, weights=accepted.astype(float), minlength=4)
    for k in range(4):
        out.append(acc_in[k] / offers_in[k] if offers_in[k] else math.nan)
    mean_h = [np.mean(realized[offsets[k] : offsets[k] + sizes[k]]) for k in (0, 1)]
    out.extend(mean_h)
    out.append((offers_in[1] + offers_in[3]) / m if m else math.nan)
    out.append(1.0 - mean_h[1] / mean_h[0])
    return np.array(out, dtype=float)


def _mean_se(col: np.ndarray) -> tuple[float, float]:
    ok = col[~np.isnan(col)]
    if ok.size == 0:
        return math.nan, math.nan
    se = float(np.std(ok, ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else math.nan
    return float(np.mean(ok)), se


def simulate(cfg: SimConfig) -> SimReport:
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    gens = [np.random.Generator(np.random.PCG64(s)) for s in children]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(lambda r: _replicate(cfg, r), gens))
    else:
        rows = [_replicate(cfg, r) for r in gens]
    stats = np.vstack(rows)

    labels = [x.label for x in CELLS]
    receipt = [_mean_se(stats[:, k]) for k in range(4)]
    accept = [_mean_se(stats[:, 4 + k]) for k in range(4)]
    wage_maj, wage_min = _mean_se(stats[:, 8]), _mean_se(stats[:, 9])
    share = _mean_se(stats[:, 10])
    gap = _mean_se(stats[:, 11])

    eq = cfg.equilibrium
    e = eq.rates.e
    analytic = {f"escape_{x.label}": e[x] for x in CELLS}
    analytic.update({f"acceptance_{x.label}": _analytic_acceptance(eq.rates.p[x]) for x in CELLS})
    try:
        shortcut = welfare_from_equilibrium(eq).gap
        exact = exact_gap(eq)
    except ZeroDivisionError:
        shortcut = exact = math.nan
    analytic.update(gap_shortcut=shortcut, gap_exact=exact, shortcut_residual=shortcut - exact)
    analytic["gap_hat_minus_shortcut"] = gap[0] - shortcut

    return SimReport(
        offer_receipt_rate=dict(zip(labels, (r[0] for r in receipt))),
        offer_receipt_se=dict(zip(labels, (r[1] for r in receipt))),
        acceptance_given_offer=dict(zip(labels, (a[0] for a in accept))),
        acceptance_se=dict(zip(labels, (a[1] for a in accept))),
        mean_wage={Group.MAJORITY.value: wage_maj[0], Group.MINORITY.value: wage_min[0]},
        mean_wage_se={Group.MAJORITY.value: wage_maj[1], Group.MINORITY.value: wage_min[1]},
        minority_offer_share=share[0],
        minority_offer_share_se=share[1],
        gap_hat=gap[0],
        gap_se=gap[1],
        analytic=analytic,
        n_firms=cfg.n_firms,
        replications=cfg.replications,
        seed=cfg.seed,
        population=cfg.population,
    )


def _analytic_acceptance(p: float) -> float:
    """Probability an offer at a uniform quantile is the recipient's best."""
    return 1.0 if p == 0 else -math.expm1(-p) / p


def convergence_study(base: SimConfig, n_grid: Sequence[int]) -> list[tuple[int, float]]:
    """Largest per-cell gap between simulated and limiting offer-receipt rates."""
    if list(n_grid) != sorted(n_grid):
        raise ValueError("n_grid must be increasing")
    target = {x.label: 1.0 - base.equilibrium.rates.e[x] for x in CELLS}
    rows = []
    for n in n_grid:
        cfg = SimConfig(
            base.params, int(n), base.replications, base.seed, base.equilibrium, base.population, base.workers
        )
        rep = simulate(cfg)
        dev = max(abs(rep.offer_receipt_rate[k] - target[k]) for k in target)
        rows.append((int(n), dev))
    return rows

