"""Synthetic ego-network data that reproduces the published calibration aggregates.

Every respondent nominates nine alters, so each send network has ten nodes
and density ``k / 90`` for ``k`` directed ties. Group compositions fix the
heterogeneity index:

* majority egos: 30 networks of (9 maj, 1 min) -> 0.18 and 40 of (8 maj, 2 min) -> 0.32,
  mean 0.26 so psi_maj = 0.87;
* minority egos: (8 min, 1 maj, 1 other) -> 0.34, so psi_min = 0.83;
* tie counts: majority 7 x 36 + 63 x 37 -> tau_maj = 0.41, minority 9 x 38 + 21 x 39 -> tau_min = 0.43.

Three "other" respondents with no nominations exercise the exclusion path.
"""

from __future__ import annotations

from importlib import resources
from itertools import permutations
from pathlib import Path

from .calibration import MAJORITY, MINORITY, OTHER, EgoNetworkRecord, write_edges, write_records

N_ALTERS = 9


def _network(ego: str, group: str, alter_groups: list[str], k: int):
    alters = [f"{ego}.a{j}" for j in range(len(alter_groups))]
    rec = EgoNetworkRecord(ego, group, tuple(alters), dict(zip(alters, alter_groups)))
    ties = [(ego, a) for a in alters]
    extra = k - len(ties)
    nominated = set(ties)
    for u, v in permutations(alters + [ego], 2):
        if extra == 0:
            break
        if (u, v) not in nominated:
            ties.append((u, v))
            extra -= 1
    if extra:
        raise ValueError("too many ties requested")
    return rec, ties


def synthetic_fixture() -> tuple[list[EgoNetworkRecord], list[tuple[str, str]]]:
    records, edges = [], []
    for i in range(70):
        n_min = 1 if i < 30 else 2
        comp = [MAJORITY] * (N_ALTERS - n_min) + [MINORITY] * n_min
        rec, ties = _network(f"M{i:02d}", MAJORITY, comp, 36 if i < 7 else 37)
        records.append(rec)
        edges.extend(ties)
    for i in range(30):
        comp = [MINORITY] * 7 + [MAJORITY, OTHER]
        rec, ties = _network(f"m{i:02d}", MINORITY, comp, 38 if i < 9 else 39)
        records.append(rec)
        edges.extend(ties)
    for i in range(3):
        records.append(EgoNetworkRecord(f"o{i}", OTHER, ()))
    return records, edges


def write_synthetic_fixture(directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records, edges = synthetic_fixture()
    rp, ep = directory / "synthetic_respondents.csv", directory / "synthetic_edges.csv"
    write_records(rp, records)
    write_edges(ep, edges)
    return rp, ep


def shipped_fixture_paths() -> tuple[Path, Path]:
    base = resources.files("refnet") / "data"
    return Path(str(base / "synthetic_respondents.csv")), Path(str(base / "synthetic_edges.csv"))
