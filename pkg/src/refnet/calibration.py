"""Estimate network parameters from friendship-nomination data.

Input is a respondents CSV (``ego_id,group,alters`` with ``;``-separated
alter ids and an optional ``alter_groups`` column aligned with ``alters``)
and a directed-edge CSV (``src,dst``). Group labels are ``majority``,
``minority`` or ``other``; blank means missing.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .model import NetworkParams, ParameterError

MAJORITY, MINORITY, OTHER = "majority", "minority", "other"
GROUPS = (MAJORITY, MINORITY, OTHER)
_ALIASES = {"maj": MAJORITY, "min": MINORITY, "white": MAJORITY, "black": MINORITY}


class CalibrationError(ValueError):
    pass


def parse_group(raw: str | None) -> Optional[str]:
    if raw is None:
        return None
    g = raw.strip().lower()
    if not g:
        return None
    g = _ALIASES.get(g, g)
    if g not in GROUPS:
        raise CalibrationError(f"unknown group label {raw!r}")
    return g


@dataclass(frozen=True)
class EgoNetworkRecord:
    ego_id: str
    group: Optional[str]
    nominated: tuple[str, ...]
    alter_groups: Mapping[str, Optional[str]] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.nominated)) != len(self.nominated):
            raise CalibrationError(f"ego {self.ego_id}: duplicate nominations")
        if self.ego_id in self.nominated:
            raise CalibrationError(f"ego {self.ego_id}: self-nomination")

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.ego_id, *self.nominated)

    def node_groups(self) -> list[Optional[str]]:
        return [self.group, *(self.alter_groups.get(a) for a in self.nominated)]


def send_network_density(record: EgoNetworkRecord, edges: Iterable[tuple[str, str]]) -> float:
    """Directed ties among ego and nominated alters over ``s (s - 1)``.

    Ego's nominations are ties in their own right; ``edges`` adds the rest.
    Mutual ties count twice.
    """
    s = len(record.nominated) + 1
    if s < 2:
        raise CalibrationError(f"ego {record.ego_id}: send-network density undefined with no nominations")
    members = set(record.nodes)
    ties = {(record.ego_id, a) for a in record.nominated}
    ties.update((u, v) for u, v in edges if u in members and v in members and u != v)
    return len(ties) / (s * (s - 1))


def race_heterogeneity(record: EgoNetworkRecord) -> Optional[float]:
    """``1 - sum_k (R_k / d)^2`` over members with known group; ``None`` if missing."""
    if not record.nominated:
        return None
    counts = Counter(g for g in record.node_groups() if g is not None)
    d = sum(counts.values())
    if d == 0:
        return None
    return 1.0 - math.fsum((n / d) ** 2 for n in counts.values())


@dataclass(frozen=True)
class CalibrationResult:
    delta: float
    tau_maj: float
    tau_min: float
    psi_maj: float
    psi_min: float
    counts: Mapping[str, int]
    alpha: float = 1.0
    out_of_model: tuple[str, ...] = ()

    def to_params(self, alpha: float | None = None) -> NetworkParams:
        if self.out_of_model:
            raise ParameterError(self.out_of_model[0], getattr(self, self.out_of_model[0]), "model range")
        return NetworkParams(
            self.delta, self.alpha if alpha is None else alpha, self.tau_maj, self.tau_min, self.psi_maj, self.psi_min
        )

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "alpha": self.alpha,
            "tau_maj": self.tau_maj,
            "tau_min": self.tau_min,
            "psi_maj": self.psi_maj,
            "psi_min": self.psi_min,
            "counts": dict(sorted(self.counts.items())),
            "out_of_model": list(self.out_of_model),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "CalibrationResult":
        return cls(
            delta=float(data["delta"]),
            alpha=float(data.get("alpha", 1.0)),
            tau_maj=float(data["tau_maj"]),
            tau_min=float(data["tau_min"]),
            psi_maj=float(data["psi_maj"]),
            psi_min=float(data["psi_min"]),
            counts={k: int(v) for k, v in data.get("counts", {}).items()},
            out_of_model=tuple(data.get("out_of_model", ())),
        )


def _mean(values: list[float], what: str) -> float:
    if not values:
        raise CalibrationError(f"no usable records for {what}")
    # fsum makes the result independent of record order
    return math.fsum(values) / len(values)


def estimate_params(
    records: Iterable[EgoNetworkRecord], edges: Iterable[tuple[str, str]], alpha: float = 1.0
) -> CalibrationResult:
    records = list(records)
    edge_list = list(edges)
    by_src: dict[str, list[tuple[str, str]]] = {}
    for u, v in edge_list:
        by_src.setdefault(u, []).append((u, v))

    esden: dict[str, list[float]] = {MAJORITY: [], MINORITY: []}
    psi: dict[str, list[float]] = {MAJORITY: [], MINORITY: []}
    n_group = Counter(r.group for r in records)
    for r in records:
        if r.group not in esden:
            continue
        if r.nominated:
            local = [e for node in r.nodes for e in by_src.get(node, ())]
            esden[r.group].append(send_network_density(r, local))
        h = race_heterogeneity(r)
        if h is not None:
            psi[r.group].append(1.0 - h / 2.0)

    n_maj, n_min = n_group[MAJORITY], n_group[MINORITY]
    if n_maj == 0 or n_min == 0:
        raise CalibrationError("need at least one majority and one minority respondent")
    est = {
        "delta": n_maj / (n_maj + n_min),
        "tau_maj": _mean(esden[MAJORITY], "majority density"),
        "tau_min": _mean(esden[MINORITY], "minority density"),
        "psi_maj": _mean(psi[MAJORITY], "majority heterogeneity"),
        "psi_min": _mean(psi[MINORITY], "minority heterogeneity"),
    }
    flagged = []
    for name, value in est.items():
        try:
            NetworkParams(**{**CALIBRATION_PROBE, name: value})
        except ParameterError:
            flagged.append(name)
    counts = {
        "majority": n_maj,
        "minority": n_min,
        "other": n_group[OTHER],
        "tau_maj": len(esden[MAJORITY]),
        "tau_min": len(esden[MINORITY]),
        "psi_maj": len(psi[MAJORITY]),
        "psi_min": len(psi[MINORITY]),
    }
    return CalibrationResult(**est, counts=counts, alpha=alpha, out_of_model=tuple(flagged))


# interior point used to range-check one estimate at a time
CALIBRATION_PROBE = dict(delta=0.7, alpha=1.0, tau_maj=0.5, tau_min=0.5, psi_maj=0.75, psi_min=0.75)


def read_records(path: str | Path) -> list[EgoNetworkRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        if not {"ego_id", "group", "alters"} <= cols:
            raise CalibrationError(f"{path}: header must contain ego_id, group, alters")
        rows = list(reader)

    group_of = {row["ego_id"].strip(): parse_group(row["group"]) for row in rows}
    records = []
    for row in rows:
        ego = row["ego_id"].strip()
        alters = tuple(a.strip() for a in (row["alters"] or "").split(";") if a.strip())
        if "alter_groups" in cols and (row.get("alter_groups") or "").strip():
            raw = row["alter_groups"].split(";")
            if len(raw) != len(alters):
                raise CalibrationError(f"ego {ego}: alter_groups does not align with alters")
            ag = {a: parse_group(g) for a, g in zip(alters, raw)}
        else:
            ag = {a: group_of.get(a) for a in alters}
        records.append(EgoNetworkRecord(ego, group_of[ego], alters, ag))
    return records


def read_edges(path: str | Path) -> list[tuple[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"src", "dst"} <= set(reader.fieldnames or ()):
            raise CalibrationError(f"{path}: header must contain src, dst")
        return [(r["src"].strip(), r["dst"].strip()) for r in reader]


def write_records(path: str | Path, records: Iterable[EgoNetworkRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ego_id", "group", "alters", "alter_groups"])
        for r in records:
            w.writerow([
                r.ego_id,
                r.group or "",
                ";".join(r.nominated),
                ";".join(r.alter_groups.get(a) or "" for a in r.nominated),
            ])


def write_edges(path: str | Path, edges: Iterable[tuple[str, str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst"])
        w.writerows(edges)


def calibrate_files(records_path: str | Path, edges_path: str | Path, alpha: float = 1.0) -> CalibrationResult:
    return estimate_params(read_records(records_path), read_edges(edges_path), alpha=alpha)


def dump_result(result: CalibrationResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def load_result(path: str | Path) -> CalibrationResult:
    return CalibrationResult.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
