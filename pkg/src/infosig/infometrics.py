"""Plug-in entropies and mutual information (bits) from count tables."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from . import _core
from .counts import CountTable, support_sizes

METRICS = ("h_s", "h_a", "h_snext", "mi_sa", "mi_asnext", "mi_ssnext", "mi_sa_snext")
MI_METRICS = ("mi_sa", "mi_asnext", "mi_ssnext", "mi_sa_snext")


class UndefinedMetricError(ValueError):
    """Raised for metrics over an empty table; zero would be a misleading answer."""


@dataclass(frozen=True)
class InfoSignature:
    h_s: float
    h_a: float
    h_snext: float
    mi_sa: float
    mi_asnext: float
    mi_ssnext: float
    mi_sa_snext: float
    n: int
    support: tuple[int, int, int]
    step_index: int = 0
    window: int | None = None

    def metrics(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in METRICS}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["support"] = list(self.support)
        return d


def _sorted_counts(counts: Mapping) -> np.ndarray:
    # ordering by value makes the float sum independent of symbol labels
    arr = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
    arr.sort()
    return arr


def entropy(counts: Mapping) -> float:
    """Shannon entropy in bits of the empirical distribution; sums in ascending count order."""
    arr = _sorted_counts(counts)
    n = int(arr.sum()) if len(arr) else 0
    if n < 1:
        raise UndefinedMetricError("entropy of an empty count map is undefined")
    if (arr < 0).any():
        raise ValueError("negative count")
    return float(_core.kernels().entropy_bits(arr, n))


def mutual_information(joint: Mapping, marg_x: Mapping, marg_y: Mapping) -> float:
    """H(X) + H(Y) - H(X,Y) in bits."""
    if not joint:
        raise UndefinedMetricError("mutual information of an empty joint is undefined")
    return entropy(marg_x) + entropy(marg_y) - entropy(joint)


def _entropies(table: CountTable) -> dict[str, float]:
    if table.n < 1:
        raise UndefinedMetricError("metrics of an empty table are undefined")
    return {
        "s": entropy(table.c_s),
        "a": entropy(table.c_a),
        "sn": entropy(table.c_snext),
        "sa": entropy(table.c_sa),
        "asn": entropy(table.c_asnext),
        "ssn": entropy(table.c_ssnext),
        "sasn": entropy(table.c_sasnext),
    }


def joint_mi(table: CountTable) -> float:
    """MI between the composite (S, A) and S'."""
    h = _entropies(table)
    return h["sa"] + h["sn"] - h["sasn"]


def signature(table: CountTable, step_index: int = 0, window: int | None = None) -> InfoSignature:
    h = _entropies(table)
    return InfoSignature(
        h_s=h["s"],
        h_a=h["a"],
        h_snext=h["sn"],
        mi_sa=h["s"] + h["a"] - h["sa"],
        mi_asnext=h["a"] + h["sn"] - h["asn"],
        mi_ssnext=h["s"] + h["sn"] - h["ssn"],
        mi_sa_snext=h["sa"] + h["sn"] - h["sasn"],
        n=table.n,
        support=support_sizes(table),
        step_index=int(step_index),
        window=window,
    )
