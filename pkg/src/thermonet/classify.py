"""Threshold verdicts on edge-betweenness distributions and group comparison."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError
from .metrics import NORMALIZATION, Ecdf, EdgeScoreTable

DEFAULT_THETA = 0.2

BEYOND = "beyond-threshold"
WITHIN = "within-threshold"


@dataclass(frozen=True)
class Verdict:
    label: str
    theta: float
    max_score: float
    support_above: int

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "normalization": NORMALIZATION,
            "max_score": self.max_score,
            "support_above": self.support_above,
            "label": self.label,
        }


@dataclass(frozen=True)
class GroupComparison:
    ks_statistic: float
    theta_gap: float  # max score of group A minus max score of group B

    def to_json(self) -> dict:
        return asdict(self)


def classify(dist, theta: float = DEFAULT_THETA) -> Verdict:
    """Label a distribution by whether any edge score reaches ``theta``.

    ``dist`` may be an :class:`EdgeScoreTable` or any iterable of scores.
    """
    if not (0.0 < theta < 1.0):
        raise ContractError(f"theta must lie in (0, 1), got {theta!r}")
    if isinstance(dist, EdgeScoreTable):
        scores = np.fromiter(dist.scores.values(), dtype=np.float64)
    elif isinstance(dist, Ecdf):
        scores = dist.sorted_values
    else:
        scores = np.asarray(list(dist), dtype=np.float64)
    if scores.size == 0:
        raise ContractError("cannot classify an empty distribution")
    support = int(np.count_nonzero(scores >= theta))
    return Verdict(
        label=BEYOND if support else WITHIN,
        theta=float(theta),
        max_score=float(scores.max()),
        support_above=support,
    )


def ks_statistic(a: Ecdf, b: Ecdf) -> float:
    """Exact two-sample Kolmogorov-Smirnov distance between two ECDFs."""
    support = np.union1d(a.sorted_values, b.sorted_values)
    return float(np.max(np.abs(a.evaluate(support) - b.evaluate(support))))


def compare_groups(a: Ecdf, b: Ecdf) -> GroupComparison:
    if len(a) == 0 or len(b) == 0:
        raise ContractError("compare_groups needs two non-empty samples")
    gap = float(a.sorted_values[-1] - b.sorted_values[-1])
    return GroupComparison(ks_statistic=ks_statistic(a, b), theta_gap=gap)


def write_json(doc: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
