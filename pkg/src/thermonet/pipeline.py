"""End-to-end composition: raw series -> pooled network -> verdict."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from . import classify as cl
from . import metrics as mt
from . import netmap as nm
from . import preprocess as pp
from .errors import ContractError, DataError
from .series import TimeSeries

SEED_ENV = "THERMONET_SEED"


@dataclass(frozen=True)
class PipelineConfig:
    q: int = nm.DEFAULT_Q
    theta: float = cl.DEFAULT_THETA
    reducer: str = "mean"
    normalize_mode: str = "auto"
    output_dir: Path = Path(".")
    seed: int | None = None

    def __post_init__(self):
        if self.q < 2:
            raise ContractError(f"q must be >= 2, got {self.q}")
        if not 0.0 < self.theta < 1.0:
            raise ContractError(f"theta must lie in (0, 1), got {self.theta}")
        if self.reducer not in ("mean", "pc1"):
            raise ContractError(f"reducer must be 'mean' or 'pc1', got {self.reducer!r}")
        if self.normalize_mode not in ("auto", "std", "none"):
            raise ContractError(f"unknown normalize mode {self.normalize_mode!r}")


def resolve_seed(seed: int | None, default: int = 0) -> int:
    """Explicit seed, else ``$THERMONET_SEED``, else ``default``."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ContractError(f"{SEED_ENV}={env!r} is not an integer") from None
    return default


@dataclass
class GroupResult:
    prepared: list[TimeSeries]
    reports: list[pp.DetrendReport]
    pooled: TimeSeries
    spec: nm.QuantileSpec
    network: nm.QuantileNetwork
    scores: mt.EdgeScoreTable
    distribution: mt.Ecdf
    verdict: cl.Verdict
    extras: dict = field(default_factory=dict)


def analyze_group(series, config: PipelineConfig = PipelineConfig()) -> GroupResult:
    """Run every raw series of one group through the full chain.

    Each series is baselined, detrended and normalized on its own before the
    group is pooled; quantiles are computed on the pooled series.
    """
    series = list(series)
    if not series:
        raise ContractError("a group needs at least one series")
    prepared, reports = [], []
    for s in series:
        p, r = pp.prepare(s, config.normalize_mode)
        prepared.append(p)
        reports.append(r)
    pooled = pp.pool(prepared)
    spec = nm.quantile_bounds(pooled, config.q)
    network = nm.build_network(nm.assign_symbols(pooled, spec), config.q, spec)
    if not network.edges:
        raise DataError("pooled series never changes bin; network has no edges", code="no-edges")
    scores = mt.edge_betweenness(network)
    dist = mt.ecdf(scores.values())
    verdict = cl.classify(scores, config.theta)
    return GroupResult(prepared, reports, pooled, spec, network, scores, dist, verdict)
