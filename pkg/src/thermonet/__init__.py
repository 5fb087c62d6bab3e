"""Quantile transition networks from frame-sequence time series.

Frames are reduced to scalar series, detrended and pooled per group, mapped
onto directed quantile-transition networks and classified by the maximum
normalized edge betweenness.
"""

from .classify import DEFAULT_THETA, GroupComparison, Verdict, compare_groups
from .errors import ThermonetError
from .ingest import FrameSequence, Roi, VarianceReport, crop, load_frames, mean_series, pc1_series
from .metrics import Ecdf, EdgeScoreTable, degree_stats, ecdf, edge_betweenness, node_betweenness
from .netmap import (
    DEFAULT_Q,
    QuantileNetwork,
    QuantileSpec,
    assign_symbols,
    build_network,
    quantile_bounds,
    series_to_network,
)
from .pipeline import PipelineConfig, analyze_group
from .preprocess import DetrendReport, baseline, detrend_linear, normalize, pool
from .series import Stage, TimeSeries
from .synth import RegimeParams, gen_series, gen_video

__version__ = "0.1.0"
