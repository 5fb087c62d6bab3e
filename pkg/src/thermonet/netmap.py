"""Map a scalar series onto a directed quantile-transition network."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError, DataError, MissingFileError
from .series import TimeSeries

DEFAULT_Q = 20


@dataclass(frozen=True, eq=False)
class QuantileSpec:
    """Equiprobable bin layout for one series.

    ``boundaries`` holds the ``q - 1`` raw cut points and may contain
    repeats for duplicate-heavy data; :attr:`cuts` is the collapsed, strictly
    ascending version that symbol assignment actually uses. ``lo``/``hi`` are
    the extremes of the source series and close the outer bins.
    """

    q: int
    boundaries: tuple[float, ...]
    lo: float
    hi: float

    @property
    def cuts(self) -> np.ndarray:
        return np.unique(np.asarray(self.boundaries, dtype=np.float64))

    @property
    def n_bins(self) -> int:
        """Number of bins left after collapsing coincident cut points."""
        return self.cuts.size + 1

    def bin_range(self, i: int) -> tuple[float, float]:
        cuts = self.cuts
        lo = self.lo if i == 0 else float(cuts[i - 1])
        hi = self.hi if i == cuts.size else float(cuts[i])
        return lo, hi


def quantile_bounds(s, q: int = DEFAULT_Q) -> QuantileSpec:
    """Cut points at the ``k/q`` empirical quantiles, ``k = 1..q-1``.

    Quantiles interpolate linearly between the closest order statistics at
    zero-based position ``(n - 1) * k / q``. The position is split with
    integer arithmetic so that cut points landing on a sample reproduce that
    sample exactly.
    """
    values = s.values if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64)
    if q < 2:
        raise ContractError(f"quantile count must be >= 2, got {q}")
    n = values.size
    if n < q:
        raise ContractError(f"series of length {n} is shorter than q={q}")
    xs = np.sort(values)
    k = np.arange(1, q)
    whole, rem = np.divmod((n - 1) * k, q)
    frac = rem / q
    upper = np.minimum(whole + 1, n - 1)
    cuts = xs[whole] + frac * (xs[upper] - xs[whole])
    # interpolation between equal neighbours must not drift off the sample
    cuts = np.where(rem == 0, xs[whole], cuts)
    return QuantileSpec(q, tuple(float(c) for c in cuts), float(xs[0]), float(xs[-1]))


def assign_symbols(s, spec: QuantileSpec) -> np.ndarray:
    """Bin index of every sample.

    Bins are half-open ``[cut[i-1], cut[i])``: a value equal to a cut point
    lands in the upper bin, values below the first cut in bin 0 and values
    at or above the last cut in the top bin.
    """
    values = s.values if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64)
    return np.searchsorted(spec.cuts, values, side="right").astype(np.int64)


@dataclass(frozen=True, eq=False)
class QuantileNetwork:
    """Directed, unweighted transition graph between occupied bins.

    ``counts`` keeps how often each transition occurred; it is exported but
    never used as a weight by the metrics.
    """

    q: int
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    counts: dict = field(default_factory=dict)
    bin_ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = tuple(sorted(int(v) for v in set(self.nodes)))
        edges = tuple(sorted({(int(a), int(b)) for a, b in self.edges}))
        node_set = set(nodes)
        for a, b in edges:
            if a == b:
                raise ContractError(f"self-loop {a}->{b} not allowed")
            if a not in node_set or b not in node_set:
                raise ContractError(f"edge {a}->{b} has an endpoint outside the node set")
        counts = {e: int(self.counts.get(e, 1)) for e in edges}
        if any(c < 1 for c in counts.values()):
            raise ContractError("edge counts must be >= 1")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "bin_ranges", {int(k): tuple(v) for k, v in self.bin_ranges.items()})

    @classmethod
    def from_edges(cls, edges, nodes=None, q=None) -> "QuantileNetwork":
        """Build a network from an arbitrary edge list (mainly for tests)."""
        edges = list(edges)
        node_set = set(nodes or ())
        for a, b in edges:
            node_set.update((a, b))
        if q is None:
            q = max(node_set, default=0) + 1
        return cls(q=q, nodes=tuple(node_set), edges=tuple(edges))

    def __eq__(self, other):
        if not isinstance(other, QuantileNetwork):
            return NotImplemented
        return (self.q, self.nodes, self.edges, self.counts) == (
            other.q, other.nodes, other.edges, other.counts)

    __hash__ = None

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def successors(self) -> dict[int, list[int]]:
        adj = {v: [] for v in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
        return adj

    def to_json(self) -> dict:
        nodes = []
        for v in self.nodes:
            lo, hi = self.bin_ranges.get(v, (math.nan, math.nan))
            nodes.append({"id": v, "lo": lo, "hi": hi})
        edges = [{"src": a, "dst": b, "count": self.counts[(a, b)]} for a, b in self.edges]
        return {"q": self.q, "nodes": nodes, "edges": edges}

    @classmethod
    def from_json(cls, doc: dict) -> "QuantileNetwork":
        try:
            nodes = [int(n["id"]) for n in doc["nodes"]]
            ranges = {int(n["id"]): (float(n["lo"]), float(n["hi"])) for n in doc["nodes"]}
            edges = [(int(e["src"]), int(e["dst"])) for e in doc["edges"]]
            counts = {(int(e["src"]), int(e["dst"])): int(e.get("count", 1)) for e in doc["edges"]}
            return cls(q=int(doc["q"]), nodes=tuple(nodes), edges=tuple(edges),
                       counts=counts, bin_ranges=ranges)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed graph document: {exc}", code="bad-graph") from None

    def to_dot(self, name: str = "quantile_network") -> str:
        lines = [f"digraph {name} {{"]
        for v in self.nodes:
            lo, hi = self.bin_ranges.get(v, (math.nan, math.nan))
            lines.append(f'  {v} [label="q{v}[{lo:.6g},{hi:.6g})"];')
        for a, b in self.edges:
            lines.append(f"  {a} -> {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_network(symbols, q: int, spec: QuantileSpec | None = None) -> QuantileNetwork:
    """Directed edge for every change of symbol between consecutive samples."""
    sym = np.asarray(symbols, dtype=np.int64).ravel()
    if sym.size == 0:
        raise ContractError("symbol sequence must be non-empty")
    if sym.min() < 0 or sym.max() >= q:
        bad = int(np.flatnonzero((sym < 0) | (sym >= q))[0])
        raise ContractError(f"symbol {int(sym[bad])} at index {bad} outside [0, {q})")
    src, dst = sym[:-1], sym[1:]
    moved = src != dst
    codes, counts = np.unique(src[moved] * q + dst[moved], return_counts=True)
    edges = [(int(c // q), int(c % q)) for c in codes]
    nodes = tuple(int(v) for v in np.unique(sym))
    ranges = {v: spec.bin_range(v) for v in nodes} if spec is not None else {}
    return QuantileNetwork(q=q, nodes=nodes, edges=tuple(edges),
                           counts={e: int(c) for e, c in zip(edges, counts)},
                           bin_ranges=ranges)


def series_to_network(s, q: int = DEFAULT_Q) -> QuantileNetwork:
    """Quantile bounds, symbols and network in one step."""
    spec = quantile_bounds(s, q)
    return build_network(assign_symbols(s, spec), q, spec)


def write_graph_json(g: QuantileNetwork, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(g.to_json(), indent=2) + "\n")
    return path


def read_graph_json(path) -> QuantileNetwork:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}", code="bad-graph") from None
    return QuantileNetwork.from_json(doc)
