"""Centrality metrics on unweighted quantile networks, plus empirical CDFs.

Shortest paths count hops only; transition counts stored on the network are
ignored. Edge scores are normalized by ``n * (n - 1)``, the number of ordered
node pairs, with ``n`` the number of occupied nodes, so they lie in [0, 1].
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, DataError, MissingFileError
from .netmap import QuantileNetwork

NORMALIZATION = "ordered-pairs"


@dataclass(frozen=True)
class EdgeScoreTable:
    scores: dict  # (src, dst) -> normalized betweenness
    n_nodes: int
    raw: dict  # (src, dst) -> sum of shortest-path fractions

    def values(self) -> np.ndarray:
        return np.array([self.scores[e] for e in sorted(self.scores)], dtype=np.float64)

    @property
    def max_score(self) -> float:
        return max(self.scores.values())


def _bfs(source: int, adj: dict) -> tuple[list, dict, dict]:
    """Distances and shortest-path counts from ``source``, in visit order."""
    dist = {source: 0}
    sigma = {source: 1}
    order = [source]
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                order.append(w)
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
    return order, dist, sigma


def edge_betweenness(g: QuantileNetwork) -> EdgeScoreTable:
    """Sum over ordered pairs of the fraction of shortest paths using each edge.

    For each source a BFS counts shortest paths ``sigma``; walking the visit
    order backwards, edge ``(v, w)`` on a shortest-path DAG receives
    ``sigma[v] / sigma[w] * (1 + delta[w])`` and passes it on to ``delta[v]``.
    Sources are processed in ascending node order so that floating-point sums
    are reproducible.
    """
    if not g.edges:
        raise ContractError("edge betweenness needs at least one edge")
    adj = g.successors()
    preds_of = {v: [] for v in g.nodes}
    for a, b in g.edges:
        preds_of[b].append(a)
    raw = {e: 0.0 for e in g.edges}
    for s in g.nodes:
        order, dist, sigma = _bfs(s, adj)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            dw = dist[w]
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds_of[w]:
                if dist.get(v, -2) == dw - 1:
                    c = sigma[v] * coeff
                    raw[(v, w)] += c
                    delta[v] += c
    n = g.n_nodes
    norm = n * (n - 1)
    scores = {e: r / norm for e, r in raw.items()}
    return EdgeScoreTable(scores=scores, n_nodes=n, raw=raw)


def node_betweenness(g: QuantileNetwork) -> dict[int, float]:
    """Shortest-path betweenness of interior nodes, normalized by ``(n-1)(n-2)``."""
    n = g.n_nodes
    out = {v: 0.0 for v in g.nodes}
    if n < 3:
        return out
    adj = g.successors()
    preds_of = {v: [] for v in g.nodes}
    for a, b in g.edges:
        preds_of[b].append(a)
    for s in g.nodes:
        order, dist, sigma = _bfs(s, adj)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            for v in preds_of[w]:
                if dist.get(v, -2) == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                out[w] += delta[w]
    norm = (n - 1) * (n - 2)
    return {v: c / norm for v, c in out.items()}


def degree_stats(g: QuantileNetwork) -> dict[int, tuple[int, int]]:
    """``node -> (in_degree, out_degree)`` over distinct neighbours."""
    deg = {v: [0, 0] for v in g.nodes}
    for a, b in g.edges:
        deg[a][1] += 1
        deg[b][0] += 1
    return {v: (i, o) for v, (i, o) in deg.items()}


@dataclass(frozen=True, eq=False)
class Ecdf:
    """Right-continuous empirical CDF of a finite sample."""

    sorted_values: np.ndarray

    def __post_init__(self):
        arr = np.sort(np.asarray(self.sorted_values, dtype=np.float64).ravel())
        arr.flags.writeable = False
        object.__setattr__(self, "sorted_values", arr)

    def __len__(self) -> int:
        return self.sorted_values.size

    def evaluate(self, x):
        """Fraction of samples ``<= x``; accepts scalars or arrays."""
        res = np.searchsorted(self.sorted_values, x, side="right") / len(self)
        return float(res) if np.ndim(res) == 0 else res

    __call__ = evaluate

    def steps(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct sample values and the CDF value at each."""
        xs = np.unique(self.sorted_values)
        return xs, self.evaluate(xs)


def ecdf(values) -> Ecdf:
    values = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.float64)
    if values.size == 0:
        raise ContractError("ecdf needs at least one value")
    return Ecdf(values)


# -- CSV formats ------------------------------------------------------------

def write_metrics_csv(table: EdgeScoreTable, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "raw", "score"])
        for (a, b) in sorted(table.scores):
            w.writerow([a, b, f"{table.raw[(a, b)]:.17g}", f"{table.scores[(a, b)]:.17g}"])
    return path


def read_metrics_csv(path) -> EdgeScoreTable:
    """Read a metrics CSV back.

    ``n_nodes`` is recovered from the ratio ``raw / score`` when any score is
    non-zero, otherwise from the edge endpoints.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["src", "dst", "raw", "score"]:
            raise DataError(f"{path}: expected header 'src,dst,raw,score'", code="bad-csv")
        try:
            rows = [(int(r["src"]), int(r["dst"]), float(r["raw"]), float(r["score"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: {exc}", code="bad-csv") from None
    if not rows:
        raise DataError(f"{path}: no edges", code="bad-csv")
    raw = {(a, b): r for a, b, r, _ in rows}
    scores = {(a, b): s for a, b, _, s in rows}
    pairs = [r / s for _, _, r, s in rows if s > 0]
    if pairs:
        n = int(round((1 + np.sqrt(1 + 4 * np.median(pairs))) / 2))
    else:
        n = len({v for a, b, _, _ in rows for v in (a, b)})
    return EdgeScoreTable(scores=scores, n_nodes=n, raw=raw)


def write_node_csv(g: QuantileNetwork, path) -> Path:
    path = Path(path)
    nb = node_betweenness(g)
    deg = degree_stats(g)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "in_degree", "out_degree", "betweenness"])
        for v in g.nodes:
            w.writerow([v, deg[v][0], deg[v][1], f"{nb[v]:.12g}"])
    return path


def write_ecdf_csv(e: Ecdf, path) -> Path:
    """One row per sample, sorted, with its running cumulative fraction."""
    path = Path(path)
    n = len(e)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "cumfrac"])
        for i, v in enumerate(e.sorted_values, 1):
            w.writerow([f"{v:.17g}", f"{i / n:.12g}"])
    return path


def read_ecdf_csv(path) -> Ecdf:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["value", "cumfrac"]:
            raise DataError(f"{path}: expected header 'value,cumfrac'", code="bad-csv")
        try:
            values = [float(r["value"]) for r in reader]
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: {exc}", code="bad-csv") from None
    if not values:
        raise DataError(f"{path}: no samples", code="bad-csv")
    return Ecdf(np.array(values))
