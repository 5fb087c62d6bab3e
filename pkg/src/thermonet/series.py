"""Scalar time series container and its CSV format."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError, DataError, MissingFileError, StageError


class Stage(str, enum.Enum):
    """Processing stage, in pipeline order."""

    RAW_MEAN = "raw-mean"
    PC1 = "pc1"
    BASELINED = "baselined"
    DETRENDED = "detrended"
    NORMALIZED = "normalized"
    POOLED = "pooled"

    @property
    def rank(self) -> int:
        # raw-mean and pc1 are alternative entry points of equal rank
        return 0 if self is Stage.PC1 else _ORDER.index(self)


_ORDER = list(Stage)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled scalar series.

    ``values`` is stored as a read-only float64 array. ``dt`` is seconds per
    sample; ``label`` is an opaque group/subject tag.
    """

    values: np.ndarray
    dt: float = 1.0
    label: str = ""
    stage: Stage = Stage.RAW_MEAN
    sources: tuple[str, ...] = field(default=())

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ContractError("time series must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise DataError("time series contains non-finite values", code="non-finite")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ContractError(f"dt must be positive, got {self.dt!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "stage", Stage(self.stage))

    def __len__(self) -> int:
        return self.values.size

    @property
    def duration(self) -> float:
        return len(self) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def advance(self, values, stage: Stage, **changes) -> "TimeSeries":
        """Return a copy holding ``values`` at a later ``stage``."""
        stage = Stage(stage)
        if stage.rank <= self.stage.rank:
            raise StageError(f"cannot move from stage {self.stage.value} to {stage.value}")
        kwargs = dict(dt=self.dt, label=self.label, sources=self.sources)
        kwargs.update(changes)
        return TimeSeries(values, stage=stage, **kwargs)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.dt == other.dt
            and self.label == other.label
            and self.stage is other.stage
            and self.sources == other.sources
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def require_stage(s: TimeSeries, allowed, op: str) -> None:
    allowed = {Stage(a) for a in allowed}
    if s.stage not in allowed:
        names = ", ".join(sorted(a.value for a in allowed))
        raise StageError(f"{op} expects stage in {{{names}}}, got {s.stage.value}")


def write_csv(s: TimeSeries, path) -> Path:
    """Write ``t,value`` rows; both columns use 17 significant digits."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(s.times, s.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])
    return path


def read_csv(path, *, dt: float | None = None, label: str | None = None,
             stage: Stage = Stage.RAW_MEAN) -> TimeSeries:
    """Read a ``t,value`` CSV.

    ``dt`` is inferred from the time column unless given; single-sample files
    fall back to ``dt = 1``.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise DataError(f"{path}: expected header 't,value'", code="bad-csv")
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows[1:] if r], dtype=float)
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: {exc}", code="bad-csv") from None
    if data.size == 0:
        raise DataError(f"{path}: no samples", code="bad-csv")
    t, values = data[:, 0], data[:, 1]
    if dt is None:
        dt = (t[-1] - t[0]) / (len(t) - 1) if len(t) > 1 else 1.0
    if not dt > 0:
        raise DataError(f"{path}: time column is not increasing", code="bad-csv")
    return TimeSeries(values, dt=dt, label=path.stem if label is None else label, stage=stage)
