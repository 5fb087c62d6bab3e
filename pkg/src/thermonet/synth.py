"""Synthetic series and frame sequences with controllable fluctuation regimes.

``smooth`` is a plain AR(1) process. ``jumpy`` adds, at each step with
probability ``jump_prob``, a level shift of size ``jump_scale * sigma`` with a
random sign. Shifts persist (they accumulate into a wandering baseline), so a
jumpy series drifts across the whole value range while the AR noise only
jitters locally.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from . import rng
from .errors import ContractError
from .ingest import FrameSequence
from .series import Stage, TimeSeries

# generator stream ids
_INNOVATION, _JUMP_AT, _JUMP_SIGN, _PATTERN, _PIXEL_NOISE = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class RegimeParams:
    kind: str = "smooth"
    n: int = 2000
    phi: float = 0.9
    sigma: float = 1.0
    jump_prob: float = 0.3
    jump_scale: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("smooth", "jumpy"):
            raise ContractError(f"kind must be 'smooth' or 'jumpy', got {self.kind!r}")
        if self.n < 1:
            raise ContractError(f"n must be >= 1, got {self.n}")
        if not -1.0 < self.phi < 1.0:
            raise ContractError(f"phi must lie in (-1, 1), got {self.phi}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ContractError(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.jump_prob < 1.0:
            raise ContractError(f"jump_prob must lie in [0, 1), got {self.jump_prob}")
        if not (np.isfinite(self.jump_scale) and self.jump_scale >= 0):
            raise ContractError(f"jump_scale must be >= 0, got {self.jump_scale}")
        try:
            rng.check_seed(self.seed)
        except ValueError as exc:
            raise ContractError(str(exc)) from None


# Frozen regime fixtures (n = 2000 samples, 15 series per pooled group).
SMOOTH = RegimeParams(kind="smooth", phi=0.9, sigma=1.0)
JUMPY = RegimeParams(kind="jumpy", phi=0.9, sigma=1.0, jump_prob=0.3, jump_scale=8.0)
SERIES_PER_GROUP = 15

# Threshold separating SMOOTH from JUMPY pools for q in [10, 30] under the
# ordered-pairs normalization. Pooled synthetic networks never reach the
# default 0.2: concatenation seams add long-range edges that bypass every
# bottleneck.
SYNTH_THETA = 0.035


def gen_series(p: RegimeParams, dt: float = 1.0, label: str | None = None) -> TimeSeries:
    eps = rng.normal(p.seed, _INNOVATION, p.n)
    x = lfilter([1.0], [1.0, -p.phi], p.sigma * eps)
    if p.kind == "jumpy" and p.jump_prob > 0:
        hit = rng.uniform(p.seed, _JUMP_AT, p.n) < p.jump_prob
        sign = np.where(rng.uniform(p.seed, _JUMP_SIGN, p.n) < 0.5, -1.0, 1.0)
        x = x + np.cumsum(np.where(hit, sign * p.jump_scale * p.sigma, 0.0))
    if label is None:
        label = f"{p.kind}-{p.seed}"
    return TimeSeries(x, dt=dt, label=label, stage=Stage.RAW_MEAN)


def gen_group(p: RegimeParams, count: int = SERIES_PER_GROUP, dt: float = 1.0) -> list[TimeSeries]:
    """``count`` series with seeds ``p.seed, p.seed + 1, ...``."""
    return [gen_series(replace(p, seed=(p.seed + i) % 2 ** 64), dt=dt) for i in range(count)]


def pattern(w: int, h: int, pattern_seed: int) -> np.ndarray:
    """Fixed positive spatial pattern with entries in [0.5, 1.5)."""
    return 0.5 + rng.uniform(pattern_seed, _PATTERN, w * h).reshape(h, w)


def gen_video(n_frames: int, w: int, h: int, pattern_seed: int, signal, noise_sigma: float,
              *, fps: float = 9.0, base: float = 20000.0, source_id: str = "synthetic") -> FrameSequence:
    """Rank-one video ``base + signal[t] * P`` plus i.i.d. pixel noise, rounded to counts."""
    values = signal.values if isinstance(signal, TimeSeries) else np.asarray(signal, dtype=np.float64)
    if values.ndim != 1 or values.size != n_frames:
        raise ContractError(f"signal has {values.size} samples, expected n_frames={n_frames}")
    if w < 1 or h < 1:
        raise ContractError(f"frame size must be positive, got {w}x{h}")
    if not (np.isfinite(noise_sigma) and noise_sigma >= 0):
        raise ContractError(f"noise_sigma must be >= 0, got {noise_sigma}")
    P = pattern(w, h, pattern_seed)
    frames = base + values[:, None, None] * P[None]
    if noise_sigma > 0:
        noise = rng.normal(pattern_seed, _PIXEL_NOISE, frames.size).reshape(frames.shape)
        frames = frames + noise_sigma * noise
    frames = np.rint(np.clip(frames, 0, 0xFFFF)).astype(np.uint16)
    return FrameSequence(frames, fps=fps, source_id=source_id)
