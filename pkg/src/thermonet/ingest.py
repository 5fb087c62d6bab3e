"""Frame-sequence loading, cropping and per-frame scalar reduction."""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BitDepthError,
    ContractError,
    DataError,
    GeometryError,
    ManifestError,
    MissingFileError,
    RoiError,
    ZeroVarianceError,
)
from .series import Stage, TimeSeries

FORMATS = ("pgm16", "raw16le")


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Ordered stack of 16-bit frames, shape ``(n_frames, height, width)``."""

    frames: np.ndarray
    fps: float
    source_id: str = ""

    def __post_init__(self):
        frames = self.frames
        if isinstance(frames, (list, tuple)):
            if not frames:
                raise ContractError("frame sequence must be non-empty")
            shapes = {np.shape(f) for f in frames}
            if len(shapes) != 1:
                raise GeometryError(f"frames differ in shape: {sorted(shapes)}")
        arr = np.asarray(frames)
        if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[1] == 0 or arr.shape[2] == 0:
            raise ContractError(f"expected a non-empty (n, h, w) stack, got shape {arr.shape}")
        if arr.dtype != np.uint16:
            if arr.size and (arr.min() < 0 or arr.max() > 0xFFFF or not np.all(arr == np.round(arr))):
                raise BitDepthError("intensities must be integers in [0, 65535]")
            arr = arr.astype(np.uint16)
        else:
            arr = arr.copy()
        arr.flags.writeable = False
        if not (np.isfinite(self.fps) and self.fps > 0):
            raise ContractError(f"fps must be positive, got {self.fps!r}")
        object.__setattr__(self, "frames", arr)
        object.__setattr__(self, "fps", float(self.fps))

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def dt(self) -> float:
        return 1.0 / self.fps

    @property
    def duration(self) -> float:
        return len(self) / self.fps


@dataclass(frozen=True)
class Roi:
    x0: int
    y0: int
    w: int
    h: int

    @classmethod
    def parse(cls, text: str) -> "Roi":
        """Parse ``"x0,y0,w,h"``."""
        try:
            x0, y0, w, h = (int(p) for p in text.split(","))
        except ValueError:
            raise RoiError(f"roi must be 'x0,y0,w,h', got {text!r}") from None
        return cls(x0, y0, w, h)

    def check(self, width: int, height: int) -> None:
        if self.w < 1 or self.h < 1 or self.x0 < 0 or self.y0 < 0:
            raise RoiError(f"{self} has negative offset or empty extent")
        if self.x0 + self.w > width or self.y0 + self.h > height:
            raise RoiError(f"{self} exceeds {width}x{height} frame")


@dataclass(frozen=True)
class VarianceReport:
    explained: tuple[float, ...]

    def to_json(self) -> dict:
        return {"explained": list(self.explained), "cumulative": float(np.sum(self.explained))}


# -- frame file formats -----------------------------------------------------

_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*([^\s#]+)")


def read_pgm(path) -> np.ndarray:
    """Decode a binary (P5) PGM with 8- or 16-bit samples."""
    data = Path(path).read_bytes()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise DataError(f"{path}: truncated PGM header", code="bad-frame")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise DataError(f"{path}: not a binary PGM (magic {tokens[0]!r})", code="bad-frame")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise DataError(f"{path}: malformed PGM header", code="bad-frame") from None
    if maxval > 0xFFFF:
        raise BitDepthError(f"{path}: maxval {maxval} exceeds 16 bits")
    if maxval < 1:
        raise DataError(f"{path}: invalid maxval {maxval}", code="bad-frame")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = width * height
    body = data[pos:pos + n * dtype.itemsize]
    if len(body) != n * dtype.itemsize:
        raise DataError(f"{path}: truncated PGM raster", code="bad-frame")
    return np.frombuffer(body, dtype=dtype).reshape(height, width).astype(np.uint16)


def write_pgm(path, frame: np.ndarray) -> None:
    frame = np.asarray(frame)
    height, width = frame.shape
    header = b"P5\n%d %d\n65535\n" % (width, height)
    Path(path).write_bytes(header + frame.astype(">u2").tobytes())


def read_raw16le(path, width: int, height: int) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) != 2 * width * height:
        raise GeometryError(
            f"{path}: {len(data)} bytes does not match {width}x{height} 16-bit frame"
        )
    return np.frombuffer(data, dtype="<u2").reshape(height, width).copy()


def write_raw16le(path, frame: np.ndarray) -> None:
    Path(path).write_bytes(np.asarray(frame).astype("<u2").tobytes())


# -- manifest ---------------------------------------------------------------

def load_frames(manifest_path) -> FrameSequence:
    """Load the frames listed in a JSON manifest, in manifest order."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise MissingFileError(f"no such manifest: {manifest_path}")
    try:
        doc = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{manifest_path}: {exc}") from None
    try:
        fps = float(doc["fps"])
        width = int(doc["width"])
        height = int(doc["height"])
        fmt = doc.get("format", "pgm16")
        names = list(doc["frames"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"{manifest_path}: missing or invalid field {exc}") from None
    if fmt not in FORMATS:
        raise ManifestError(f"{manifest_path}: unknown format {fmt!r}")
    if not names:
        raise ManifestError(f"{manifest_path}: manifest lists no frames", code="empty-manifest")
    if not (fps > 0 and width > 0 and height > 0):
        raise ManifestError(f"{manifest_path}: fps, width and height must be positive")

    base = manifest_path.parent
    paths = [base / name for name in names]
    for i, p in enumerate(paths):
        if not p.is_file():
            raise MissingFileError(f"{manifest_path}: frame {i} missing: {p}")

    def decode(item):
        i, p = item
        frame = read_pgm(p) if fmt == "pgm16" else read_raw16le(p, width, height)
        if frame.shape != (height, width):
            raise GeometryError(
                f"frame {i} ({p}) is {frame.shape[1]}x{frame.shape[0]}, "
                f"manifest declares {width}x{height}"
            )
        return frame

    with ThreadPoolExecutor() as pool:
        frames = list(pool.map(decode, enumerate(paths)))
    return FrameSequence(np.stack(frames), fps=fps, source_id=str(doc.get("source_id", manifest_path.stem)))


def write_manifest(seq: FrameSequence, directory, fmt: str = "pgm16", stem: str = "frame") -> Path:
    """Write ``seq`` as frame files plus ``manifest.json`` under ``directory``."""
    if fmt not in FORMATS:
        raise ContractError(f"unknown frame format {fmt!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = "pgm" if fmt == "pgm16" else "raw"
    digits = max(4, len(str(len(seq))))
    names = []
    for i, frame in enumerate(seq.frames):
        name = f"{stem}_{i:0{digits}d}.{ext}"
        (write_pgm if fmt == "pgm16" else write_raw16le)(directory / name, frame)
        names.append(name)
    manifest = {
        "fps": seq.fps,
        "width": seq.width,
        "height": seq.height,
        "format": fmt,
        "frames": names,
    }
    if seq.source_id:
        manifest["source_id"] = seq.source_id
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


# -- reductions -------------------------------------------------------------

def crop(seq: FrameSequence, roi: Roi) -> FrameSequence:
    roi.check(seq.width, seq.height)
    sub = seq.frames[:, roi.y0:roi.y0 + roi.h, roi.x0:roi.x0 + roi.w]
    return FrameSequence(sub, fps=seq.fps, source_id=seq.source_id)


def mean_series(seq: FrameSequence) -> TimeSeries:
    """Spatial mean of every frame."""
    values = seq.frames.reshape(len(seq), -1).mean(axis=1, dtype=np.float64)
    return TimeSeries(values, dt=seq.dt, label=seq.source_id, stage=Stage.RAW_MEAN)


def pc1_series(seq: FrameSequence, k: int = 3) -> tuple[TimeSeries, VarianceReport]:
    """Project each frame onto the leading principal direction.

    Frames are observations and pixels are variables; every pixel is centred
    across time before a thin SVD of the ``time x pixel`` matrix. The sign of
    the component is chosen so that the projection correlates non-negatively
    with :func:`mean_series`.

    Returns the projection and the variance fractions of the first ``k``
    components (fewer if the matrix rank is smaller).
    """
    if len(seq) < 2:
        raise ContractError("pc1_series needs at least 2 frames")
    if k < 1:
        raise ContractError(f"component count must be >= 1, got {k}")
    X = seq.frames.reshape(len(seq), -1).astype(np.float64)
    Xc = X - X.mean(axis=0)
    total = float(np.einsum("ij,ij->", Xc, Xc))
    if total == 0.0:
        raise ZeroVarianceError("all frames are identical; no principal direction exists")

    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    power = s ** 2
    explained = power[:k] / power.sum()
    explained = np.minimum.accumulate(np.clip(explained, 0.0, 1.0))
    scores = U[:, 0] * s[0]

    mean = X.mean(axis=1)
    r = np.dot(scores - scores.mean(), mean - mean.mean())
    if r < 0 or (r == 0 and Vt[0].sum() < 0):
        scores = -scores
    ts = TimeSeries(scores, dt=seq.dt, label=seq.source_id, stage=Stage.PC1)
    return ts, VarianceReport(tuple(float(e) for e in explained))
