"""Raw frame-stream ingest.

Sessions are stored as a headerless concatenation of raw frames plus a
JSON sidecar manifest.  rgb8 frames are interleaved R,G,B per pixel,
row-major; gray8 frames are one byte per pixel and are expanded to three
identical planes at ingest so the rest of the pipeline always sees three
channels.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    FrameReadError,
    MalformedManifestError,
    MissingFileError,
    SizeMismatchError,
)

BYTES_PER_PIXEL = {"rgb8": 3, "gray8": 1}

_MANIFEST_KEYS = {"width", "height", "fps", "pixel_format", "frame_count",
                  "frames", "boxes", "groundtruth"}
_REQUIRED_KEYS = {"width", "height", "fps", "pixel_format", "frame_count", "frames"}

MIN_FRAME_DIM = 16


@dataclass(frozen=True)
class SessionManifest:
    width: int
    height: int
    fps: float
    pixel_format: str  # "rgb8" | "gray8"
    frame_count: int
    frames_path: Path
    boxes_path: Path | None = None
    groundtruth_path: Path | None = None

    @property
    def frame_bytes(self) -> int:
        return self.width * self.height * BYTES_PER_PIXEL[self.pixel_format]

    @property
    def duration(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class Frame:
    """One decoded frame: three (height, width) uint8 planes in R,G,B order."""

    index: int
    timestamp: float
    channels: np.ndarray  # shape (3, height, width), dtype uint8


def replicate_mono(plane: np.ndarray) -> np.ndarray:
    """Expand a single 8-bit plane into three bitwise-identical planes."""
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-d plane, got shape {plane.shape}")
    return np.stack((plane, plane, plane))


def _parse_manifest(manifest_path: Path) -> SessionManifest:
    try:
        raw = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedManifestError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedManifestError(f"{manifest_path}: manifest must be a JSON object")

    unknown = set(raw) - _MANIFEST_KEYS
    if unknown:
        raise MalformedManifestError(
            f"{manifest_path}: unknown manifest keys {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise MalformedManifestError(
            f"{manifest_path}: missing manifest keys {sorted(missing)}")

    try:
        width = int(raw["width"])
        height = int(raw["height"])
        fps = float(raw["fps"])
        frame_count = int(raw["frame_count"])
    except (TypeError, ValueError) as exc:
        raise MalformedManifestError(f"{manifest_path}: {exc}") from exc
    pixel_format = raw["pixel_format"]
    if pixel_format not in BYTES_PER_PIXEL:
        raise MalformedManifestError(
            f"{manifest_path}: pixel_format must be one of {sorted(BYTES_PER_PIXEL)}, "
            f"got {pixel_format!r}")
    if width < MIN_FRAME_DIM or height < MIN_FRAME_DIM:
        raise MalformedManifestError(
            f"{manifest_path}: frame dimensions must be at least "
            f"{MIN_FRAME_DIM}x{MIN_FRAME_DIM}, got {width}x{height}")
    if fps <= 0:
        raise MalformedManifestError(f"{manifest_path}: fps must be positive, got {fps}")
    if frame_count < 1:
        raise MalformedManifestError(
            f"{manifest_path}: frame_count must be at least 1, got {frame_count}")

    base = manifest_path.parent

    def _resolve(key: str) -> Path | None:
        value = raw.get(key)
        if value is None:
            return None
        if not isinstance(value, str) or not value:
            raise MalformedManifestError(f"{manifest_path}: {key} must be a file name")
        return base / value

    frames_path = _resolve("frames")
    assert frames_path is not None
    return SessionManifest(
        width=width,
        height=height,
        fps=fps,
        pixel_format=pixel_format,
        frame_count=frame_count,
        frames_path=frames_path,
        boxes_path=_resolve("boxes"),
        groundtruth_path=_resolve("groundtruth"),
    )


def open_session(manifest_path: str | os.PathLike) -> "FrameStream":
    """Open a session for reading, validating the manifest eagerly.

    Raises MissingFileError, MalformedManifestError, or SizeMismatchError
    before any frame is read.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise MissingFileError(f"manifest not found: {manifest_path}")
    manifest = _parse_manifest(manifest_path)
    if not manifest.frames_path.is_file():
        raise MissingFileError(f"frames file not found: {manifest.frames_path}")
    expected = manifest.frame_count * manifest.frame_bytes
    actual = manifest.frames_path.stat().st_size
    if actual != expected:
        raise SizeMismatchError(
            f"{manifest.frames_path}: expected {expected} bytes "
            f"({manifest.frame_count} frames of {manifest.frame_bytes}), got {actual}")
    return FrameStream(manifest)


class FrameStream:
    """Sequential reader over one session's frames.

    Yields each frame exactly once, in index order.  Not safe to share
    between concurrent readers; open one stream per reader.
    """

    def __init__(self, manifest: SessionManifest):
        self.manifest = manifest
        self.cursor = 0
        self._file = open(manifest.frames_path, "rb")

    def close(self) -> None:
        self._file.close()

    def __enter__(self) -> "FrameStream":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __iter__(self):
        while True:
            frame = self.next_frame()
            if frame is None:
                return
            yield frame

    def next_frame(self) -> Frame | None:
        """Return the next Frame, or None at end of stream."""
        m = self.manifest
        if self.cursor >= m.frame_count:
            return None
        index = self.cursor
        try:
            data = self._file.read(m.frame_bytes)
        except OSError as exc:
            raise FrameReadError(f"I/O error reading frame {index}: {exc}") from exc
        if len(data) != m.frame_bytes:
            raise FrameReadError(
                f"short read at frame {index}: got {len(data)} of {m.frame_bytes} bytes")
        flat = np.frombuffer(data, dtype=np.uint8)
        if m.pixel_format == "rgb8":
            channels = flat.reshape(m.height, m.width, 3).transpose(2, 0, 1)
        else:
            channels = replicate_mono(flat.reshape(m.height, m.width))
        self.cursor = index + 1
        return Frame(index=index, timestamp=index / m.fps, channels=channels)
