"""Face-box driven region-of-interest geometry.

The three measurement regions (forehead, left cheek, right cheek) are
placed at fixed ratios of the tracked face box.  Face boxes come from a
sidecar CSV so any external detector can feed the pipeline; gaps in the
track are filled by linear interpolation.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .errors import (
    DegenerateRoiError,
    EmptyTrackError,
    InputError,
    MissingFileError,
    NonMonotonicIndicesError,
)

MIN_ROI_AREA = 4


class Rect(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class FaceBox:
    frame_index: int
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InputError(
                f"face box at frame {self.frame_index} must have positive size, "
                f"got {self.w}x{self.h}")


@dataclass(frozen=True)
class RoiSet:
    forehead: Rect
    left_cheek: Rect
    right_cheek: Rect

    def __iter__(self):
        return iter((self.forehead, self.left_cheek, self.right_cheek))


@dataclass(frozen=True)
class RoiLayout:
    """Region offsets and sizes as fractions of the face box (dx, dy, dw, dh)."""

    forehead: tuple[float, float, float, float] = (0.25, 0.05, 0.50, 0.15)
    left_cheek: tuple[float, float, float, float] = (0.15, 0.50, 0.20, 0.20)
    right_cheek: tuple[float, float, float, float] = (0.65, 0.50, 0.20, 0.20)


DEFAULT_LAYOUT = RoiLayout()


def _place(box: FaceBox, frac: tuple[float, float, float, float],
           frame_w: int, frame_h: int) -> Rect:
    dx, dy, dw, dh = frac
    x0 = int(round(box.x + dx * box.w))
    y0 = int(round(box.y + dy * box.h))
    x1 = x0 + int(round(dw * box.w))
    y1 = y0 + int(round(dh * box.h))
    # clamp to frame bounds
    x0, x1 = max(0, min(x0, frame_w)), max(0, min(x1, frame_w))
    y0, y1 = max(0, min(y0, frame_h)), max(0, min(y1, frame_h))
    return Rect(x0, y0, x1 - x0, y1 - y0)


def derive_rois(box: FaceBox, frame_w: int, frame_h: int,
                layout: RoiLayout = DEFAULT_LAYOUT) -> RoiSet:
    """Place the three measurement rectangles for one face box.

    Raises DegenerateRoiError if any clamped rectangle falls below
    MIN_ROI_AREA pixels.
    """
    rois = RoiSet(
        forehead=_place(box, layout.forehead, frame_w, frame_h),
        left_cheek=_place(box, layout.left_cheek, frame_w, frame_h),
        right_cheek=_place(box, layout.right_cheek, frame_w, frame_h),
    )
    for name, rect in zip(("forehead", "left_cheek", "right_cheek"), rois):
        if rect.area < MIN_ROI_AREA:
            raise DegenerateRoiError(
                f"{name} region degenerate for box at frame {box.frame_index}: "
                f"{rect} has area {rect.area} < {MIN_ROI_AREA}")
    return rois


def _parse_row(row: list[str], path: Path, line_no: int) -> tuple[int | None, tuple[float, ...]]:
    if len(row) != 5:
        raise InputError(f"{path}:{line_no}: expected 5 columns, got {len(row)}")
    idx_field = row[0].strip()
    try:
        coords = tuple(float(v) for v in row[1:])
    except ValueError as exc:
        raise InputError(f"{path}:{line_no}: {exc}") from exc
    if idx_field == "*":
        return None, coords
    try:
        return int(idx_field), coords
    except ValueError as exc:
        raise InputError(f"{path}:{line_no}: bad frame index {idx_field!r}") from exc


def load_box_track(boxes_path: str | os.PathLike, frame_count: int) -> list[FaceBox]:
    """Load the face-box CSV and fill it to one box per frame.

    Frames without an annotation get a box linearly interpolated between
    the nearest annotated neighbours (copied from the nearest one at the
    track's ends).  A single row with frame index "*" applies to every
    frame.
    """
    boxes_path = Path(boxes_path)
    if not boxes_path.is_file():
        raise MissingFileError(f"box track not found: {boxes_path}")
    with open(boxes_path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if rows and rows[0][0].strip().lower() == "frame":
        rows = rows[1:]
    if not rows:
        raise EmptyTrackError(f"{boxes_path}: no box rows")

    parsed = [_parse_row(row, boxes_path, i + 1) for i, row in enumerate(rows)]

    static = [coords for idx, coords in parsed if idx is None]
    if static:
        if len(parsed) != 1:
            raise InputError(
                f"{boxes_path}: a '*' row must be the only row, got {len(parsed)} rows")
        x, y, w, h = static[0]
        return [FaceBox(i, x, y, w, h) for i in range(frame_count)]

    indices = [idx for idx, _ in parsed]
    for prev, cur in zip(indices, indices[1:]):
        if cur <= prev:
            raise NonMonotonicIndicesError(
                f"{boxes_path}: frame indices must be strictly increasing "
                f"({prev} then {cur})")
    if indices[0] < 0 or indices[-1] >= frame_count:
        raise InputError(
            f"{boxes_path}: frame indices must lie in [0, {frame_count}), "
            f"got range [{indices[0]}, {indices[-1]}]")

    anchors = {idx: coords for idx, coords in parsed}
    track: list[FaceBox] = []
    keys = indices
    k = 0  # index of the next anchor at or past the current frame
    for i in range(frame_count):
        while k < len(keys) and keys[k] < i:
            k += 1
        if k < len(keys) and keys[k] == i:
            coords = anchors[i]
        elif k == 0:
            coords = anchors[keys[0]]
        elif k == len(keys):
            coords = anchors[keys[-1]]
        else:
            i0, i1 = keys[k - 1], keys[k]
            t = (i - i0) / (i1 - i0)
            a, b = anchors[i0], anchors[i1]
            coords = tuple(av + (bv - av) * t for av, bv in zip(a, b))
        track.append(FaceBox(i, *coords))
    return track
