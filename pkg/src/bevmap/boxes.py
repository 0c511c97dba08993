"""Shared geometric and dataset primitives: frames, boxes, detection records.

Conventions used throughout the package:

* pixel coordinates are real-valued (sub-pixel allowed), y grows downward
  in both the frontal and the bird's-eye view;
* boxes are axis-aligned corner pairs (x_min, y_min, x_max, y_max);
* normalized coordinates map the frame onto [-1, 1] per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

CLASS_LABELS = ("car", "truck", "bus", "van", "motorbike")

PIXEL = "pixel"
NORMALIZED = "normalized"
FRONTAL = "frontal"
BIRDEYE = "birdeye"


class OutOfFrameError(ValueError):
    """A pixel coordinate lies outside the declared frame."""


@dataclass(frozen=True)
class FrameDims:
    """Frame size in pixels."""

    width: float = 1920.0
    height: float = 1080.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame dims must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned rectangle tagged with its coordinate space and view."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    space: str = PIXEL
    view: str = FRONTAL

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted box corners: {self.as_tuple()}")
        if self.space not in (PIXEL, NORMALIZED):
            raise ValueError(f"unknown box space {self.space!r}")
        if self.view not in (FRONTAL, BIRDEYE):
            raise ValueError(f"unknown box view {self.view!r}")
        if self.space == NORMALIZED:
            for c in self.as_tuple():
                if not -1.0 <= c <= 1.0:
                    raise ValueError(f"normalized coordinate {c} outside [-1, 1]")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def bottom_corners(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Bottom-left and bottom-right corners (y grows downward)."""
        return ((self.x_min, self.y_max), (self.x_max, self.y_max))


@dataclass(frozen=True)
class DetectionRecord:
    """One vehicle observed in both views of the same frame."""

    frame_id: str
    entity_id: int
    model_id: int
    class_label: str
    frontal_box: BBox
    birdeye_box: BBox
    distance_m: float
    yaw_deg: float

    def __post_init__(self):
        if self.frontal_box.view != FRONTAL:
            raise ValueError("frontal_box must carry the frontal view tag")
        if self.birdeye_box.view != BIRDEYE:
            raise ValueError("birdeye_box must carry the birdeye view tag")
        if self.class_label not in CLASS_LABELS:
            raise ValueError(f"unknown class label {self.class_label!r}")
        if self.distance_m < 0:
            raise ValueError("distance_m must be non-negative")
        if not 0.0 <= self.yaw_deg < 360.0:
            raise ValueError("yaw_deg must lie in [0, 360)")


def normalize_bbox(b: BBox, dims: FrameDims) -> BBox:
    """Map a pixel-space box onto [-1, 1] per axis (c -> 2*(c/extent) - 1)."""
    if b.space != PIXEL:
        raise ValueError("normalize_bbox expects a pixel-space box")
    for c, extent in ((b.x_min, dims.width), (b.x_max, dims.width),
                      (b.y_min, dims.height), (b.y_max, dims.height)):
        if not 0.0 <= c <= extent:
            raise OutOfFrameError(f"coordinate {c} outside frame extent {extent}")
    return BBox(
        2.0 * (b.x_min / dims.width) - 1.0,
        2.0 * (b.y_min / dims.height) - 1.0,
        2.0 * (b.x_max / dims.width) - 1.0,
        2.0 * (b.y_max / dims.height) - 1.0,
        space=NORMALIZED,
        view=b.view,
    )


def denormalize_bbox(b: BBox, dims: FrameDims) -> BBox:
    """Exact inverse of :func:`normalize_bbox` up to floating-point round-off."""
    if b.space != NORMALIZED:
        raise ValueError("denormalize_bbox expects a normalized box")
    return BBox(
        (b.x_min + 1.0) / 2.0 * dims.width,
        (b.y_min + 1.0) / 2.0 * dims.height,
        (b.x_max + 1.0) / 2.0 * dims.width,
        (b.y_max + 1.0) / 2.0 * dims.height,
        space=PIXEL,
        view=b.view,
    )


def clip_box_to_frame(b: BBox, dims: FrameDims) -> BBox | None:
    """Clip a pixel box to the frame; None when the overlap is empty."""
    x0 = max(b.x_min, 0.0)
    y0 = max(b.y_min, 0.0)
    x1 = min(b.x_max, dims.width)
    y1 = min(b.y_max, dims.height)
    if x0 > x1 or y0 > y1:
        return None
    return replace(b, x_min=x0, y_min=y0, x_max=x1, y_max=y1)
