"""Synthetic flat-world scene generator.

Produces paired frontal / bird's-eye detection records with known 3D ground
truth, standing in for a game-engine capture. World frame: the player sits
at the origin of a flat ground plane, +y points forward, +x right, z up.
Vehicle yaw is measured clockwise from +y (0 deg = same heading as the
player, 180 deg = oncoming).

The frontal camera is a pinhole mounted at ``height_m`` above the ground
looking along +y (optionally pitched down); the bird's-eye view is a
top-down orthographic map centered on the player, forward = up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .boxes import BIRDEYE, FRONTAL, BBox, DetectionRecord, FrameDims, clip_box_to_frame

_MIN_DEPTH = 1e-6
_OCCLUSION_COVER = 0.95


class ConfigError(ValueError):
    """A scene configuration cannot produce valid frames."""


@dataclass(frozen=True)
class PinholeCamera:
    """Frontal dashboard camera: pinhole intrinsics plus mounting pose."""

    focal_px: float = 1000.0
    cx: float = 960.0
    cy: float = 540.0
    height_m: float = 1.5
    pitch_deg: float = 0.0
    dims: FrameDims = field(default_factory=FrameDims)

    def __post_init__(self):
        if self.focal_px <= 0:
            raise ConfigError("focal length must be positive")

    def project_point(self, x: float, y: float, z: float) -> tuple[float, float, float]:
        """World point -> (u, v, depth); depth <= 0 means behind the camera."""
        th = math.radians(self.pitch_deg)
        depth = y * math.cos(th) + (self.height_m - z) * math.sin(th)
        if depth <= _MIN_DEPTH:
            return (math.nan, math.nan, depth)
        down = (self.height_m - z) * math.cos(th) - y * math.sin(th)
        u = self.cx + self.focal_px * x / depth
        v = self.cy + self.focal_px * down / depth
        return (u, v, depth)

    def project_ground(self, x: float, y: float) -> tuple[float, float]:
        u, v, depth = self.project_point(x, y, 0.0)
        if depth <= _MIN_DEPTH:
            raise ValueError(f"ground point ({x}, {y}) behind the camera")
        return (u, v)


@dataclass(frozen=True)
class BirdeyeCamera:
    """Top-down orthographic map, player at the center, forward = up."""

    scale_px_per_m: float = 10.0
    extent_x_m: float = 192.0
    extent_y_m: float = 108.0

    def __post_init__(self):
        if self.scale_px_per_m <= 0:
            raise ConfigError("map scale must be positive")
        if self.extent_x_m <= 0 or self.extent_y_m <= 0:
            raise ConfigError("map extent must be positive")

    @property
    def dims(self) -> FrameDims:
        return FrameDims(self.extent_x_m * self.scale_px_per_m,
                         self.extent_y_m * self.scale_px_per_m)

    def project_ground(self, x: float, y: float) -> tuple[float, float]:
        d = self.dims
        return (d.width / 2.0 + self.scale_px_per_m * x,
                d.height / 2.0 - self.scale_px_per_m * y)


@dataclass(frozen=True)
class VehicleClass:
    label: str
    length_m: float
    width_m: float
    height_m: float
    frequency: float
    n_models: int = 4


@dataclass(frozen=True)
class YawMixture:
    """Two circular modes (same-direction and oncoming traffic)."""

    modes_deg: tuple[float, ...] = (0.0, 180.0)
    weights: tuple[float, ...] = (0.5, 0.5)
    kappa: float = 40.0


@dataclass(frozen=True)
class NoiseConfig:
    jitter_px: float = 0.0
    drop_view_prob: float = 0.0
    absurd_size_prob: float = 0.0

    @property
    def enabled(self) -> bool:
        return self.jitter_px > 0 or self.drop_view_prob > 0 or self.absurd_size_prob > 0


DEFAULT_CATALOG = (
    VehicleClass("car", 4.5, 1.8, 1.5, 0.50),
    VehicleClass("truck", 8.5, 2.5, 3.2, 0.15),
    VehicleClass("bus", 12.0, 2.5, 3.0, 0.10),
    VehicleClass("van", 5.5, 2.0, 2.2, 0.15),
    VehicleClass("motorbike", 2.2, 0.8, 1.2, 0.10),
)


@dataclass(frozen=True)
class SceneConfig:
    rng_seed: int = 0
    vehicles_per_frame: tuple[int, int] = (1, 4)
    distance_range_m: tuple[float, float] = (5.0, 30.0)
    bearing_range_deg: tuple[float, float] = (-40.0, 40.0)
    yaw_mixture: YawMixture = field(default_factory=YawMixture)
    class_catalog: tuple[VehicleClass, ...] = DEFAULT_CATALOG
    frontal_camera: PinholeCamera = field(default_factory=PinholeCamera)
    birdeye_camera: BirdeyeCamera = field(default_factory=BirdeyeCamera)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    cull_occluded: bool = False

    def validate(self) -> None:
        lo, hi = self.vehicles_per_frame
        if not (0 < lo <= hi):
            raise ConfigError(f"bad vehicles_per_frame range {self.vehicles_per_frame}")
        dmin, dmax = self.distance_range_m
        if not (0 < dmin < dmax):
            raise ConfigError(f"bad distance range {self.distance_range_m}")
        if not self.class_catalog:
            raise ConfigError("class catalog is empty")
        total = sum(c.frequency for c in self.class_catalog)
        if total <= 0 or abs(total - 1.0) > 1e-6:
            raise ConfigError(f"class frequencies must sum to 1, got {total}")
        if len(self.yaw_mixture.modes_deg) != len(self.yaw_mixture.weights):
            raise ConfigError("yaw mixture modes and weights differ in length")
        if abs(sum(self.yaw_mixture.weights) - 1.0) > 1e-6:
            raise ConfigError("yaw mixture weights must sum to 1")


@dataclass(frozen=True)
class Vehicle3D:
    """Ground-truth vehicle: footprint center on the ground plane + extents."""

    entity_id: int
    model_id: int
    class_label: str
    center_xy: tuple[float, float]
    yaw_deg: float
    extents: tuple[float, float, float]  # (length, width, height) in meters

    def footprint_corners(self) -> list[tuple[float, float]]:
        """Four ground-contact corners of the yaw-rotated footprint."""
        length, width, _ = self.extents
        psi = math.radians(self.yaw_deg)
        hx, hy = math.sin(psi), math.cos(psi)       # heading
        rx, ry = math.cos(psi), -math.sin(psi)      # right
        cx, cy = self.center_xy
        out = []
        for sl in (-0.5, 0.5):
            for sw in (-0.5, 0.5):
                out.append((cx + sl * length * hx + sw * width * rx,
                            cy + sl * length * hy + sw * width * ry))
        return out


@dataclass
class FrameScene:
    """One generated frame: paired records plus single-view leftovers."""

    frame_id: str
    records: list[DetectionRecord]
    frontal_only_ids: list[int]
    birdeye_only_ids: list[int]
    corrupted_ids: list[int]


def candidate_set(frontal_ids: set[int], birdeye_ids: set[int]) -> set[int]:
    """Entities visible in both views of a frame."""
    return set(frontal_ids) & set(birdeye_ids)


def project_frontal(v: Vehicle3D, cam: PinholeCamera) -> BBox | None:
    """Axis-aligned hull of the eight projected box corners, clipped to frame.

    Returns None when the vehicle is behind the camera or the hull misses
    the frame entirely.
    """
    height = v.extents[2]
    us, vs = [], []
    for gx, gy in v.footprint_corners():
        for z in (0.0, height):
            u, pv, depth = cam.project_point(gx, gy, z)
            if depth <= _MIN_DEPTH:
                return None
            us.append(u)
            vs.append(pv)
    hull = BBox(min(us), min(vs), max(us), max(vs), view=FRONTAL)
    return clip_box_to_frame(hull, cam.dims)


def project_birdeye(v: Vehicle3D, cam: BirdeyeCamera) -> BBox | None:
    """Axis-aligned hull of the yaw-rotated footprint on the map, or None
    when the footprint lies outside the map extent."""
    us, vs = [], []
    for gx, gy in v.footprint_corners():
        u, pv = cam.project_ground(gx, gy)
        us.append(u)
        vs.append(pv)
    hull = BBox(min(us), min(vs), max(us), max(vs), view=BIRDEYE)
    return clip_box_to_frame(hull, cam.dims)


def ground_truth_homography(frontal: PinholeCamera, birdeye: BirdeyeCamera) -> np.ndarray:
    """Exact projective map sending frontal ground-plane pixels to bird's-eye
    pixels, valid for any pitch; Frobenius-normalized with h[2,2] >= 0."""
    th = math.radians(frontal.pitch_deg)
    c, s = math.cos(th), math.sin(th)
    f, cx, cy, h = frontal.focal_px, frontal.cx, frontal.cy, frontal.height_m
    k = birdeye.scale_px_per_m
    d = birdeye.dims
    ox, oy = d.width / 2.0, d.height / 2.0
    H = np.array([
        [k * h, ox * c, ox * (f * s - cy * c) - k * h * cx],
        [0.0, oy * c + k * h * s, oy * (f * s - cy * c) - k * h * (f * c + cy * s)],
        [0.0, c, f * s - cy * c],
    ])
    H /= np.linalg.norm(H)
    if H[2, 2] < 0:
        H = -H
    return H


def _sample_vehicle(rng: np.random.Generator, cfg: SceneConfig,
                    entity_id: int) -> Vehicle3D:
    freqs = [c.frequency for c in cfg.class_catalog]
    cls_idx = int(rng.choice(len(cfg.class_catalog), p=freqs))
    cls = cfg.class_catalog[cls_idx]
    distance = float(rng.uniform(*cfg.distance_range_m))
    bearing = math.radians(float(rng.uniform(*cfg.bearing_range_deg)))
    mix = cfg.yaw_mixture
    mode_idx = int(rng.choice(len(mix.modes_deg), p=list(mix.weights)))
    yaw = math.degrees(rng.vonmises(math.radians(mix.modes_deg[mode_idx]), mix.kappa)) % 360.0
    model_id = 100 * (cls_idx + 1) + int(rng.integers(0, cls.n_models))
    return Vehicle3D(
        entity_id=entity_id,
        model_id=model_id,
        class_label=cls.label,
        center_xy=(distance * math.sin(bearing), distance * math.cos(bearing)),
        yaw_deg=yaw,
        extents=(cls.length_m, cls.width_m, cls.height_m),
    )


def _jitter_box(box: BBox, sigma: float, dims: FrameDims,
                rng: np.random.Generator) -> BBox:
    coords = np.asarray(box.as_tuple()) + rng.normal(0.0, sigma, size=4)
    x0, x1 = sorted((coords[0], coords[2]))
    y0, y1 = sorted((coords[1], coords[3]))
    x0 = min(max(x0, 0.0), dims.width)
    x1 = min(max(x1, 0.0), dims.width)
    y0 = min(max(y0, 0.0), dims.height)
    y1 = min(max(y1, 0.0), dims.height)
    return BBox(x0, y0, x1, y1, view=box.view)


def _shrink_to_sliver(box: BBox, rng: np.random.Generator) -> BBox:
    # Engine-glitch stand-in: collapse the box to a sub-pixel speck.
    cx, cy = box.center
    half = float(rng.uniform(0.05, 0.8))
    return BBox(cx - half, cy - half, cx + half, cy + half, view=box.view)


def _cull_occluded(vehicles: list[Vehicle3D], boxes: dict[int, BBox],
                   distances: dict[int, float]) -> set[int]:
    """Entity ids whose frontal box is almost fully covered by a nearer one."""
    culled = set()
    for v in vehicles:
        b = boxes.get(v.entity_id)
        if b is None or b.area <= 0:
            continue
        for other in vehicles:
            ob = boxes.get(other.entity_id)
            if ob is None or other.entity_id == v.entity_id:
                continue
            if distances[other.entity_id] >= distances[v.entity_id]:
                continue
            ix = min(b.x_max, ob.x_max) - max(b.x_min, ob.x_min)
            iy = min(b.y_max, ob.y_max) - max(b.y_min, ob.y_min)
            if ix > 0 and iy > 0 and ix * iy / b.area >= _OCCLUSION_COVER:
                culled.add(v.entity_id)
                break
    return culled


def generate_frames(cfg: SceneConfig, n_frames: int) -> Iterator[FrameScene]:
    """Generate frames deterministically from (rng_seed, frame index).

    Every emitted record pairs the frontal and bird's-eye projections of one
    sampled vehicle; entities visible in a single view (outside the other
    view's frame, or removed by drop noise) are reported in the per-frame
    leftover id lists.
    """
    cfg.validate()
    if n_frames <= 0:
        raise ConfigError("n_frames must be positive")
    for frame_index in range(n_frames):
        rng = np.random.default_rng([cfg.rng_seed, frame_index])
        lo, hi = cfg.vehicles_per_frame
        n_veh = int(rng.integers(lo, hi, endpoint=True))
        vehicles = [_sample_vehicle(rng, cfg, entity_id=frame_index * 1000 + i)
                    for i in range(n_veh)]

        frontal_boxes: dict[int, BBox] = {}
        birdeye_boxes: dict[int, BBox] = {}
        distances = {v.entity_id: math.hypot(*v.center_xy) for v in vehicles}
        for v in vehicles:
            fb = project_frontal(v, cfg.frontal_camera)
            if fb is not None:
                frontal_boxes[v.entity_id] = fb
            bb = project_birdeye(v, cfg.birdeye_camera)
            if bb is not None:
                birdeye_boxes[v.entity_id] = bb

        if cfg.cull_occluded:
            for eid in _cull_occluded(vehicles, frontal_boxes, distances):
                del frontal_boxes[eid]

        frontal_ids = set(frontal_boxes)
        birdeye_ids = set(birdeye_boxes)
        if cfg.noise.drop_view_prob > 0:
            for v in vehicles:
                eid = v.entity_id
                if eid in frontal_ids and eid in birdeye_ids and \
                        rng.random() < cfg.noise.drop_view_prob:
                    (frontal_ids if rng.integers(2) == 0 else birdeye_ids).discard(eid)

        candidates = candidate_set(frontal_ids, birdeye_ids)
        frame_id = f"f{frame_index:06d}"
        records: list[DetectionRecord] = []
        corrupted: list[int] = []
        for v in vehicles:
            eid = v.entity_id
            if eid not in candidates:
                continue
            fb, bb = frontal_boxes[eid], birdeye_boxes[eid]
            if cfg.noise.jitter_px > 0:
                fb = _jitter_box(fb, cfg.noise.jitter_px, cfg.frontal_camera.dims, rng)
                bb = _jitter_box(bb, cfg.noise.jitter_px, cfg.birdeye_camera.dims, rng)
            if cfg.noise.absurd_size_prob > 0 and rng.random() < cfg.noise.absurd_size_prob:
                if rng.integers(2) == 0:
                    fb = _shrink_to_sliver(fb, rng)
                else:
                    bb = _shrink_to_sliver(bb, rng)
                corrupted.append(eid)
            records.append(DetectionRecord(
                frame_id=frame_id,
                entity_id=eid,
                model_id=v.model_id,
                class_label=v.class_label,
                frontal_box=fb,
                birdeye_box=bb,
                distance_m=distances[eid],
                yaw_deg=v.yaw_deg,
            ))
        yield FrameScene(
            frame_id=frame_id,
            records=records,
            frontal_only_ids=sorted(frontal_ids - birdeye_ids),
            birdeye_only_ids=sorted(birdeye_ids - frontal_ids),
            corrupted_ids=corrupted,
        )


def generate_records(cfg: SceneConfig, n_frames: int) -> list[DetectionRecord]:
    """All records of ``n_frames`` generated frames, in frame order."""
    out: list[DetectionRecord] = []
    for scene in generate_frames(cfg, n_frames):
        out.extend(scene.records)
    return out
