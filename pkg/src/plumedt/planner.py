"""
NFOV trajectory planners.

Two baselines ignore the plume mask (a nadir track down the central
column and a full-frame boustrophedon). Four planners follow the denoised
plume polygons: contour tracing, major-axis tracking, and diagonal or
perpendicular (lawnmower) transects across the major axis.

Waypoints are integer (x, y) pixels. Real-valued positions are rounded
half-up, and consecutive duplicates are removed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from plumedt.errors import ContractViolation, PlumeInputError
from plumedt.morphology import PlumePolygon, fill_polygon, get_contours

STRAIGHT_NADIR = "straight_nadir"
NAIVE_TRANSECT = "naive_transect"
TRACE_OUTLINE = "trace_outline"
TRACK_CENTER = "track_center"
DIAGONAL_TRANSECT = "diagonal_transect"
LAWNMOWER_TRANSECT = "lawnmower_transect"

BASELINES = (STRAIGHT_NADIR, NAIVE_TRANSECT)
MASK_PLANNERS = (TRACE_OUTLINE, TRACK_CENTER, DIAGONAL_TRANSECT, LAWNMOWER_TRANSECT)
ALGORITHMS = BASELINES + MASK_PLANNERS

DISPLAY_NAMES = {
    STRAIGHT_NADIR: "Straight Nadir",
    NAIVE_TRANSECT: "Naive Transect",
    TRACE_OUTLINE: "Trace Outline",
    TRACK_CENTER: "Track Center",
    DIAGONAL_TRANSECT: "Diagonal Transect",
    LAWNMOWER_TRANSECT: "Lawnmower Transect",
}

DIAGONAL_ANGLE = math.pi / 4


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered NFOV waypoints, an (n, 2) int array of (x, y)."""

    waypoints: np.ndarray
    algorithm: str
    step: int
    width: int = 0

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=np.int64).reshape(-1, 2)
        wp.setflags(write=False)
        object.__setattr__(self, "waypoints", wp)
        if self.step < 1:
            raise PlumeInputError(f"step must be >= 1, got {self.step}")

    def __len__(self):
        return len(self.waypoints)

    def __eq__(self, other):
        return (
            isinstance(other, Trajectory)
            and self.algorithm == other.algorithm
            and self.step == other.step
            and self.width == other.width
            and np.array_equal(self.waypoints, other.waypoints)
        )

    def check_bounds(self, shape) -> None:
        h, w = shape
        wp = self.waypoints
        if len(wp) and (wp.min() < 0 or wp[:, 0].max() >= w or wp[:, 1].max() >= h):
            raise ContractViolation(f"{self.algorithm} produced a waypoint outside {w}x{h}")


@dataclass(frozen=True)
class MajorAxis:
    centroid: np.ndarray
    direction: np.ndarray
    t_min: float
    t_max: float

    def point(self, t: float) -> np.ndarray:
        return self.centroid + t * self.direction


def round_half_up(values) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5).astype(np.int64)


def dedupe_consecutive(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    if len(pts) < 2:
        return pts
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return pts[keep]


def compute_step_size(scene_width: int) -> int:
    """One percent of the scene width, rounded, at least 1 pixel."""
    if scene_width < 1:
        raise PlumeInputError(f"scene width must be >= 1, got {scene_width}")
    return max(1, int(math.floor(0.01 * scene_width + 0.5)))


def transect_width(step: int) -> int:
    """Spacing between consecutive cross-transect anchors: twice the step."""
    if step < 1:
        raise PlumeInputError(f"step must be >= 1, got {step}")
    return 2 * step


def major_axis(polygon: PlumePolygon) -> MajorAxis:
    """Total-least-squares line through the distinct contour points.

    The direction is the leading eigenvector of the point covariance,
    oriented so that dy > 0 (or dx > 0 when dy == 0).
    """
    pts = np.unique(np.asarray(polygon.contour, dtype=np.float64), axis=0)
    if len(pts) < 2:
        raise PlumeInputError("major axis needs at least two distinct contour points")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    cov = centered.T @ centered / len(pts)
    _, vecs = np.linalg.eigh(cov)
    d = vecs[:, -1]
    if abs(d[1]) < 1e-12:
        d = np.array([abs(d[0]), 0.0])
    elif d[1] < 0:
        d = -d
    d = d / np.linalg.norm(d)
    proj = centered @ d
    return MajorAxis(centroid, d, float(proj.min()), float(proj.max()))


def order_polygons(polygons) -> list[PlumePolygon]:
    """Descending area; equal areas keep ascending component id."""
    return sorted(polygons, key=lambda p: (-p.area, p.component_id))


# --------------------------------------------------------------------------
# baselines


def plan_straight_nadir(shape, step: int) -> Trajectory:
    """Every `step` rows down the central column, ignoring any mask."""
    h, w = shape
    ys = np.arange(0, h, step)
    pts = np.column_stack([np.full(len(ys), w // 2), ys])
    return Trajectory(pts, STRAIGHT_NADIR, step)


def plan_naive_transect(shape, step: int, width: int) -> Trajectory:
    """Full-frame boustrophedon: rows `width` apart, points `step` apart."""
    h, w = shape
    xs = np.arange(0, w, step)
    rows = []
    for k, y in enumerate(range(0, h, width)):
        sweep = xs if k % 2 == 0 else xs[::-1]
        rows.append(np.column_stack([sweep, np.full(len(sweep), y)]))
    pts = np.concatenate(rows) if rows else np.empty((0, 2))
    return Trajectory(dedupe_consecutive(pts), NAIVE_TRANSECT, step, width)


# --------------------------------------------------------------------------
# mask-conditioned planners


def plan_trace_outline(polygons, step: int) -> Trajectory:
    """Every `step`-th contour pixel of each polygon, largest polygon first.

    Contour pixels are 8-adjacent, so indexing the chain samples it at
    chessboard arc-length intervals of `step`.
    """
    parts = [p.contour[::step] for p in order_polygons(polygons)]
    pts = np.concatenate(parts) if parts else np.empty((0, 2))
    return Trajectory(dedupe_consecutive(pts), TRACE_OUTLINE, step)


def _clamp(pts: np.ndarray, shape) -> np.ndarray:
    h, w = shape
    pts = pts.copy()
    pts[:, 0] = np.clip(pts[:, 0], 0, w - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, h - 1)
    return pts


def _axis_samples(t_min: float, t_max: float, spacing: float) -> np.ndarray:
    n = int(math.floor((t_max - t_min) / spacing + 1e-9)) + 1
    return t_min + spacing * np.arange(n)


def _snap_inside(pts: np.ndarray, region: np.ndarray) -> np.ndarray:
    """Move points that miss `region` to the nearest region pixel.

    Euclidean distance; ties go to the first region pixel in raster order.
    """
    miss = ~region[pts[:, 1], pts[:, 0]]
    if not miss.any():
        return pts
    cand = np.argwhere(region)[:, ::-1]  # (x, y), raster order
    pts = pts.copy()
    for i in np.flatnonzero(miss):
        d2 = ((cand - pts[i]) ** 2).sum(axis=1)
        pts[i] = cand[int(np.argmin(d2))]
    return pts


def plan_track_center(polygons, step: int, shape) -> Trajectory:
    """Evenly spaced points from end to end of each polygon's major axis.

    On bent or concave plumes the axis can leave the polygon; those samples
    are moved to the nearest pixel of the filled polygon.
    """
    parts = []
    for poly in order_polygons(polygons):
        if len(np.unique(poly.contour, axis=0)) < 2:
            parts.append(poly.contour[:1])
            continue
        axis = major_axis(poly)
        # both axis ends included, spacing at most `step`; symmetric under a
        # flip of the axis direction, so 90-degree rotations commute with it
        n = int(math.ceil((axis.t_max - axis.t_min) / step - 1e-9)) + 1
        ts = np.linspace(axis.t_min, axis.t_max, max(n, 2))
        pts = _clamp(round_half_up(axis.centroid + ts[:, None] * axis.direction), shape)
        parts.append(_snap_inside(pts, fill_polygon(poly, shape)))
    pts = np.concatenate(parts) if parts else np.empty((0, 2))
    return Trajectory(dedupe_consecutive(pts), TRACK_CENTER, step)


def _inside(region: np.ndarray, p: np.ndarray) -> bool:
    x, y = round_half_up(p)
    h, w = region.shape
    return 0 <= x < w and 0 <= y < h and bool(region[y, x])


def _march(region, anchor, direction, res=0.5) -> float:
    """Largest s (multiple of `res`) with anchor + s' * direction inside for all 0 <= s' <= s."""
    s = 0.0
    while _inside(region, anchor + (s + res) * direction):
        s += res
    return s


def transect_chord(region: np.ndarray, anchor, direction, step: int) -> np.ndarray:
    """Waypoints every `step` pixels across the region along `direction`.

    The chord is the maximal run of in-region points through `anchor`; it
    is walked from its ``-direction`` end to its ``+direction`` end and
    always includes both ends. Returns an empty array when the anchor pixel
    is outside the region.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    if not _inside(region, anchor):
        return np.empty((0, 2), dtype=np.int64)
    s_lo = -_march(region, anchor, -direction)
    s_hi = _march(region, anchor, direction)
    ss = s_lo + step * np.arange(int(math.floor((s_hi - s_lo) / step)) + 1)
    if ss[-1] < s_hi:
        ss = np.append(ss, s_hi)
    return round_half_up(anchor + ss[:, None] * direction)


def _plan_transects(polygons, step, width, shape, angle, algorithm) -> Trajectory:
    parts = []
    for poly in order_polygons(polygons):
        if len(np.unique(poly.contour, axis=0)) < 2:
            parts.append(poly.contour[:1])
            continue
        region = fill_polygon(poly, shape)
        axis = major_axis(poly)
        d = axis.direction
        normal = np.array([-d[1], d[0]])
        for k, t in enumerate(_axis_samples(axis.t_min, axis.t_max, width)):
            sense = 1.0 if k % 2 == 0 else -1.0
            cross = math.cos(angle) * d + sense * math.sin(angle) * normal
            chord = transect_chord(region, axis.point(t), cross, step)
            if len(chord):
                parts.append(chord)
    pts = np.concatenate(parts) if parts else np.empty((0, 2))
    return Trajectory(dedupe_consecutive(pts), algorithm, step, width)


def plan_lawnmower_transect(polygons, step: int, width: int, shape) -> Trajectory:
    """Perpendicular transects every `width` pixels along each major axis,
    alternating direction (boustrophedon)."""
    return _plan_transects(polygons, step, width, shape, math.pi / 2, LAWNMOWER_TRANSECT)


def plan_diagonal_transect(polygons, step: int, width: int, shape) -> Trajectory:
    """Transects at 45 degrees to the major axis, alternating between the
    +45 and -45 degree sides at successive anchors (a zig-zag)."""
    return _plan_transects(polygons, step, width, shape, DIAGONAL_ANGLE, DIAGONAL_TRANSECT)


def plan(algorithm: str, mask, step: int | None = None, width: int | None = None,
         polygons=None) -> Trajectory:
    """Run one planner on a (denoised) mask.

    `step` defaults to 1% of the mask width and `width` to twice the step.
    Pass precomputed `polygons` to skip contour extraction.
    """
    mask = np.asarray(mask, dtype=bool)
    shape = mask.shape
    step = compute_step_size(shape[1]) if step is None else int(step)
    width = transect_width(step) if width is None else int(width)
    if algorithm == STRAIGHT_NADIR:
        traj = plan_straight_nadir(shape, step)
    elif algorithm == NAIVE_TRANSECT:
        traj = plan_naive_transect(shape, step, width)
    elif algorithm in MASK_PLANNERS:
        if polygons is None:
            polygons = get_contours(mask)
        if algorithm == TRACE_OUTLINE:
            traj = plan_trace_outline(polygons, step)
        elif algorithm == TRACK_CENTER:
            traj = plan_track_center(polygons, step, shape)
        elif algorithm == DIAGONAL_TRANSECT:
            traj = plan_diagonal_transect(polygons, step, width, shape)
        else:
            traj = plan_lawnmower_transect(polygons, step, width, shape)
    else:
        raise PlumeInputError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    traj.check_bounds(shape)
    return traj


# --------------------------------------------------------------------------
# CSV


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["order", "x", "y", "algorithm", "step", "width"])
        for i, (x, y) in enumerate(traj.waypoints):
            writer.writerow([i, int(x), int(y), traj.algorithm, traj.step, traj.width])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["order", "x", "y", "algorithm", "step", "width"]
        if reader.fieldnames != expected:
            raise PlumeInputError(f"{path}: header {reader.fieldnames}, expected {expected}")
        rows = list(reader)
    if not rows:
        # an empty trajectory carries no algorithm/step metadata
        return Trajectory(np.empty((0, 2)), "", 1)
    try:
        rows.sort(key=lambda r: int(r["order"]))
        pts = [(int(r["x"]), int(r["y"])) for r in rows]
        step, width = int(rows[0]["step"]), int(rows[0]["width"])
    except ValueError as exc:
        raise PlumeInputError(f"{path}: {exc}") from None
    return Trajectory(np.array(pts), rows[0]["algorithm"], step, width)
