"""
Binary morphology and polygon-level mask denoising.

All operations use a full 3x3 structuring element, treat out-of-frame
pixels as background, and use 8-connectivity for components. Denoising
runs::

    closing rounds until the component count stops falling
    -> contour extraction (one outer contour per component)
    -> drop polygons below a minimum area
    -> fill the surviving contours back into a mask
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from plumedt.errors import ContractViolation, PlumeInputError
from plumedt.raster import as_mask

EIGHT = np.ones((3, 3), dtype=bool)

# Clockwise neighbor offsets (dx, dy) in image coordinates (y grows downward),
# starting from west.
_CLOCKWISE = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_DIR_INDEX = {d: i for i, d in enumerate(_CLOCKWISE)}


@dataclass(frozen=True, eq=False)
class PlumePolygon:
    """Outer contour of one 8-connected mask component.

    `contour` is an (n, 2) integer array of (x, y) pixels, traced clockwise
    from the component's topmost-then-leftmost pixel. Consecutive points are
    8-adjacent and the last point is 8-adjacent to the first. `area` counts
    the pixels of the component with its holes filled.
    """

    contour: np.ndarray
    area: int
    component_id: int

    def __len__(self):
        return len(self.contour)


@dataclass(frozen=True)
class DenoiseConfig:
    max_merge_iterations: int = 10
    min_area_fraction: float = 0.001

    def __post_init__(self):
        if self.max_merge_iterations < 0:
            raise PlumeInputError("max_merge_iterations must be >= 0")
        if not 0.0 <= self.min_area_fraction < 1.0:
            raise PlumeInputError("min_area_fraction must be in [0, 1)")


# --------------------------------------------------------------------------
# erosion / dilation


def _neighborhood_stack(mask: np.ndarray) -> np.ndarray:
    """The nine 3x3-shifted copies of `mask`, zero padded."""
    h, w = mask.shape
    padded = np.pad(mask, 1, constant_values=False)
    return np.stack([padded[dy : dy + h, dx : dx + w] for dy in range(3) for dx in range(3)])


def erode(mask) -> np.ndarray:
    """Pixel stays true iff its whole 3x3 neighborhood is true."""
    mask = as_mask(mask)
    return _neighborhood_stack(mask).all(axis=0)


def dilate(mask) -> np.ndarray:
    """Pixel becomes true iff any pixel of its 3x3 neighborhood is true."""
    mask = as_mask(mask)
    return _neighborhood_stack(mask).any(axis=0)


def close(mask) -> np.ndarray:
    return erode(dilate(mask))


def label_components(mask) -> tuple[np.ndarray, int]:
    """8-connected component labels (1..n, raster order of first pixel) and n."""
    labels, n = ndimage.label(as_mask(mask), structure=EIGHT)
    return labels, n


def count_components(mask) -> int:
    return label_components(mask)[1]


# --------------------------------------------------------------------------
# contours


def _trace(component: np.ndarray, start: tuple[int, int]) -> np.ndarray:
    """Moore-neighbor border following on a padded single-component mask.

    `start` is the (x, y) of the topmost-leftmost pixel, so its west
    neighbor is background. Tracing stops when the first move is about to
    repeat.
    """
    sx, sy = start
    cur = start
    back = (sx - 1, sy)
    points = [start]
    first_move = None
    limit = 4 * int(component.sum()) + 8
    for _ in range(limit):
        bx, by = back[0] - cur[0], back[1] - cur[1]
        k0 = _DIR_INDEX[(bx, by)]
        nxt = None
        prev = back
        for j in range(1, 9):
            dx, dy = _CLOCKWISE[(k0 + j) % 8]
            cand = (cur[0] + dx, cur[1] + dy)
            if component[cand[1], cand[0]]:
                nxt = cand
                break
            prev = cand
        if nxt is None:
            return np.array(points, dtype=np.int64)
        if first_move is None:
            first_move = nxt
        elif cur == start and nxt == first_move:
            # drop the trailing copy of the start pixel
            return np.array(points[:-1], dtype=np.int64)
        back = prev
        cur = nxt
        points.append(cur)
    raise ContractViolation("border following did not terminate")


def get_contours(mask) -> list[PlumePolygon]:
    """One clockwise outer contour per 8-connected component.

    Components are numbered in raster order of their topmost-leftmost
    pixel. Holes are not traced; areas count hole pixels as filled.
    """
    mask = as_mask(mask)
    labels, n = label_components(mask)
    polygons = []
    for cid, sl in enumerate(ndimage.find_objects(labels)):
        if sl is None:
            continue
        ys, xs = sl
        crop = labels[sl] == cid + 1
        padded = np.pad(crop, 1, constant_values=False)
        row = int(np.argmax(crop.any(axis=1)))
        col = int(np.argmax(crop[row]))
        contour = _trace(padded, (col + 1, row + 1))
        contour[:, 0] += xs.start - 1
        contour[:, 1] += ys.start - 1
        area = int(ndimage.binary_fill_holes(crop).sum())
        polygons.append(PlumePolygon(contour, area, cid))
    return polygons


def filter_by_area(polygons, min_area: float) -> list[PlumePolygon]:
    """Keep polygons with ``area >= min_area`` in their original order."""
    return [p for p in polygons if p.area >= min_area]


def fill_polygon(polygon: PlumePolygon, shape) -> np.ndarray:
    """Filled region (boundary plus interior) of one contour."""
    h, w = shape
    pts = np.asarray(polygon.contour)
    if pts.size == 0:
        return np.zeros(shape, dtype=bool)
    xs, ys = pts[:, 0], pts[:, 1]
    if xs.min() < 0 or ys.min() < 0 or xs.max() >= w or ys.max() >= h:
        raise PlumeInputError(
            f"polygon {polygon.component_id} has contour points outside the {w}x{h} frame"
        )
    x0, y0 = xs.min(), ys.min()
    crop = np.zeros((ys.max() - y0 + 1, xs.max() - x0 + 1), dtype=bool)
    crop[ys - y0, xs - x0] = True
    out = np.zeros(shape, dtype=bool)
    # pixels not 4-reachable from outside the closed 8-connected contour
    out[y0 : y0 + crop.shape[0], x0 : x0 + crop.shape[1]] = ndimage.binary_fill_holes(crop)
    return out


def reconstruct_mask(polygons, shape) -> np.ndarray:
    """Union of the filled polygons on a frame of `shape` (height, width)."""
    out = np.zeros(shape, dtype=bool)
    for poly in polygons:
        out |= fill_polygon(poly, shape)
    return out


# --------------------------------------------------------------------------
# denoising


def merge_by_closing(mask, max_iters: int) -> np.ndarray:
    """Merge nearby components with repeated 3x3 closings.

    Each round applies dilate-then-erode to the previous round's result.
    Iteration stops once the component count fails to decrease or after
    `max_iters` rounds. The mask with the fewest components is returned,
    earliest round on ties (round 0 is the input).
    """
    mask = as_mask(mask)
    best, best_count = mask, count_components(mask)
    current, prev_count = mask, best_count
    for _ in range(max_iters):
        current = close(current)
        count = count_components(current)
        if count < best_count:
            best, best_count = current, count
        if count >= prev_count:
            break
        prev_count = count
    return best.copy()


def denoise(mask, config: DenoiseConfig | None = None) -> np.ndarray:
    """Merge, extract contours, drop small polygons, and refill."""
    config = config or DenoiseConfig()
    mask = as_mask(mask)
    merged = merge_by_closing(mask, config.max_merge_iterations)
    polygons = get_contours(merged)
    large = filter_by_area(polygons, config.min_area_fraction * mask.size)
    return reconstruct_mask(large, mask.shape)


def write_polygons_csv(polygons, path) -> None:
    """Dump contours as ``componentId,pointIndex,x,y`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["componentId", "pointIndex", "x", "y"])
        for poly in polygons:
            for i, (x, y) in enumerate(poly.contour):
                writer.writerow([poly.component_id, i, int(x), int(y)])
