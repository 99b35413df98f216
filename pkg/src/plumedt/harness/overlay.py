"""Debug raster: blue band in gray, denoised plume tinted, waypoints in pure red."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from plumedt.errors import PlumeInputError
from plumedt.planner import Trajectory, write_trajectory_csv
from plumedt.raster import BLUE, Scene, as_mask

WAYPOINT_RGB = (255, 0, 0)


def render_overlay(scene: Scene, traj: Trajectory, mask=None) -> np.ndarray:
    """(height, width, 3) uint8 image.

    Non-waypoint pixels always have a non-zero green channel, so pure red
    (255, 0, 0) marks waypoints and nothing else.
    """
    blue = scene.bands[BLUE].astype(np.float64)
    peak = blue.max()
    gray = np.zeros(scene.shape) if peak == 0 else blue / peak
    gray = (40 + 215 * gray).astype(np.uint8)  # floor of 40 keeps green > 0
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    if mask is not None:
        m = as_mask(mask, scene.shape)
        g = gray[m].astype(np.uint16)
        rgb[m, 0] = g // 2
        rgb[m, 1] = np.minimum(255, g // 2 + 110)
        rgb[m, 2] = np.minimum(255, g // 2 + 110)
    traj.check_bounds(scene.shape)
    if len(traj):
        rgb[traj.waypoints[:, 1], traj.waypoints[:, 0]] = WAYPOINT_RGB
    return rgb


def write_ppm(rgb: np.ndarray, path) -> None:
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P6" or int(parts[3]) != 255:
        raise PlumeInputError(f"{path}: not an 8-bit binary PPM written by write_ppm")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(data[-w * h * 3:], dtype=np.uint8).reshape(h, w, 3)


def emit_overlay(scene: Scene, traj: Trajectory, mask, path) -> tuple[Path, Path]:
    """Write the overlay as binary PPM plus a ``<stem>_waypoints.csv`` with the order."""
    path = Path(path)
    try:
        write_ppm(render_overlay(scene, traj, mask), path)
        csv_path = path.with_name(path.stem + "_waypoints.csv")
        write_trajectory_csv(traj, csv_path)
    except OSError as exc:
        raise PlumeInputError(f"cannot write overlay to {path}: {exc}") from None
    return path, csv_path
