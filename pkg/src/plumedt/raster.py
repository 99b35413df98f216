"""
Raster containers and bit-exact file IO.

A :class:`Scene` holds four uint16 band planes in the fixed order
red, green, blue, nir, plus an optional boolean ground-truth label.
Masks are plain 2-D boolean numpy arrays; fields are 2-D float arrays
in [0, 1].

On disk a scene is a JSON manifest next to one headerless little-endian
uint16 file per band. Masks are binary PGM (P5) files with values 0/255.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from plumedt.errors import PlumeInputError

BAND_NAMES = ("red", "green", "blue", "nir")
RED, GREEN, BLUE, NIR = range(4)
U16_MAX = 65535


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Scene:
    """Four-band uint16 image with an optional plume label.

    Attributes
    ----------
    id : str
        Scene identifier, used in reports.
    bands : ndarray, shape (4, height, width), uint16
        Band planes ordered red, green, blue, nir.
    label : ndarray of bool, shape (height, width), or None
        Ground-truth plume mask.
    gsd : float
        Ground sampling distance in meters per pixel (metadata only).
    """

    id: str
    bands: np.ndarray
    label: np.ndarray | None = None
    gsd: float = 0.5

    def __post_init__(self):
        bands = np.asarray(self.bands)
        if bands.ndim != 3 or bands.shape[0] != 4:
            raise PlumeInputError(
                f"band count must be 4 with shape (4, h, w); got shape {bands.shape}"
            )
        if bands.shape[1] < 1 or bands.shape[2] < 1:
            raise PlumeInputError("scene dimensions must be positive")
        if bands.dtype != np.uint16:
            raise PlumeInputError(f"bands must be uint16, got {bands.dtype}")
        object.__setattr__(self, "bands", _frozen(bands))
        if self.label is not None:
            label = np.asarray(self.label)
            if label.shape != bands.shape[1:]:
                raise PlumeInputError(
                    f"label shape {label.shape} does not match image {bands.shape[1:]}"
                )
            object.__setattr__(self, "label", _frozen(label.astype(bool)))

    @property
    def height(self) -> int:
        return self.bands.shape[1]

    @property
    def width(self) -> int:
        return self.bands.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bands.shape[1:]

    def band(self, name: str) -> np.ndarray:
        return self.bands[BAND_NAMES.index(name)]

    def with_label(self, label: np.ndarray | None) -> Scene:
        return Scene(self.id, self.bands, label, self.gsd)


def as_mask(mask, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate and return `mask` as a 2-D boolean array."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise PlumeInputError(f"mask must be 2-D, got {arr.ndim}-D")
    if shape is not None and arr.shape != tuple(shape):
        raise PlumeInputError(f"mask shape {arr.shape} does not match {tuple(shape)}")
    return arr.astype(bool, copy=False)


def normalize(scene: Scene) -> np.ndarray:
    """Scale every band to [0, 1] by the uint16 maximum.

    Returns a float64 array of shape (4, height, width).
    """
    return scene.bands.astype(np.float64) / U16_MAX


def downsample(scene: Scene, factor: int) -> Scene:
    """Block-average the bands by an integer factor.

    Trailing rows and columns that do not fill a whole block are dropped.
    Band means are rounded half-up to the nearest integer; the label is
    reduced by majority vote with ties going to plume.
    """
    if int(factor) != factor or factor < 1:
        raise PlumeInputError(f"downsample factor must be an integer >= 1, got {factor}")
    factor = int(factor)
    if factor == 1:
        return Scene(scene.id, scene.bands, scene.label, scene.gsd)
    h, w = scene.height // factor, scene.width // factor
    if h < 1 or w < 1:
        raise PlumeInputError(f"factor {factor} larger than scene {scene.shape}")
    n = factor * factor
    blocks = scene.bands[:, : h * factor, : w * factor].astype(np.int64)
    sums = blocks.reshape(4, h, factor, w, factor).sum(axis=(2, 4))
    # exact integer round-half-up of sums / n
    bands = ((2 * sums + n) // (2 * n)).astype(np.uint16)
    label = None
    if scene.label is not None:
        votes = scene.label[: h * factor, : w * factor].reshape(h, factor, w, factor)
        label = 2 * votes.sum(axis=(1, 3)) >= n
    return Scene(scene.id, bands, label, scene.gsd * factor)


# --------------------------------------------------------------------------
# PGM masks


def save_mask(mask, path) -> None:
    """Write a boolean mask as binary PGM with plume=255, background=0."""
    mask = as_mask(mask)
    h, w = mask.shape
    payload = np.where(mask, 255, 0).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(payload)


def _pgm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated header integers, skipping # comments."""
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PlumeInputError("malformed PGM header: truncated")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates header from payload
    if pos >= n or not data[pos : pos + 1].isspace():
        raise PlumeInputError("malformed PGM header: missing separator")
    try:
        values = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise PlumeInputError(f"malformed PGM header: {exc}") from None
    if tokens[0] != b"P5":
        raise PlumeInputError(f"malformed PGM header: magic {tokens[0]!r}, expected P5")
    return values, pos + 1


def load_mask(path) -> np.ndarray:
    """Read a binary PGM mask written by :func:`save_mask`."""
    data = Path(path).read_bytes()
    (w, h, maxval), offset = _pgm_tokens(data, 4)
    if w < 1 or h < 1:
        raise PlumeInputError(f"malformed PGM header: dimensions {w}x{h}")
    if maxval != 255:
        raise PlumeInputError(f"malformed PGM header: maxval {maxval}, expected 255")
    payload = np.frombuffer(data, dtype=np.uint8, count=-1, offset=offset)
    if payload.size != w * h:
        raise PlumeInputError(
            f"PGM payload has {payload.size} bytes, expected {w * h}"
        )
    if not np.all((payload == 0) | (payload == 255)):
        raise PlumeInputError("PGM mask contains pixel values other than 0 and 255")
    return (payload == 255).reshape(h, w)


# --------------------------------------------------------------------------
# scene manifests


def save_scene(scene: Scene, directory, *, stem: str = "") -> Path:
    """Write `scene` as a manifest plus raw band files into `directory`.

    Returns the manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = f"{stem}_" if stem else ""
    bands = []
    for name, plane in zip(BAND_NAMES, scene.bands):
        fname = f"{prefix}{name}.u16"
        (directory / fname).write_bytes(plane.astype("<u2").tobytes())
        bands.append({"name": name, "file": fname})
    manifest = {
        "id": scene.id,
        "width": scene.width,
        "height": scene.height,
        "dtype": "u16",
        "byte_order": "little",
        "bands": bands,
        "label": None,
        "gsd_m": scene.gsd,
    }
    if scene.label is not None:
        label_name = f"{prefix}label.pgm"
        save_mask(scene.label, directory / label_name)
        manifest["label"] = label_name
    path = directory / f"{prefix}manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def load_scene(manifest_path) -> Scene:
    """Load a scene from its JSON manifest.

    Raises
    ------
    FileNotFoundError
        If the manifest or a referenced file is missing.
    PlumeInputError
        On a malformed manifest, a band count other than 4, or a band
        payload whose size disagrees with the declared dimensions.
    """
    manifest_path = Path(manifest_path)
    try:
        meta = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlumeInputError(f"{manifest_path}: invalid JSON ({exc})") from None
    base = manifest_path.parent
    try:
        width, height = int(meta["width"]), int(meta["height"])
        band_entries = meta["bands"]
    except (KeyError, TypeError, ValueError) as exc:
        raise PlumeInputError(f"{manifest_path}: missing or bad field {exc}") from None
    if width < 1 or height < 1:
        raise PlumeInputError(f"{manifest_path}: dimensions must be positive")
    if meta.get("dtype", "u16") != "u16" or meta.get("byte_order", "little") != "little":
        raise PlumeInputError(f"{manifest_path}: only little-endian u16 bands are supported")
    if len(band_entries) != 4:
        raise PlumeInputError(
            f"{manifest_path}: band count is {len(band_entries)}, expected 4"
        )
    names = [b.get("name") for b in band_entries]
    if names != list(BAND_NAMES):
        raise PlumeInputError(
            f"{manifest_path}: band order must be {list(BAND_NAMES)}, got {names}"
        )
    planes = []
    for entry in band_entries:
        raw = (base / entry["file"]).read_bytes()
        if len(raw) != 2 * width * height:
            raise PlumeInputError(
                f"{entry['file']}: {len(raw)} bytes, manifest declares "
                f"{width}x{height} u16 = {2 * width * height} bytes"
            )
        planes.append(np.frombuffer(raw, dtype="<u2").reshape(height, width))
    label = None
    if meta.get("label"):
        label = load_mask(base / meta["label"])
        if label.shape != (height, width):
            raise PlumeInputError(
                f"label {label.shape} does not match manifest {(height, width)}"
            )
    return Scene(
        str(meta.get("id", manifest_path.stem)),
        np.stack(planes).astype(np.uint16),
        label,
        float(meta.get("gsd_m", 0.5)),
    )


def save_dataset(scenes, directory) -> Path:
    """Write each scene into its own subdirectory plus a ``dataset.json`` index."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, scene in enumerate(scenes):
        sub = f"scene_{i:03d}"
        manifest = save_scene(scene, directory / sub)
        entries.append(os.path.relpath(manifest, directory))
    index = directory / "dataset.json"
    index.write_text(json.dumps({"scenes": entries}, indent=2) + "\n", encoding="utf-8")
    return index


def load_dataset(path) -> list[Scene]:
    """Load scenes from a ``dataset.json`` index or a single scene manifest."""
    path = Path(path)
    meta = json.loads(path.read_text(encoding="utf-8"))
    if "scenes" in meta:
        return [load_scene(path.parent / p) for p in meta["scenes"]]
    return [load_scene(path)]
