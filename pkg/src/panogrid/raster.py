"""Rasters on the sphere: equirectangular images, tangent views, cubemaps.

Images are float32 arrays with values in [0, 1], shaped (height, width,
channels) with 1 to 4 channels.  Equirectangular rasters must satisfy
width == 2 * height.  Sampling uses bilinear interpolation with the
pixel-center convention: pixel index i covers continuous coordinates
[i, i+1) and has its center at i + 0.5.  Longitude wraps circularly;
latitude clamps at the poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import (
    CountError,
    CoverageError,
    DimensionError,
    IoError,
    RangeError,
)
from .sphere import (
    TangentPlaneSpec,
    SphericalCoord,
    erp_lonlat_of_pixels,
    erp_pixels_of_lonlat,
    gnomonic_forward_arrays,
    gnomonic_inverse_arrays,
)

WEIGHTINGS = ("center_cosine", "inverse_area_distortion", "uniform")

_RANGE_SLACK = 1e-5


def _validate_image(data: np.ndarray, what: str) -> np.ndarray:
    data = np.asarray(data)
    if data.ndim != 3 or not 1 <= data.shape[2] <= 4:
        raise DimensionError(f"{what} must be (height, width, channels) with 1..4 channels, got {data.shape}")
    if not np.all(np.isfinite(data)):
        raise RangeError(f"{what} contains non-finite values")
    lo, hi = float(data.min(initial=0.0)), float(data.max(initial=0.0))
    if lo < -_RANGE_SLACK or hi > 1.0 + _RANGE_SLACK:
        raise RangeError(f"{what} values outside [0, 1]: min {lo}, max {hi}")
    return np.clip(data, 0.0, 1.0).astype(np.float32)


@dataclass
class ErpImage:
    """Equirectangular panorama raster (float32, [0, 1], width == 2*height)."""

    data: np.ndarray

    def __post_init__(self):
        self.data = _validate_image(self.data, "equirectangular image")
        if self.width != 2 * self.height:
            raise DimensionError(
                f"equirectangular image must have width == 2*height, got {self.width}x{self.height}"
            )

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass
class TangentSet:
    """Tangent-plane views with their generating specs, index-aligned."""

    specs: list[TangentPlaneSpec]
    images: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if len(self.specs) != len(self.images):
            raise CountError(f"{len(self.specs)} specs but {len(self.images)} images")
        if not self.specs:
            return
        validated = []
        channels = None
        for spec, img in zip(self.specs, self.images):
            img = _validate_image(img, "tangent image")
            if img.shape[0] != spec.resolution or img.shape[1] != spec.resolution:
                raise DimensionError(
                    f"tangent image {img.shape[:2]} does not match spec resolution {spec.resolution}"
                )
            if channels is None:
                channels = img.shape[2]
            elif img.shape[2] != channels:
                raise DimensionError("tangent images must share a channel count")
            validated.append(img)
        self.images = validated

    @property
    def channels(self) -> int:
        return self.images[0].shape[2] if self.images else 0

    def __len__(self) -> int:
        return len(self.specs)


@dataclass
class CubemapFaces:
    """Six square cube faces.  Face centers sit on the coordinate axes:

    front (lon 0, lat 0), right (lon +90), back (lon -180), left
    (lon -90), top (north pole), bottom (south pole).  Each face is the
    90 degree field-of-view tangent view at its center, so in-face axes
    follow the tangent-plane convention.
    """

    front: np.ndarray
    right: np.ndarray
    back: np.ndarray
    left: np.ndarray
    top: np.ndarray
    bottom: np.ndarray

    ORDER = ("front", "right", "back", "left", "top", "bottom")

    def __post_init__(self):
        size = None
        channels = None
        for name in self.ORDER:
            img = _validate_image(getattr(self, name), f"cube face {name}")
            if img.shape[0] != img.shape[1]:
                raise DimensionError(f"cube face {name} must be square, got {img.shape[:2]}")
            if size is None:
                size, channels = img.shape[0], img.shape[2]
            elif img.shape[0] != size or img.shape[2] != channels:
                raise DimensionError("cube faces must share size and channel count")
            setattr(self, name, img)

    @property
    def face_px(self) -> int:
        return self.front.shape[0]

    def as_list(self) -> list[np.ndarray]:
        return [getattr(self, name) for name in self.ORDER]


_FACE_CENTERS = {
    "front": (0.0, 0.0),
    "right": (math.pi / 2.0, 0.0),
    "back": (-math.pi, 0.0),
    "left": (-math.pi / 2.0, 0.0),
    "top": (0.0, math.pi / 2.0),
    "bottom": (0.0, -math.pi / 2.0),
}


def _bilinear_gather(data: np.ndarray, col: np.ndarray, row: np.ndarray,
                     wrap_cols: bool) -> np.ndarray:
    """Sample data (H, W, C) at fractional pixel indices (row, col).

    Columns wrap circularly when wrap_cols is set, otherwise clamp;
    rows always clamp.  Returns float64 with shape row.shape + (C,).
    """
    h, w = data.shape[:2]
    row = np.clip(row, 0.0, float(h - 1))
    r0 = np.floor(row).astype(np.int64)
    r1 = np.minimum(r0 + 1, h - 1)
    fr = row - r0

    if wrap_cols:
        col = np.mod(col, float(w))
        c0 = np.floor(col).astype(np.int64)
        fc = col - c0
        c0 = np.mod(c0, w)
        c1 = np.mod(c0 + 1, w)
    else:
        col = np.clip(col, 0.0, float(w - 1))
        c0 = np.floor(col).astype(np.int64)
        fc = col - c0
        c1 = np.minimum(c0 + 1, w - 1)

    d = data.astype(np.float64, copy=False)
    fr = fr[..., None]
    fc = fc[..., None]
    top = d[r0, c0] * (1.0 - fc) + d[r0, c1] * fc
    bot = d[r1, c0] * (1.0 - fc) + d[r1, c1] * fc
    return top * (1.0 - fr) + bot * fr


def sample_bilinear(img: ErpImage, lon, lat) -> np.ndarray:
    """Sample an equirectangular image at spherical coordinates.

    lon and lat are scalars or arrays in radians.  Longitude wraps
    circularly across the seam; latitude clamps at the poles.  Returns
    float64 samples shaped like lon with a trailing channel axis.
    """
    px, py = erp_pixels_of_lonlat(lon, lat, img.width, img.height)
    return _bilinear_gather(img.data, px - 0.5, py - 0.5, wrap_cols=True)


def _plane_pixel_grid(spec: TangentPlaneSpec):
    """Plane coordinates of each output pixel center, row 0 at +y."""
    half = spec.half_extent
    idx = (np.arange(spec.resolution, dtype=np.float64) + 0.5) / spec.resolution
    u = (2.0 * idx - 1.0) * half
    v = (1.0 - 2.0 * idx) * half
    return np.meshgrid(u, v)


def extract_tangent(img: ErpImage, spec: TangentPlaneSpec) -> np.ndarray:
    """Render the tangent-plane view described by spec from a panorama.

    The output is (resolution, resolution, channels) float32.  Columns
    run west to east (plane -x to +x), rows top to bottom (+y to -y),
    so the view is upright when the plane center is on the equator.
    """
    xx, yy = _plane_pixel_grid(spec)
    lon, lat = gnomonic_inverse_arrays(spec.center.lon, spec.center.lat, xx, yy)
    vals = sample_bilinear(img, lon, lat)
    return np.clip(vals, 0.0, 1.0).astype(np.float32)


def extract_all(img: ErpImage, specs: list[TangentPlaneSpec]) -> TangentSet:
    """Extract every plane of a layout into a TangentSet."""
    return TangentSet(specs, [extract_tangent(img, s) for s in specs])


def _plane_cols_rows(spec: TangentPlaneSpec, x: np.ndarray, y: np.ndarray):
    """Invert the pixel grid: plane coordinates -> fractional pixel indices."""
    half = spec.half_extent
    res = spec.resolution
    col = (x / half + 1.0) * (res / 2.0) - 0.5
    row = (1.0 - y / half) * (res / 2.0) - 0.5
    return col, row


def reproject_blend(ts: TangentSet, width: int, height: int,
                    weighting: str = "center_cosine", k: float = 2.0) -> ErpImage:
    """Blend tangent views back into an equirectangular panorama.

    Every output pixel averages the contributing planes with one of
    three weighting schemes: "center_cosine" weights by cos(c)**k where
    c is the angular distance to the plane center (default k=2),
    "inverse_area_distortion" by cos(c)**3 (the reciprocal of the local
    area stretch), "uniform" equally.  A plane contributes wherever the
    pixel direction falls inside its square footprint.  Weights are
    normalized per pixel; raises CoverageError if any pixel receives no
    contribution.
    """
    if weighting not in WEIGHTINGS:
        raise RangeError(f"unknown weighting {weighting!r}; expected one of {WEIGHTINGS}")
    if not len(ts):
        raise CountError("cannot blend an empty TangentSet")
    jj, ii = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    lon, lat = erp_lonlat_of_pixels(ii + 0.5, jj + 0.5, width, height)
    channels = ts.channels
    acc = np.zeros((height, width, channels), dtype=np.float64)
    wsum = np.zeros((height, width), dtype=np.float64)
    for spec, timg in zip(ts.specs, ts.images):
        x, y, cos_c = gnomonic_forward_arrays(spec.center.lon, spec.center.lat, lon, lat)
        half = spec.half_extent
        valid = (cos_c > 0.0) & (np.abs(x) <= half) & (np.abs(y) <= half)
        if not valid.any():
            continue
        xv, yv = x[valid], y[valid]
        col, row = _plane_cols_rows(spec, xv, yv)
        vals = _bilinear_gather(timg, col, row, wrap_cols=False)
        if weighting == "center_cosine":
            w = cos_c[valid] ** k
        elif weighting == "inverse_area_distortion":
            w = cos_c[valid] ** 3
        else:
            w = np.ones(xv.shape, dtype=np.float64)
        acc[valid] += vals * w[:, None]
        wsum[valid] += w
    uncovered = int(np.count_nonzero(wsum == 0.0))
    if uncovered:
        raise CoverageError(
            f"{uncovered} of {width * height} output pixels received no plane contribution",
            uncovered=uncovered,
        )
    out = acc / wsum[..., None]
    return ErpImage(np.clip(out, 0.0, 1.0).astype(np.float32))


def erp_to_cubemap(img: ErpImage, face_px: int) -> CubemapFaces:
    """Render the six 90 degree cube faces of a panorama."""
    if face_px < 1:
        raise RangeError(f"face_px {face_px} must be >= 1")
    faces = {}
    for name in CubemapFaces.ORDER:
        lon0, lat0 = _FACE_CENTERS[name]
        spec = TangentPlaneSpec(SphericalCoord(lon0, lat0), 90.0, face_px)
        faces[name] = extract_tangent(img, spec)
    return CubemapFaces(**faces)


def cubemap_to_erp(faces: CubemapFaces, width: int, height: int) -> ErpImage:
    """Resample a cubemap into an equirectangular panorama.

    Each output direction is assigned to the face whose axis dominates
    the direction vector, then sampled bilinearly on that face with
    edge clamping.
    """
    jj, ii = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    lon, lat = erp_lonlat_of_pixels(ii + 0.5, jj + 0.5, width, height)
    cos_lat = np.cos(lat)
    vx = cos_lat * np.cos(lon)
    vy = cos_lat * np.sin(lon)
    vz = np.sin(lat)
    axes = np.stack([vx, vy, vz])
    dominant = np.argmax(np.abs(axes), axis=0)
    face_of = np.where(
        dominant == 0,
        np.where(vx >= 0, 0, 2),
        np.where(dominant == 1, np.where(vy >= 0, 1, 3), np.where(vz >= 0, 4, 5)),
    )
    face_px = faces.face_px
    channels = faces.front.shape[2]
    out = np.zeros((height, width, channels), dtype=np.float64)
    for fi, name in enumerate(CubemapFaces.ORDER):
        mask = face_of == fi
        if not mask.any():
            continue
        lon0, lat0 = _FACE_CENTERS[name]
        spec = TangentPlaneSpec(SphericalCoord(lon0, lat0), 90.0, face_px)
        x, y, cos_c = gnomonic_forward_arrays(lon0, lat0, lon[mask], lat[mask])
        col, row = _plane_cols_rows(spec, x, y)
        out[mask] = _bilinear_gather(getattr(faces, name), col, row, wrap_cols=False)
    return ErpImage(np.clip(out, 0.0, 1.0).astype(np.float32))


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB for [0, 1] images; inf when equal."""
    da = a.data if isinstance(a, ErpImage) else np.asarray(a)
    db = b.data if isinstance(b, ErpImage) else np.asarray(b)
    if da.shape != db.shape:
        raise DimensionError(f"psnr operands differ in shape: {da.shape} vs {db.shape}")
    mse = float(np.mean((da.astype(np.float64) - db.astype(np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def write_png(path, data, bit_depth: int = 8) -> None:
    """Write a [0, 1] float image as an 8-bit PNG (16-bit for grayscale).

    data may be an ErpImage or an array shaped (H, W, C) with C in
    {1, 3, 4}.  16-bit output is only supported for single-channel
    images.
    """
    arr = data.data if isinstance(data, ErpImage) else np.asarray(data)
    if arr.ndim == 2:
        arr = arr[..., None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3, 4):
        raise DimensionError(f"PNG output needs 1, 3, or 4 channels, got shape {arr.shape}")
    arr = np.clip(arr.astype(np.float64), 0.0, 1.0)
    if bit_depth == 8:
        quant = np.round(arr * 255.0).astype(np.uint8)
        if quant.shape[2] == 1:
            pil = Image.fromarray(quant[..., 0], mode="L")
        elif quant.shape[2] == 3:
            pil = Image.fromarray(quant, mode="RGB")
        else:
            pil = Image.fromarray(quant, mode="RGBA")
    elif bit_depth == 16:
        if arr.shape[2] != 1:
            raise RangeError("16-bit PNG output is only supported for single-channel images")
        quant = np.round(arr[..., 0] * 65535.0).astype(np.uint16)
        pil = Image.fromarray(quant)
    else:
        raise RangeError(f"bit_depth must be 8 or 16, got {bit_depth}")
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise IoError(f"cannot write PNG {path}: {exc}") from exc


def read_png(path) -> np.ndarray:
    """Read a PNG into a float32 (H, W, C) array scaled to [0, 1]."""
    try:
        with Image.open(path) as pil:
            pil.load()
            mode = pil.mode
            if mode in ("L", "RGB", "RGBA"):
                arr = np.asarray(pil, dtype=np.float32) / 255.0
            elif mode in ("I;16", "I"):
                arr = np.asarray(pil, dtype=np.float32) / 65535.0
            elif mode == "P":
                arr = np.asarray(pil.convert("RGB"), dtype=np.float32) / 255.0
            else:
                raise IoError(f"unsupported PNG mode {mode!r} in {path}")
    except FileNotFoundError as exc:
        raise IoError(f"cannot read PNG {path}: {exc}") from exc
    except OSError as exc:
        raise IoError(f"cannot read PNG {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[..., None]
    return arr


def read_erp_png(path) -> ErpImage:
    """Read a PNG and validate it as an equirectangular panorama."""
    return ErpImage(read_png(path))
