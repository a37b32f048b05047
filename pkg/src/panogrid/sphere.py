"""Spherical geometry for tangent-plane decompositions of panoramas.

Coordinates follow the geographic convention: longitude ``lon`` in
``[-pi, pi)`` (half-open, wrapped), latitude ``lat`` in ``[-pi/2, pi/2]``.
A tangent plane touches the sphere at a center point; points on the
sphere project onto it along rays from the sphere center, which keeps
great circles straight but is only defined on the open hemisphere
around the center.

The module exposes a scalar dataclass API plus vectorized kernels
(``*_arrays``) that the raster pipeline uses for bulk work.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HemisphereError, IoError, RangeError

TWO_PI = 2.0 * math.pi


def wrap_lon(lon):
    """Wrap longitude(s) to the half-open interval [-pi, pi)."""
    return (np.asarray(lon, dtype=np.float64) + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SphericalCoord:
    """Point on the unit sphere.  Longitude is wrapped on construction."""

    lon: float
    lat: float

    def __post_init__(self):
        if not math.isfinite(self.lon) or not math.isfinite(self.lat):
            raise RangeError("coordinates must be finite")
        if not -math.pi / 2 <= self.lat <= math.pi / 2:
            raise RangeError(f"latitude {self.lat} outside [-pi/2, pi/2]")
        object.__setattr__(self, "lon", float(wrap_lon(self.lon)))
        object.__setattr__(self, "lat", float(self.lat))


@dataclass(frozen=True)
class PlaneCoord:
    """Point in tangent-plane coordinates (units of sphere radii)."""

    x: float
    y: float


@dataclass(frozen=True)
class TangentPlaneSpec:
    """A tangent plane: touch point, full field of view, output side length."""

    center: SphericalCoord
    fov_deg: float
    resolution: int

    def __post_init__(self):
        if not 0.0 < self.fov_deg < 180.0:
            raise RangeError(f"fov_deg {self.fov_deg} outside (0, 180)")
        if self.resolution < 1:
            raise RangeError(f"resolution {self.resolution} must be >= 1")

    @property
    def half_extent(self) -> float:
        """Half side of the square footprint in plane coordinates."""
        return math.tan(math.radians(self.fov_deg) / 2.0)


@dataclass(frozen=True)
class DistortionTriple:
    """Local distortion of the tangent projection at angular radius theta.

    ``length_radial`` and ``length_tangential`` are the scale factors
    along and across the radial direction, ``angular_deg`` the maximum
    angular deformation in degrees, ``area`` the area scale factor.
    """

    length_radial: float
    length_tangential: float
    angular_deg: float
    area: float


def gnomonic_forward_arrays(center_lon, center_lat, lon, lat):
    """Project points onto the tangent plane at (center_lon, center_lat).

    Returns (x, y, cos_c) as float64 arrays.  cos_c <= 0 marks points
    outside the valid hemisphere; x and y are NaN there.  Callers that
    need a hard failure should check cos_c themselves.
    """
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    sin_p0, cos_p0 = math.sin(center_lat), math.cos(center_lat)
    sin_p, cos_p = np.sin(lat), np.cos(lat)
    dlon = lon - center_lon
    cos_dl, sin_dl = np.cos(dlon), np.sin(dlon)
    cos_c = sin_p0 * sin_p + cos_p0 * cos_p * cos_dl
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(cos_c > 0.0, cos_p * sin_dl / cos_c, np.nan)
        y = np.where(cos_c > 0.0, (cos_p0 * sin_p - sin_p0 * cos_p * cos_dl) / cos_c, np.nan)
    return x, y, cos_c


def gnomonic_inverse_arrays(center_lon, center_lat, x, y):
    """Map tangent-plane coordinates back to (lon, lat) arrays."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sin_p0, cos_p0 = math.sin(center_lat), math.cos(center_lat)
    # cos(c) = 1/sqrt(1+rho^2), sin(c)/rho = 1/sqrt(1+rho^2); the common
    # positive factor cancels inside atan2 and arcsin absorbs the rest.
    inv_norm = 1.0 / np.sqrt(1.0 + x * x + y * y)
    lat = np.arcsin(np.clip((sin_p0 + y * cos_p0) * inv_norm, -1.0, 1.0))
    lon = center_lon + np.arctan2(x, cos_p0 - y * sin_p0)
    return wrap_lon(lon), lat


def gnomonic_forward(center: SphericalCoord, point: SphericalCoord) -> PlaneCoord:
    """Project one point; raises HemisphereError when cos(c) <= 0."""
    x, y, cos_c = gnomonic_forward_arrays(center.lon, center.lat, point.lon, point.lat)
    if cos_c <= 0.0:
        raise HemisphereError(
            f"point (lon={point.lon:.6f}, lat={point.lat:.6f}) not in the open "
            f"hemisphere around (lon={center.lon:.6f}, lat={center.lat:.6f})"
        )
    return PlaneCoord(float(x), float(y))


def gnomonic_inverse(center: SphericalCoord, p: PlaneCoord) -> SphericalCoord:
    """Map one plane coordinate back to the sphere."""
    lon, lat = gnomonic_inverse_arrays(center.lon, center.lat, p.x, p.y)
    return SphericalCoord(float(lon), float(lat))


def angular_distance(a: SphericalCoord, b: SphericalCoord) -> float:
    """Great-circle distance in radians, stable near 0 and pi."""
    dlon = b.lon - a.lon
    cos_b, sin_b = math.cos(b.lat), math.sin(b.lat)
    cos_a, sin_a = math.cos(a.lat), math.sin(a.lat)
    cos_dl, sin_dl = math.cos(dlon), math.sin(dlon)
    num = math.hypot(cos_b * sin_dl, cos_a * sin_b - sin_a * cos_b * cos_dl)
    den = sin_a * sin_b + cos_a * cos_b * cos_dl
    return math.atan2(num, den)


def distortion(theta: float) -> DistortionTriple:
    """Distortion factors of the tangent projection at angular radius theta.

    theta is the great-circle distance from the plane's touch point, in
    radians; it must lie in [0, pi/2).  Radial lengths stretch by
    sec^2(theta), tangential lengths by sec(theta), areas by
    sec^3(theta), and the maximum angular deformation is
    2*arcsin(tan^2(theta/2)).
    """
    if not math.isfinite(theta) or theta < 0.0 or theta >= math.pi / 2.0:
        raise DomainError(f"theta {theta} outside [0, pi/2)")
    sec = 1.0 / math.cos(theta)
    sec2 = sec * sec
    t = math.tan(theta / 2.0)
    angular = math.degrees(2.0 * math.asin(t * t))
    return DistortionTriple(
        length_radial=sec2,
        length_tangential=sec,
        angular_deg=angular,
        area=sec2 * sec,
    )


def ring(lat_deg: float, count: int, fov_deg: float, resolution: int,
         phase_deg: float = 0.0) -> list[TangentPlaneSpec]:
    """Evenly spaced planes on one latitude ring, starting at lon -180 + phase."""
    if count < 1:
        raise RangeError(f"ring count {count} must be >= 1")
    out = []
    for j in range(count):
        lon_deg = -180.0 + phase_deg + j * 360.0 / count
        center = SphericalCoord(math.radians(lon_deg), math.radians(lat_deg))
        out.append(TangentPlaneSpec(center, fov_deg, resolution))
    return out


def plane_layout_18(fov_deg: float = 80.0, resolution: int = 192,
                    polar_lat_deg: float = 67.5,
                    equatorial_lat_deg: float = 22.5) -> list[TangentPlaneSpec]:
    """The default 18-plane sphere cover: rows of 3/6/6/3 planes.

    Row latitudes default to +-67.5 deg (polar, 3 planes each) and
    +-22.5 deg (equatorial, 6 planes each).  Order: north polar, upper
    equatorial, lower equatorial, south polar; each row ascends in
    longitude from -180 deg.  With the default 80 deg field of view the
    square footprints cover the whole sphere.
    """
    return (
        ring(polar_lat_deg, 3, fov_deg, resolution)
        + ring(equatorial_lat_deg, 6, fov_deg, resolution)
        + ring(-equatorial_lat_deg, 6, fov_deg, resolution)
        + ring(-polar_lat_deg, 3, fov_deg, resolution)
    )


def erp_lonlat_of_pixels(px, py, width: int, height: int):
    """Continuous equirectangular pixel coordinates -> (lon, lat) arrays.

    The linear map sends x in [0, W) to lon in [-pi, pi) and y in
    [0, H) to lat in [pi/2, -pi/2]; pixel index i has its center at
    continuous coordinate i + 0.5.
    """
    _check_erp_dims(width, height)
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    lon = -math.pi + TWO_PI * px / width
    lat = math.pi / 2.0 - math.pi * py / height
    return lon, lat


def erp_pixels_of_lonlat(lon, lat, width: int, height: int):
    """(lon, lat) arrays -> continuous equirectangular pixel coordinates."""
    _check_erp_dims(width, height)
    lon = wrap_lon(lon)
    lat = np.asarray(lat, dtype=np.float64)
    px = (lon + math.pi) * width / TWO_PI
    py = (math.pi / 2.0 - lat) * height / math.pi
    return px, py


def _check_erp_dims(width: int, height: int):
    from .errors import DimensionError

    if width < 2 or height < 1 or width != 2 * height:
        raise DimensionError(f"equirectangular raster must have width == 2*height, got {width}x{height}")


def coverage_counts(specs: list[TangentPlaneSpec], width: int, height: int) -> np.ndarray:
    """How many plane footprints contain each equirectangular pixel center.

    A pixel is covered by a plane when its direction lies in the
    plane's hemisphere and projects inside the square footprint
    |x|, |y| <= tan(fov/2).
    """
    jj, ii = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    lon, lat = erp_lonlat_of_pixels(ii + 0.5, jj + 0.5, width, height)
    counts = np.zeros((height, width), dtype=np.int32)
    for spec in specs:
        x, y, cos_c = gnomonic_forward_arrays(spec.center.lon, spec.center.lat, lon, lat)
        half = spec.half_extent
        inside = (cos_c > 0.0) & (np.abs(x) <= half) & (np.abs(y) <= half)
        counts += inside.astype(np.int32)
    return counts


def save_layout(path, specs: list[TangentPlaneSpec], grid: dict | None = None) -> None:
    """Write a plane layout (and optional grid section) as a JSON document."""
    doc: dict = {
        "planes": [
            {
                "lon_deg": math.degrees(s.center.lon),
                "lat_deg": math.degrees(s.center.lat),
                "fov_deg": s.fov_deg,
                "resolution": s.resolution,
            }
            for s in specs
        ]
    }
    if grid is not None:
        doc["grid"] = grid
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write layout file {path}: {exc}") from exc


def load_layout(path) -> tuple[list[TangentPlaneSpec], dict | None]:
    """Read a layout JSON document; returns (planes, grid section or None)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read layout file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"layout file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "planes" not in doc:
        raise IoError(f"layout file {path} has no 'planes' list")
    specs = []
    for entry in doc["planes"]:
        center = SphericalCoord(math.radians(entry["lon_deg"]), math.radians(entry["lat_deg"]))
        specs.append(TangentPlaneSpec(center, float(entry["fov_deg"]), int(entry["resolution"])))
    return specs, doc.get("grid")
