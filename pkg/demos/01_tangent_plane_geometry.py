"""
Tangent-plane geometry on the sphere
====================================

Projects points onto a tangent plane and back, shows where the
projection stops being defined, and prints how the three distortion
measures grow toward the plane edge.
"""

import math

import numpy as np

import panogrid as pg

# ---------------------------------------------------------------------------
# A single point, there and back
# ---------------------------------------------------------------------------

center = pg.SphericalCoord(lon=math.radians(30.0), lat=math.radians(45.0))
point = pg.SphericalCoord(lon=math.radians(41.0), lat=math.radians(52.0))

plane = pg.gnomonic_forward(center, point)
back = pg.gnomonic_inverse(center, plane)
print(f"point     lon={math.degrees(point.lon):8.4f}  lat={math.degrees(point.lat):8.4f}")
print(f"on plane  x={plane.x:8.5f}  y={plane.y:8.5f}")
print(f"back      lon={math.degrees(back.lon):8.4f}  lat={math.degrees(back.lat):8.4f}")

# the round trip is exact to float precision
err = pg.angular_distance(point, back)
print(f"round-trip angular error: {err:.3e} rad")

# ---------------------------------------------------------------------------
# The projection is only defined on the open hemisphere around the center
# ---------------------------------------------------------------------------

antipode = pg.SphericalCoord(lon=center.lon + math.pi, lat=-center.lat)
try:
    pg.gnomonic_forward(center, antipode)
except pg.HemisphereError as exc:
    print(f"antipodal point rejected: {exc}")

# ---------------------------------------------------------------------------
# Batched projection: 100k random points through the array API
# ---------------------------------------------------------------------------

rng = np.random.default_rng(0)
lat = np.arcsin(rng.uniform(-1, 1, 100_000))
lon = rng.uniform(-math.pi, math.pi, 100_000)
x, y, cos_c = pg.gnomonic_forward_arrays(center.lon, center.lat, lon, lat)
inside = cos_c > 0
print(f"{inside.mean():.1%} of uniform points fall in the visible hemisphere")

lon2, lat2 = pg.gnomonic_inverse_arrays(center.lon, center.lat, x[inside], y[inside])
worst = max(np.abs(lat2 - lat[inside]).max(),
            np.abs(np.remainder(lon2 - lon[inside] + math.pi, 2 * math.pi) - math.pi).max())
print(f"batched round-trip worst error: {worst:.3e} rad")

# ---------------------------------------------------------------------------
# Distortion vs. angular distance from the plane center
# ---------------------------------------------------------------------------

print()
print(f"{'theta_deg':>9} {'radial':>8} {'tangential':>11} {'angular_deg':>12} {'area':>8}")
for theta_deg in (0, 10, 20, 30, 40, 50, 60):
    d = pg.distortion(math.radians(theta_deg))
    print(f"{theta_deg:>9} {d.length_radial:>8.4f} {d.length_tangential:>11.4f} "
          f"{d.angular_deg:>12.4f} {d.area:>8.4f}")

# area stretch is always the product of the two length stretches
d = pg.distortion(math.radians(40.0))
assert d.area == d.length_radial * d.length_tangential
print("\narea == radial * tangential holds exactly")
