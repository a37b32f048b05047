"""
Where tangent layouts beat cube maps
====================================

Both representations cover the sphere with gnomonic tiles; what
differs is how far any pixel sits from its plane's touch point.  This
script prints the distortion each layout tolerates at its worst
locations and verifies the closed forms behind the numbers.
"""

import math

import panogrid as pg

# ---------------------------------------------------------------------------
# Worst-case angular radii of the two layouts
# ---------------------------------------------------------------------------

# an 80 deg tile reaches 40 deg at the edge midpoint and
# atan(sqrt(2) * tan(40 deg)) at the corner
tile_edge = math.radians(40.0)
tile_corner = math.atan(math.sqrt(2.0) * math.tan(tile_edge))

# a 90 deg cube face reaches 45 deg at the edge midpoint and
# atan(sqrt(2)) at the corner
cube_edge = math.radians(45.0)
cube_corner = math.atan(math.sqrt(2.0))

rows = [
    ("tangent tile, edge", tile_edge),
    ("tangent tile, corner", tile_corner),
    ("cube face, edge", cube_edge),
    ("cube face, corner", cube_corner),
]

print(f"{'location':<22} {'theta_deg':>9} {'radial':>8} {'tangential':>11} "
      f"{'angular_deg':>12} {'area':>8}")
for name, theta in rows:
    d = pg.distortion(theta)
    print(f"{name:<22} {math.degrees(theta):>9.4f} {d.length_radial:>8.4f} "
          f"{d.length_tangential:>11.4f} {d.angular_deg:>12.4f} {d.area:>8.4f}")

# ---------------------------------------------------------------------------
# The closed forms behind the table
# ---------------------------------------------------------------------------

theta = cube_corner
d = pg.distortion(theta)
sec = 1.0 / math.cos(theta)
assert abs(d.length_radial - sec ** 2) < 1e-12
assert abs(d.length_tangential - sec) < 1e-12
assert abs(d.area - sec ** 3) < 1e-12
assert abs(math.radians(d.angular_deg)
           - 2.0 * math.asin(math.tan(theta / 2.0) ** 2)) < 1e-12
print("\nradial = sec^2, tangential = sec, area = sec^3, "
      "angular = 2*asin(tan^2(theta/2)): verified")

# at the cube corner the area stretch is 3^(3/2)
assert abs(pg.distortion(cube_corner).area - 3.0 ** 1.5) < 1e-12
print(f"cube corner area stretch: {pg.distortion(cube_corner).area:.6f} == 3^1.5")

# the projection blows up toward the equatorial boundary
try:
    pg.distortion(math.radians(90.0))
except pg.DomainError as exc:
    print(f"theta = 90 deg rejected: {exc}")
