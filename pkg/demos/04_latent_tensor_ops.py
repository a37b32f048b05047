"""
Seam-aware tensor operations for panoramic latents
==================================================

Equirectangular images (and their latent tensors) wrap horizontally:
the leftmost and rightmost columns are neighbours on the sphere.  The
operations here respect that wrap so model inputs never see a false
edge at the seam.
"""

import numpy as np

import panogrid as pg

# ---------------------------------------------------------------------------
# Circular padding: the left pad repeats the right edge, and vice versa
# ---------------------------------------------------------------------------

z = np.arange(8, dtype=np.float32).reshape(1, 2, 4)
print("row 0:        ", z[0, 0])

padded = pg.circular_pad(z, 1)
print("padded row 0: ", padded[0, 0])
assert padded[0, 0].tolist() == [3.0, 0.0, 1.0, 2.0, 3.0, 0.0]

# crop_pad removes exactly what circular_pad added
restored = pg.crop_pad(padded, 1)
assert np.array_equal(restored, z)
print("crop_pad(circular_pad(z, 1), 1) == z")

# the pad may not exceed the tensor width
try:
    pg.circular_pad(z, 5)
except pg.RangeError as exc:
    print(f"oversized pad rejected: {exc}")

# ---------------------------------------------------------------------------
# Longitude rotation: a cyclic column shift, the sphere's yaw in pixel space
# ---------------------------------------------------------------------------

rot = pg.rotate_lon(z, 1)
print("rotated row 0:", rot[0, 0])
assert np.array_equal(pg.rotate_lon(rot, -1), z)
assert np.array_equal(pg.rotate_lon(z, 4), z)

# ---------------------------------------------------------------------------
# Patch tiling with circular halos: seam patches see the opposite edge
# ---------------------------------------------------------------------------

latent = pg.normal_noise((4, 8, 16), seed=3)
grid = pg.tile_patches(latent, patch_px=4, halo=2)
print(f"patches: {grid.patches.shape}  (rows={grid.rows}, cols={grid.cols}, halo={grid.halo})")

# the first patch's left halo is the tensor's last two columns
assert np.array_equal(grid.patches[0][:, :, :2], latent[:, :4, -2:])
back = pg.untile_patches(grid)
assert np.array_equal(back, latent)
print("untile_patches inverts tile_patches exactly")

# ---------------------------------------------------------------------------
# Deterministic noise and perturbation, reproducible from the seed alone
# ---------------------------------------------------------------------------

a = pg.perturb(latent, sigma=0.1, seed=42)
b = pg.perturb(latent, sigma=0.1, seed=42)
c = pg.perturb(latent, sigma=0.1, seed=43)
print(f"same seed identical: {np.array_equal(a, b)}, "
      f"different seed identical: {np.array_equal(a, c)}")

# flow interpolation walks the straight line between sample and noise
eps = pg.normal_noise(latent.shape, seed=9)
mid = pg.flow_interpolate(latent, eps, t=0.5)
assert np.allclose(mid, 0.5 * latent + 0.5 * eps)
endpoints = pg.flow_interpolate(latent, eps, t=0.0)
assert np.array_equal(endpoints, latent)
print("flow_interpolate endpoints and midpoint check out")
