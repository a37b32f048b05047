"""Array operations for wrap-around rasters and their latents.

Tensors here are rank-3 float arrays shaped (channels, height, width).
Width is the circular axis: the last column is adjacent to the first,
as in an equirectangular panorama or its latent encoding.  All
operations are exact index manipulations or elementwise arithmetic, so
round trips are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RangeError


def _validate_tensor3(z, what: str = "tensor") -> np.ndarray:
    z = np.asarray(z)
    if z.ndim != 3:
        raise DimensionError(f"{what} must be rank-3 (channels, height, width), got shape {z.shape}")
    if not np.issubdtype(z.dtype, np.floating):
        raise DimensionError(f"{what} must be a float array, got dtype {z.dtype}")
    return z


def circular_pad(z, p: int) -> np.ndarray:
    """Pad the width axis circularly by p columns on each side.

    Output column j holds input column (j - p) mod W, giving width
    W + 2p: the left padding repeats the rightmost columns and vice
    versa.  p may not exceed the input width.
    """
    z = _validate_tensor3(z)
    w = z.shape[2]
    if p < 0:
        raise RangeError(f"pad width {p} must be >= 0")
    if p > w:
        raise RangeError(f"pad width {p} exceeds tensor width {w}")
    cols = np.mod(np.arange(-p, w + p), w)
    return z[:, :, cols].copy()


def crop_pad(z, p: int) -> np.ndarray:
    """Remove p columns from each side of the width axis.

    Exact inverse of circular_pad with the same p.
    """
    z = _validate_tensor3(z)
    if p < 0:
        raise RangeError(f"pad width {p} must be >= 0")
    w = z.shape[2]
    if 2 * p > w:
        raise RangeError(f"cannot crop {p} columns per side from width {w}")
    return z[:, :, p:w - p].copy()


def rotate_lon(z, k: int) -> np.ndarray:
    """Rotate the width axis by k columns (output col j = input col (j-k) mod W).

    Positive k shifts content eastward.  rotate_lon(z, W) == z.
    """
    z = _validate_tensor3(z)
    return np.roll(z, int(k), axis=2)


@dataclass
class PatchGrid:
    """Square patches of a tensor with circular horizontal halos.

    patches has shape (rows*cols, channels, patch_px, patch_px + 2*halo)
    in row-major patch order; the halo columns are taken circularly
    from the full-width tensor, so seam-adjacent patches carry context
    from the opposite edge.
    """

    patches: np.ndarray
    rows: int
    cols: int
    patch_px: int
    halo: int

    def __post_init__(self):
        p = np.asarray(self.patches)
        expect = (self.rows * self.cols, p.shape[1], self.patch_px, self.patch_px + 2 * self.halo)
        if p.ndim != 4 or p.shape != expect:
            raise DimensionError(f"patches shape {p.shape} does not match layout {expect}")
        self.patches = p

    @property
    def positions(self) -> list[tuple[int, int]]:
        """(row, col) patch indices in storage order."""
        return [divmod(i, self.cols) for i in range(self.rows * self.cols)]


def tile_patches(z, patch_px: int, halo: int = 0) -> PatchGrid:
    """Cut a tensor into square patches with circular horizontal halos.

    Height and width must be divisible by patch_px.  Each patch keeps
    halo extra columns on both sides, wrapped circularly, so the
    leftmost patches see the rightmost columns and vice versa.
    Vertical edges carry no halo.
    """
    z = _validate_tensor3(z)
    if patch_px < 1:
        raise RangeError(f"patch_px {patch_px} must be >= 1")
    if halo < 0:
        raise RangeError(f"halo {halo} must be >= 0")
    c, h, w = z.shape
    if h % patch_px or w % patch_px:
        raise DimensionError(f"tensor {h}x{w} not divisible into {patch_px}px patches")
    rows, cols = h // patch_px, w // patch_px
    out = np.empty((rows * cols, c, patch_px, patch_px + 2 * halo), dtype=z.dtype)
    for r in range(rows):
        for q in range(cols):
            col_idx = np.mod(np.arange(q * patch_px - halo, (q + 1) * patch_px + halo), w)
            out[r * cols + q] = z[:, r * patch_px:(r + 1) * patch_px, :][:, :, col_idx]
    return PatchGrid(out, rows, cols, patch_px, halo)


def untile_patches(pg: PatchGrid) -> np.ndarray:
    """Reassemble a PatchGrid into the original tensor, dropping halos."""
    c = pg.patches.shape[1]
    h, w = pg.rows * pg.patch_px, pg.cols * pg.patch_px
    out = np.empty((c, h, w), dtype=pg.patches.dtype)
    for r in range(pg.rows):
        for q in range(pg.cols):
            core = pg.patches[r * pg.cols + q][:, :, pg.halo:pg.halo + pg.patch_px]
            out[:, r * pg.patch_px:(r + 1) * pg.patch_px, q * pg.patch_px:(q + 1) * pg.patch_px] = core
    return out


def flow_interpolate(x0, eps, t: float) -> np.ndarray:
    """Linear path (1-t)*x0 + t*eps between a sample and a noise tensor."""
    x0 = _validate_tensor3(x0, "x0")
    eps = _validate_tensor3(eps, "eps")
    if x0.shape != eps.shape:
        raise DimensionError(f"x0 shape {x0.shape} does not match eps shape {eps.shape}")
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"interpolation time {t} outside [0, 1]")
    return (1.0 - t) * x0 + t * eps


def normal_noise(shape, seed: int, dtype=np.float32) -> np.ndarray:
    """Deterministic standard-normal tensor from a portable generator.

    Uses the Philox4x64-10 counter-based generator keyed by seed;
    pairs of uniforms in (0, 1] are converted with the Box-Muller
    transform (cosine then sine), so the stream is reproducible from
    the seed alone on any platform.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    n = int(np.prod(shape))
    pairs = (n + 1) // 2
    u1 = 1.0 - gen.random(pairs)
    u2 = gen.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * math.pi * u2
    g = np.empty(pairs * 2, dtype=np.float64)
    g[0::2] = r * np.cos(ang)
    g[1::2] = r * np.sin(ang)
    return g[:n].reshape(shape).astype(dtype)


def perturb(z, sigma: float, seed: int = 0) -> np.ndarray:
    """Add seeded Gaussian noise: z + sigma * g with g ~ N(0, 1).

    The same (shape, seed) pair always produces the same noise field;
    see normal_noise for the generator contract.
    """
    z = _validate_tensor3(z)
    if sigma < 0.0 or not math.isfinite(sigma):
        raise RangeError(f"sigma {sigma} must be finite and >= 0")
    noise = normal_noise(z.shape, seed, dtype=np.float64)
    return (z.astype(np.float64) + sigma * noise).astype(z.dtype)
