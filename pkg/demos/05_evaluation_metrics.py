"""
Evaluating panorama generators
==============================

Walks through the evaluation stack: Gaussian feature statistics and
the Frechet distance, per-tangent aggregation with confidence bounds,
the cube-face variant, and the seam discontinuity score.
"""

import numpy as np

import panogrid as pg

rng = np.random.default_rng(5)

# ---------------------------------------------------------------------------
# Frechet distance between feature sets
# ---------------------------------------------------------------------------

real = rng.normal(0.0, 1.0, (256, 8))
fake_close = real + rng.normal(0.0, 0.05, real.shape)
fake_far = rng.normal(0.8, 1.5, (256, 8))

print(f"fid(real, real)       = {pg.fid(real, real):.4f}")
print(f"fid(real, fake_close) = {pg.fid(real, fake_close):.4f}")
print(f"fid(real, fake_far)   = {pg.fid(real, fake_far):.4f}")

# with fewer samples than feature dimensions the covariance is rank
# deficient; a small ridge keeps the distance finite and comparable
tiny = rng.normal(0.0, 1.0, (6, 8))
tiny2 = rng.normal(0.0, 1.0, (6, 8))
print(f"ridged small-sample fid = {pg.fid(tiny, tiny2, shrinkage=0.1):.4f}")

# ---------------------------------------------------------------------------
# Per-tangent FID: one distance per view, aggregated conservatively
# ---------------------------------------------------------------------------

def view_features(base_seed: int, sigma: float) -> list[np.ndarray]:
    out = []
    for v in range(18):
        r = np.random.default_rng(base_seed + v)
        out.append(r.normal(0.0, 1.0, (96, 6)) + sigma * r.normal(size=(96, 6)))
    return out


real_sets = view_features(100, 0.0)
for sigma in (0.1, 0.3, 0.6):
    gen_sets = view_features(100, sigma)
    report = pg.tangent_fid(real_sets, gen_sets)
    spread = max(report.breakdown) - min(report.breakdown)
    print(f"sigma={sigma}: aggregate {report.aggregate:.4f}, "
          f"breakdown spread {spread:.4f}")

# the aggregate is the 95% upper confidence bound of the 18 per-view
# distances, not their mean: a generator must be good everywhere
report = pg.tangent_fid(real_sets, view_features(100, 0.3))
upper = pg.confidence_bound(report.breakdown, "upper")
assert report.aggregate == upper

# ---------------------------------------------------------------------------
# Per-tangent inception score from class probabilities
# ---------------------------------------------------------------------------

n, k = 60, 10
uniform = [np.full((n, k), 1.0 / k) for _ in range(18)]
confident = [np.eye(k)[rng.integers(0, k, n)] * 0.91 + 0.009 for _ in range(18)]

for name, sets in (("uniform", uniform), ("confident+diverse", confident)):
    rep = pg.tangent_is(sets)
    print(f"tangent IS ({name}): {rep.aggregate:.4f}")

# ---------------------------------------------------------------------------
# Cube-face FID: poles are scored separately from the sides
# ---------------------------------------------------------------------------

def cube_features(seed: int, pole_shift: float) -> pg.CubemapFeatures:
    r = np.random.default_rng(seed)
    return pg.CubemapFeatures(
        top=r.normal(pole_shift, 1.0, (128, 6)),
        bottom=r.normal(-pole_shift, 1.0, (128, 6)),
        sides=r.normal(0.0, 1.0, (128, 4, 6)),
    )


real_cube = cube_features(7, 0.0)
gen_cube = cube_features(8, 0.5)
rep = pg.omnifid(real_cube, gen_cube)
print(f"omniFID: {rep.aggregate:.4f}  (top {rep.breakdown[0]:.3f}, "
      f"bottom {rep.breakdown[1]:.3f}, sides {rep.breakdown[2]:.3f})")

# ---------------------------------------------------------------------------
# Discontinuity score: does the panorama wrap cleanly at the seam?
# ---------------------------------------------------------------------------

h, w = 64, 128
u = (np.arange(w) + 0.5) / w * 2 * np.pi
smooth = np.repeat((0.5 + 0.4 * np.sin(u))[None, :, None], h, axis=0)
print(f"DS smooth panorama:  {pg.discontinuity_score(pg.ErpImage(smooth)):.4f}")

broken = smooth.copy()
broken[:, : w // 2] += 0.3
broken = np.clip(broken, 0.0, 1.0)
print(f"DS broken seam:      {pg.discontinuity_score(pg.ErpImage(broken)):.4f}")
