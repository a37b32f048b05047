"""Acceptance checks: one test per shipped guarantee, pinned tolerances.

Each test wraps its assertions in ``criterion(name)``, which prints and
records a single ``ACCEPTANCE <name>: PASS/FAIL`` line (echoed in the
terminal summary).  Tolerances and time limits here are contractual;
they must not be loosened to make a failing check pass.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import panogrid as pg
from panogrid.cli import main

import conftest
from conftest import synth_erp


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        conftest.ACCEPTANCE_RESULTS.append((name, "FAIL"))
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    conftest.ACCEPTANCE_RESULTS.append((name, "PASS"))
    print(f"ACCEPTANCE {name}: PASS")


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


# reference distortion values: (theta_deg, radial, tangential, angular_deg, area)
TANGENT_ROW = (40.0, 1.70, 1.31, 15.24, 2.22)
CUBEMAP_ROW = (54.7356, 3.00, 1.73, 31.08, 5.20)


def check_row(row, expected, label):
    _, radial, tangential, angular, area = expected
    for key, want in (("length_radial", radial), ("length_tangential", tangential),
                      ("angular_deg", angular), ("area", area)):
        got = row[key]
        assert abs(got - want) <= 0.01, (
            f"{label} {key} at theta={expected[0]} deg: computed {got:.6f}, "
            f"reference {want}, |diff|={abs(got - want):.4f} > 0.01"
        )


class TestDistortionTable:
    def test_reference_table_reproduction(self, capsys):
        with criterion("distortion-table"):
            t0 = time.perf_counter()
            tangent = run_json(capsys, "distortion", "--theta", "40", "--format", "json")
            cube = run_json(capsys, "distortion", "--representation", "cubemap",
                            "--theta", "54.7356", "--format", "json")
            check_row(tangent["rows"][0], TANGENT_ROW, "tangent")
            check_row(cube["rows"][0], CUBEMAP_ROW, "cubemap")
            assert time.perf_counter() - t0 < 1.0

    def test_reproducible_cells_diagnostic(self, capsys):
        # all reference cells except the tangent angular entry agree with
        # the closed forms; the full-criterion test above documents the
        # one that does not
        tangent = run_json(capsys, "distortion", "--theta", "40", "--format", "json")
        cube = run_json(capsys, "distortion", "--representation", "cubemap",
                        "--theta", "54.7356", "--format", "json")
        row = tangent["rows"][0]
        assert row["length_radial"] == pytest.approx(1.70, abs=0.01)
        assert row["length_tangential"] == pytest.approx(1.31, abs=0.01)
        assert row["area"] == pytest.approx(2.22, abs=0.01)
        assert row["angular_deg"] == pytest.approx(15.2252, abs=1e-4)
        check_row(cube["rows"][0], CUBEMAP_ROW, "cubemap")


class TestGnomonicRoundtrip:
    def test_hundred_thousand_points(self):
        with criterion("gnomonic-roundtrip"):
            t0 = time.perf_counter()
            rng = np.random.default_rng(123)
            n = 10 ** 5
            lat = np.arcsin(rng.uniform(-1.0, 1.0, size=4 * n))
            lon = rng.uniform(-math.pi, math.pi, size=4 * n)
            lon0, lat0 = -1.2, 0.31
            x, y, cos_c = pg.gnomonic_forward_arrays(lon0, lat0, lon, lat)
            keep = cos_c > 0
            assert keep.sum() >= n
            x, y = x[keep][:n], y[keep][:n]
            lat_in, lon_in = lat[keep][:n], lon[keep][:n]
            lon_out, lat_out = pg.gnomonic_inverse_arrays(lon0, lat0, x, y)
            dlat = np.abs(lat_out - lat_in)
            dlon = np.abs(np.remainder(lon_out - lon_in + math.pi, 2 * math.pi) - math.pi)
            assert max(dlat.max(), dlon.max()) < 1e-9
            assert time.perf_counter() - t0 < 5.0


class TestErpRoundtrip:
    def test_full_resolution_reprojection(self):
        with criterion("erp-roundtrip"):
            t0 = time.perf_counter()
            img = synth_erp(512, seed=21)
            specs = pg.plane_layout_18(resolution=384)
            views = pg.extract_all(img, specs)
            out = pg.reproject_blend(views, 1024, 512)
            assert pg.psnr(img, out) >= 40.0
            counts = pg.coverage_counts(specs, 1024, 512)
            assert int(np.count_nonzero(counts == 0)) == 0
            assert time.perf_counter() - t0 < 30.0


class TestGridBijection:
    def test_all_orderings_bit_identical(self):
        with criterion("grid-bijection"):
            t0 = time.perf_counter()
            rng = np.random.default_rng(31)
            specs = pg.plane_layout_18(resolution=48)
            images = [rng.random((48, 48, 3), dtype=np.float32) for _ in range(18)]
            ts = pg.TangentSet(specs, images)
            for ordering in ("custom_polar_first", "row_wise", "column_wise"):
                layout = pg.make_grid_layout(ordering, tile_px=48)
                raster = pg.assemble(ts, layout)
                back = pg.split(raster, layout, specs)
                for a, b in zip(ts.images, back.images):
                    assert np.array_equal(a, b)
                raster2 = rng.random((144, 288, 3), dtype=np.float32)
                assert np.array_equal(
                    pg.assemble(pg.split(raster2, layout, specs), layout), raster2)
            full = pg.assemble(
                pg.TangentSet(pg.plane_layout_18(resolution=192),
                              [np.zeros((192, 192, 1), np.float32)] * 18),
                pg.make_grid_layout("custom_polar_first", tile_px=192))
            assert full.shape == (576, 1152, 1)
            assert time.perf_counter() - t0 < 5.0


class TestCircularPadIndex:
    def test_exhaustive_small_widths(self):
        with criterion("circular-pad-index"):
            t0 = time.perf_counter()
            rng = np.random.default_rng(41)
            for w in range(1, 17):
                for p in range(0, w + 1):
                    z = rng.normal(size=(2, 3, w)).astype(np.float32)
                    out = pg.circular_pad(z, p)
                    assert out.shape == (2, 3, w + 2 * p)
                    for j in range(w + 2 * p):
                        np.testing.assert_array_equal(out[:, :, j], z[:, :, (j - p) % w])
            assert time.perf_counter() - t0 < 5.0


def frechet_eig_oracle(a: pg.GaussianStats, b: pg.GaussianStats) -> float:
    """Brute force: trace of sqrtm(cov_a cov_b) as the sum of root eigenvalues."""
    diff = a.mean - b.mean
    lam = np.linalg.eigvals(a.cov @ b.cov)
    tr_sqrt = float(np.sqrt(np.clip(lam.real, 0.0, None)).sum())
    return float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * tr_sqrt)


class TestFrechetOracle:
    def test_two_hundred_random_pairs(self):
        with criterion("frechet-oracle"):
            t0 = time.perf_counter()
            rng = np.random.default_rng(51)
            for i in range(200):
                d = 1 + i % 8
                a_cov = rng.normal(size=(d, d))
                b_cov = rng.normal(size=(d, d))
                a = pg.GaussianStats(rng.normal(size=d),
                                     a_cov @ a_cov.T + 0.1 * np.eye(d), 100)
                b = pg.GaussianStats(rng.normal(size=d) * 2.0,
                                     b_cov @ b_cov.T + 0.1 * np.eye(d), 100)
                got = pg.frechet_distance(a, b)
                want = frechet_eig_oracle(a, b)
                assert got == pytest.approx(want, rel=1e-6, abs=1e-9)
            g = pg.GaussianStats(np.arange(4, dtype=np.float64), np.eye(4) * 2.0, 50)
            assert pg.frechet_distance(g, g) == 0.0
            one_a = pg.GaussianStats(np.array([0.0]), np.array([[4.0]]), 50)
            one_b = pg.GaussianStats(np.array([3.0]), np.array([[1.0]]), 50)
            assert pg.frechet_distance(one_a, one_b) == pytest.approx(
                3.0 ** 2 + (2.0 - 1.0) ** 2, rel=1e-12)
            assert time.perf_counter() - t0 < 10.0


class TestInceptionAnalytic:
    def test_uniform_and_one_hot(self):
        with criterion("is-analytic"):
            mean, _ = pg.inception_score(np.full((32, 10), 0.1))
            assert mean == pytest.approx(1.0, abs=1e-9)
            for n in (2, 7, 50):
                mean, _ = pg.inception_score(np.eye(n))
                assert mean == pytest.approx(n, abs=1e-6)


class TestAggregationBounds:
    def test_confidence_bounds_and_degenerate_cases(self):
        with criterion("aggregation-bounds"):
            # synthetic breakdown with sample mean 5 and sample std 1
            delta = math.sqrt(17.0 / 18.0)
            breakdown = [5.0 + delta] * 9 + [5.0 - delta] * 9
            assert pg.confidence_bound(breakdown, "lower") == pytest.approx(4.5380, abs=1e-4)

            rng = np.random.default_rng(61)
            real = rng.normal(size=(30, 3))
            gen = rng.normal(size=(30, 3)) + 1.0
            v = pg.fid(real, gen)
            report = pg.tangent_fid([real] * 18, [gen] * 18)
            assert report.breakdown == [v] * 18
            assert report.aggregate == v

            sets = [rng.normal(size=(30, 4)) for _ in range(18)]
            zero = pg.tangent_fid(sets, [s.copy() for s in sets])
            assert zero.aggregate == 0.0


class TestSeamScoreOrdering:
    def test_step_injection_and_smooth_bound(self):
        with criterion("seam-score-ordering"):
            for seed in (7, 11, 13):
                img = synth_erp(64, seed=seed)
                base = pg.discontinuity_score(img)
                # circularly smooth input: score stays near the smooth
                # baseline of 1 under the adjacent-column reference
                assert base <= 1.1
                stepped = img.data.copy()
                half = img.width // 2
                stepped[:, half:] = np.clip(stepped[:, half:] + 0.4, 0.0, 1.0)
                assert pg.discontinuity_score(stepped) > base


def plane_features(view: np.ndarray) -> np.ndarray:
    """4x4 block-mean grayscale signature of a square tangent view."""
    gray = view.mean(axis=2)
    r = gray.shape[0] // 4
    return gray.reshape(4, r, 4, r).mean(axis=(1, 3)).reshape(-1).astype(np.float32)


class TestEndToEndSynthetic:
    def test_perturbation_monotonicity(self, capsys, tmp_path):
        with criterion("end-to-end-synthetic"):
            t0 = time.perf_counter()
            n_images = 64
            sigmas = (0.02, 0.05, 0.1)
            specs = pg.plane_layout_18(resolution=64)
            records = [{"id": f"im{i:03d}", "image": f"im{i:03d}.png"}
                       for i in range(n_images)]

            dirs = {"real": tmp_path / "real"}
            for s in sigmas:
                dirs[s] = tmp_path / f"gen_{s}"
            for d in dirs.values():
                d.mkdir()

            for i in range(n_images):
                base = synth_erp(128, seed=100 + i)
                variants = {"real": base.data}
                for s in sigmas:
                    noisy = pg.perturb(base.data, s, seed=1000 * i + int(s * 1000))
                    variants[s] = np.clip(noisy, 0.0, 1.0)
                for key, data in variants.items():
                    views = pg.extract_all(pg.ErpImage(data), specs)
                    feats = np.stack([plane_features(v) for v in views.images])
                    pg.save_tensor(dirs[key] / f"im{i:03d}.tpaf", feats)

            def sets_for(key):
                stack = pg.PrecomputedBackend(dirs[key]).stacks(records, expected_views=18)
                return [stack[:, i, :] for i in range(18)]

            real_sets = sets_for("real")
            self_report = pg.tangent_fid(real_sets, sets_for("real"))
            assert self_report.aggregate == 0.0

            aggregates = []
            for s in sigmas:
                report = pg.tangent_fid(real_sets, sets_for(s))
                assert report.aggregate > 0.0
                aggregates.append(report.aggregate)
            assert aggregates[0] < aggregates[1] < aggregates[2]

            # the same comparison through the batch interface
            manifest = tmp_path / "manifest.jsonl"
            pg.write_manifest(manifest, records)
            doc = run_json(capsys, "metrics", "--metric", "tangentfid",
                           "--real", str(manifest), "--gen", str(manifest),
                           "--real-features-dir", str(dirs["real"]),
                           "--gen-features-dir", str(dirs[sigmas[1]]))
            assert doc["aggregate"] == pytest.approx(aggregates[1], rel=1e-9)
            assert time.perf_counter() - t0 < 120.0
