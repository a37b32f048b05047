"""Batch command-line interface.

Subcommands cover the full pipeline: ``extract`` panoramas into
tangent views, ``stitch`` views back, ``grid`` assemble/split packed
rasters, ``tensor`` operations on latent files, ``metrics`` for the
evaluation suite, ``distortion`` tables, and ``roundtrip`` fidelity
reports.  Images move as PNG or as raw float tensor files (lossless);
the format is always chosen by an explicit ``--pixel-format`` flag,
never guessed from file names.

Exit codes: 0 success, 2 input error, 3 computation error.  Failures
print one ``error: <code>: <message>`` line to stderr.  Reports embed
the command configuration and SHA-256 hashes of their file inputs so a
result can be traced back to what produced it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DimensionError, IoError, PanogridError, RangeError
from .features import PrecomputedBackend, load_tensor, read_manifest, save_tensor
from .grid import (
    assemble,
    load_full_layout,
    make_grid_layout,
    save_full_layout,
    split,
)
from .metrics import (
    CubemapFeatures,
    MetricReport,
    discontinuity_score,
    fid,
    inception_score,
    omnifid,
    tangent_fid,
    tangent_is,
)
from .raster import ErpImage, TangentSet, extract_tangent, psnr, read_png, reproject_blend, write_png
from .sphere import coverage_counts, distortion, plane_layout_18
from .tensorops import (
    PatchGrid,
    circular_pad,
    crop_pad,
    flow_interpolate,
    perturb,
    rotate_lon,
    tile_patches,
    untile_patches,
)

PIXEL_FORMATS = ("png", "tpaf")


def _sha256(path) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    except OSError as exc:
        raise IoError(f"cannot hash input {path}: {exc}") from exc
    return h.hexdigest()


def _read_image(path, pixel_format: str) -> np.ndarray:
    """Read an image file as (H, W, C) float32 in [0, 1]."""
    if pixel_format == "png":
        return read_png(path)
    arr = load_tensor(path)
    if arr.ndim != 3:
        raise DimensionError(f"tensor image {path} must be rank-3 (C, H, W), got rank {arr.ndim}")
    return np.transpose(arr, (1, 2, 0))


def _write_image(path, arr, pixel_format: str) -> None:
    arr = arr.data if isinstance(arr, ErpImage) else np.asarray(arr)
    if pixel_format == "png":
        write_png(path, arr)
    else:
        save_tensor(path, np.transpose(arr, (2, 0, 1)).astype(np.float32))


def _plane_filename(i: int, pixel_format: str) -> str:
    return f"plane_{i:02d}.{pixel_format}"


def _emit_report(report_dict: dict, fmt: str, output: str) -> None:
    if fmt == "json":
        text = json.dumps(report_dict, indent=2) + "\n"
    else:
        report = MetricReport(
            metric=report_dict["metric"],
            aggregate=report_dict["aggregate"],
            breakdown=report_dict.get("breakdown"),
            config=report_dict.get("config", {}),
            n_real=report_dict.get("n_real", 0),
            n_gen=report_dict.get("n_gen", 0),
        )
        text = report.to_csv()
    if output == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot write report {output}: {exc}") from exc


def _specs_from_args(args):
    if getattr(args, "layout", None):
        specs, grid_layout = load_full_layout(args.layout)
        return specs, grid_layout
    specs = plane_layout_18(
        fov_deg=args.fov,
        resolution=args.tile_px,
        polar_lat_deg=args.polar_lat,
        equatorial_lat_deg=args.equatorial_lat,
    )
    return specs, None


def cmd_extract(args) -> int:
    img = ErpImage(_read_image(args.input, args.pixel_format))
    specs, grid_layout = _specs_from_args(args)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def render(i_spec):
        return extract_tangent(img, i_spec)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        views = list(pool.map(render, specs))
    for i, view in enumerate(views):
        _write_image(out_dir / _plane_filename(i, args.pixel_format), view, args.pixel_format)
    if grid_layout is None and len(specs) == 18:
        grid_layout = make_grid_layout("custom_polar_first", tile_px=specs[0].resolution)
    save_full_layout(out_dir / "layout.json", specs, grid_layout)
    print(f"wrote {len(specs)} planes and layout.json to {out_dir}")
    return 0


def _read_planes(input_dir, specs, pixel_format: str) -> list[np.ndarray]:
    planes = []
    for i in range(len(specs)):
        path = Path(input_dir) / _plane_filename(i, pixel_format)
        if not path.exists():
            raise IoError(f"missing plane file {path}")
        planes.append(_read_image(path, pixel_format))
    return planes


def cmd_stitch(args) -> int:
    layout_path = args.layout or str(Path(args.input_dir) / "layout.json")
    specs, _ = load_full_layout(layout_path)
    images = _read_planes(args.input_dir, specs, args.pixel_format)
    ts = TangentSet(specs, images)
    out = reproject_blend(ts, args.width, args.height, weighting=args.weighting, k=args.power)
    _write_image(args.output, out, args.pixel_format)
    print(f"stitched {len(specs)} planes into {args.output} ({args.width}x{args.height})")
    return 0


def cmd_grid(args) -> int:
    if args.action == "assemble":
        layout_path = args.layout or str(Path(args.input_dir) / "layout.json")
        specs, grid_layout = load_full_layout(layout_path)
        if args.ordering is not None or grid_layout is None:
            ordering = args.ordering or "custom_polar_first"
            grid_layout = make_grid_layout(ordering, tile_px=specs[0].resolution)
        images = _read_planes(args.input_dir, specs, args.pixel_format)
        ts = TangentSet(specs, images)
        raster = assemble(ts, grid_layout)
        _write_image(args.output, raster, args.pixel_format)
        if args.layout_out:
            save_full_layout(args.layout_out, specs, grid_layout)
        print(f"assembled {len(specs)} tiles into {args.output} "
              f"({raster.shape[0]}x{raster.shape[1]}, ordering {grid_layout.ordering})")
        return 0
    # split
    if not args.layout:
        raise IoError("grid split requires --layout with a grid section")
    specs, grid_layout = load_full_layout(args.layout)
    if grid_layout is None:
        raise IoError(f"layout {args.layout} has no grid section")
    raster = _read_image(args.input, args.pixel_format)
    ts = split(raster, grid_layout, specs)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, view in enumerate(ts.images):
        _write_image(out_dir / _plane_filename(i, args.pixel_format), view, args.pixel_format)
    save_full_layout(out_dir / "layout.json", specs, grid_layout)
    print(f"split {args.input} into {len(specs)} planes in {out_dir}")
    return 0


def _renormalize_logit_rows(mat: np.ndarray, what: str) -> np.ndarray:
    sums = mat.sum(axis=1)
    bad = np.abs(sums - 1.0) > 1e-4
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RangeError(f"{what} row {i} sums to {sums[i]:.8f}, outside renormalization tolerance")
    return mat / sums[:, None]


def _load_stacked(records, features_dir, views: int, jobs: int) -> np.ndarray:
    backend = PrecomputedBackend(features_dir)

    def one(rec):
        return backend.load(rec["id"])

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        arrays = list(pool.map(one, records))
    shape = arrays[0].shape
    for rec, arr in zip(records, arrays):
        if arr.ndim != 2 or arr.shape != shape:
            raise DimensionError(f"features for id {rec['id']!r} have shape {arr.shape}, expected {shape}")
    if shape[0] != views:
        raise DimensionError(f"feature files hold {shape[0]} views, expected {views}")
    return np.stack([a.astype(np.float64) for a in arrays])


def _tangent_sets_from_tensor(path, what: str) -> list[np.ndarray]:
    arr = load_tensor(path)
    if arr.ndim != 3:
        raise DimensionError(f"{what} {path} must be rank-3 (views, n, d), got rank {arr.ndim}")
    return [arr[i].astype(np.float64) for i in range(arr.shape[0])]


def _metric_config(args, keys: tuple[str, ...], inputs: dict) -> dict:
    config = {"metric": args.metric, "seed": args.seed, "jobs": args.jobs}
    for key in keys:
        config[key] = getattr(args, key)
    config["inputs"] = inputs
    return config


def cmd_metrics(args) -> int:
    metric = args.metric
    inputs: dict[str, str] = {}

    def note(label, path):
        if path:
            inputs[label] = _sha256(path)

    if metric == "tangentfid":
        if args.real_features and args.gen_features:
            note("real_features", args.real_features)
            note("gen_features", args.gen_features)
            real_sets = _tangent_sets_from_tensor(args.real_features, "--real-features")
            gen_sets = _tangent_sets_from_tensor(args.gen_features, "--gen-features")
            if len(real_sets) != args.count or len(gen_sets) != args.count:
                raise DimensionError(
                    f"tensors hold {len(real_sets)}/{len(gen_sets)} views, expected {args.count}"
                )
        else:
            if not (args.real and args.gen and args.real_features_dir and args.gen_features_dir):
                raise IoError("tangentfid needs --real-features/--gen-features tensors or "
                              "--real/--gen manifests with --real-features-dir/--gen-features-dir")
            note("real_manifest", args.real)
            note("gen_manifest", args.gen)
            real_records = read_manifest(args.real)
            gen_records = read_manifest(args.gen)
            real_stack = _load_stacked(real_records, args.real_features_dir, args.count, args.jobs)
            gen_stack = _load_stacked(gen_records, args.gen_features_dir, args.count, args.jobs)
            real_sets = [real_stack[:, i, :] for i in range(args.count)]
            gen_sets = [gen_stack[:, i, :] for i in range(args.count)]
        report = tangent_fid(real_sets, gen_sets, expected_count=args.count,
                             shrinkage=args.shrinkage,
                             config=_metric_config(args, ("count", "shrinkage"), inputs))
    elif metric == "tangentis":
        if args.logits:
            note("logits", args.logits)
            sets = _tangent_sets_from_tensor(args.logits, "--logits")
            if len(sets) != args.count:
                raise DimensionError(f"tensor holds {len(sets)} views, expected {args.count}")
        else:
            if not (args.gen and args.gen_features_dir):
                raise IoError("tangentis needs --logits or --gen with --gen-features-dir")
            note("gen_manifest", args.gen)
            records = read_manifest(args.gen)
            stack = _load_stacked(records, args.gen_features_dir, args.count, args.jobs)
            sets = [stack[:, i, :] for i in range(args.count)]
        sets = [_renormalize_logit_rows(s, f"logit view {i}") for i, s in enumerate(sets)]
        report = tangent_is(sets, expected_count=args.count, splits=args.splits,
                            config=_metric_config(args, ("count", "splits"), inputs))
    elif metric == "fid":
        if args.real_features and args.gen_features:
            note("real_features", args.real_features)
            note("gen_features", args.gen_features)
            real = load_tensor(args.real_features).astype(np.float64)
            gen = load_tensor(args.gen_features).astype(np.float64)
        else:
            if not (args.real and args.gen and args.real_features_dir and args.gen_features_dir):
                raise IoError("fid needs feature tensors or manifests with feature directories")
            note("real_manifest", args.real)
            note("gen_manifest", args.gen)
            real = PrecomputedBackend(args.real_features_dir).extract(read_manifest(args.real))
            gen = PrecomputedBackend(args.gen_features_dir).extract(read_manifest(args.gen))
        value = fid(real, gen, shrinkage=args.shrinkage)
        report = MetricReport("fid", value, None,
                              _metric_config(args, ("shrinkage",), inputs),
                              real.shape[0], gen.shape[0])
    elif metric == "is":
        if not args.logits:
            raise IoError("is needs --logits with an (n, k) tensor")
        note("logits", args.logits)
        mat = load_tensor(args.logits).astype(np.float64)
        if mat.ndim != 2:
            raise DimensionError(f"--logits must be rank-2 (n, k), got rank {mat.ndim}")
        mat = _renormalize_logit_rows(mat, "logit")
        mean, std = inception_score(mat, splits=args.splits)
        config = _metric_config(args, ("splits",), inputs)
        config["split_std"] = std
        report = MetricReport("is", mean, None, config, 0, mat.shape[0])
    elif metric == "omnifid":
        if args.real_features and args.gen_features:
            note("real_features", args.real_features)
            note("gen_features", args.gen_features)
            real = load_tensor(args.real_features).astype(np.float64)
            gen = load_tensor(args.gen_features).astype(np.float64)
        else:
            if not (args.real and args.gen and args.real_features_dir and args.gen_features_dir):
                raise IoError("omnifid needs feature tensors or manifests with feature directories")
            note("real_manifest", args.real)
            note("gen_manifest", args.gen)
            real = _load_stacked(read_manifest(args.real), args.real_features_dir, 6, args.jobs)
            gen = _load_stacked(read_manifest(args.gen), args.gen_features_dir, 6, args.jobs)
        if real.ndim != 3 or real.shape[1] != 6 or gen.ndim != 3 or gen.shape[1] != 6:
            raise DimensionError("omnifid features must be (n, 6, d) in cube-face order")
        # Face order: front, right, back, left, top, bottom.
        def faces(stack):
            return CubemapFeatures(top=stack[:, 4, :], bottom=stack[:, 5, :], sides=stack[:, 0:4, :])
        report = omnifid(faces(real), faces(gen), shrinkage=args.shrinkage,
                         config=_metric_config(args, ("shrinkage",), inputs))
    elif metric == "ds":
        if not args.input:
            raise IoError("ds needs --input with a panorama image")
        note("input", args.input)
        img = _read_image(args.input, args.pixel_format)
        value = discontinuity_score(img, reference=args.reference)
        report = MetricReport("ds", value, None,
                              _metric_config(args, ("reference",), inputs), 0, 1)
    else:  # pragma: no cover - argparse restricts choices
        raise RangeError(f"unknown metric {metric!r}")

    _emit_report(report.to_json_dict() if isinstance(report, MetricReport) else report,
                 args.format, args.output)
    return 0


def cmd_distortion(args) -> int:
    if args.representation == "cubemap":
        default_theta = math.degrees(math.atan(math.sqrt(2.0)))
    else:
        default_theta = args.fov / 2.0
    thetas = args.theta if args.theta else [default_theta]
    rows = []
    for theta_deg in thetas:
        d = distortion(math.radians(theta_deg))
        rows.append({
            "theta_deg": theta_deg,
            "length_radial": d.length_radial,
            "length_tangential": d.length_tangential,
            "angular_deg": d.angular_deg,
            "area": d.area,
        })
    if args.format == "json":
        doc = {"representation": args.representation, "fov_deg": args.fov, "rows": rows}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"# representation: {args.representation} (fov {args.fov:.1f} deg)",
                 f"{'theta_deg':>10} {'radial':>10} {'tangential':>11} {'angular_deg':>12} {'area':>10}"]
        for r in rows:
            lines.append(f"{r['theta_deg']:>10.4f} {r['length_radial']:>10.4f} "
                         f"{r['length_tangential']:>11.4f} {r['angular_deg']:>12.4f} {r['area']:>10.4f}")
        text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def cmd_roundtrip(args) -> int:
    input_hash = _sha256(args.input)
    img = ErpImage(_read_image(args.input, args.pixel_format))
    width = args.width or img.width
    height = args.height or img.height
    specs = plane_layout_18(fov_deg=args.fov, resolution=args.tile_px,
                            polar_lat_deg=args.polar_lat, equatorial_lat_deg=args.equatorial_lat)

    def render(spec):
        return extract_tangent(img, spec)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        views = list(pool.map(render, specs))
    ts = TangentSet(specs, views)
    out = reproject_blend(ts, width, height, weighting=args.weighting, k=args.power)
    counts = coverage_counts(specs, width, height)
    value = psnr(img, out) if (width, height) == (img.width, img.height) else None
    report = {
        "psnr_db": value,
        "coverage_min": int(counts.min()),
        "coverage_max": int(counts.max()),
        "uncovered": int(np.count_nonzero(counts == 0)),
        "width": width,
        "height": height,
        "config": {
            "fov": args.fov,
            "tile_px": args.tile_px,
            "polar_lat": args.polar_lat,
            "equatorial_lat": args.equatorial_lat,
            "weighting": args.weighting,
            "power": args.power,
            "seed": args.seed,
            "jobs": args.jobs,
            "inputs": {"input": input_hash},
        },
    }
    if args.output_image:
        _write_image(args.output_image, out, args.pixel_format)
    text = json.dumps(report, indent=2) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def cmd_tensor(args) -> int:
    op = args.op
    if op == "pad":
        save_tensor(args.output, circular_pad(load_tensor(args.input), args.p))
    elif op == "crop":
        save_tensor(args.output, crop_pad(load_tensor(args.input), args.p))
    elif op == "rotate":
        save_tensor(args.output, rotate_lon(load_tensor(args.input), args.k))
    elif op == "tile":
        if not args.meta:
            raise IoError("tensor tile needs --meta for the patch layout sidecar")
        pg = tile_patches(load_tensor(args.input), args.patch_px, args.halo)
        save_tensor(args.output, pg.patches)
        meta = {"rows": pg.rows, "cols": pg.cols, "patch_px": pg.patch_px, "halo": pg.halo}
        Path(args.meta).write_text(json.dumps(meta) + "\n", encoding="utf-8")
    elif op == "untile":
        if not args.meta:
            raise IoError("tensor untile needs --meta from the tile step")
        meta = json.loads(Path(args.meta).read_text(encoding="utf-8"))
        patches = load_tensor(args.input)
        if patches.ndim != 4:
            raise DimensionError(f"untile input must be rank-4 patches, got rank {patches.ndim}")
        pg = PatchGrid(patches, int(meta["rows"]), int(meta["cols"]),
                       int(meta["patch_px"]), int(meta["halo"]))
        save_tensor(args.output, untile_patches(pg))
    elif op == "flow":
        if not args.eps:
            raise IoError("tensor flow needs --eps with the noise tensor")
        save_tensor(args.output,
                    flow_interpolate(load_tensor(args.input), load_tensor(args.eps), args.t))
    elif op == "perturb":
        save_tensor(args.output, perturb(load_tensor(args.input), args.sigma, seed=args.seed))
    else:  # pragma: no cover - argparse restricts choices
        raise RangeError(f"unknown tensor op {op!r}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="seed for stochastic operations")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker threads; results are identical for any value")


def _add_layout_args(parser: argparse.ArgumentParser, tile_default: int) -> None:
    parser.add_argument("--fov", type=float, default=80.0, help="plane field of view, degrees")
    parser.add_argument("--tile-px", type=int, default=tile_default, help="plane resolution, pixels")
    parser.add_argument("--polar-lat", type=float, default=67.5, help="polar row latitude, degrees")
    parser.add_argument("--equatorial-lat", type=float, default=22.5,
                        help="equatorial row latitude, degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panogrid",
                                     description="Spherical panorama decomposition and evaluation")
    parser.add_argument("--version", action="version", version=f"panogrid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="decompose a panorama into tangent views")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--pixel-format", choices=PIXEL_FORMATS, default="png")
    p.add_argument("--layout", help="use planes from an existing layout JSON file")
    _add_layout_args(p, 192)
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("stitch", help="blend tangent views back into a panorama")
    p.add_argument("--input-dir", required=True)
    p.add_argument("--layout", help="layout JSON (default: <input-dir>/layout.json)")
    p.add_argument("--output", required=True)
    p.add_argument("--pixel-format", choices=PIXEL_FORMATS, default="png")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--weighting", choices=("center_cosine", "inverse_area_distortion", "uniform"),
                   default="center_cosine")
    p.add_argument("--power", type=float, default=2.0, help="exponent k for center_cosine weights")
    _add_common(p)
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("grid", help="pack tangent views into a grid raster or back")
    p.add_argument("action", choices=("assemble", "split"))
    p.add_argument("--input-dir", help="assemble: directory of plane files")
    p.add_argument("--input", help="split: grid raster file")
    p.add_argument("--output", help="assemble: output raster file")
    p.add_argument("--output-dir", help="split: output directory")
    p.add_argument("--layout", help="layout JSON with plane list (and grid section for split)")
    p.add_argument("--layout-out", help="assemble: write the layout including the grid section")
    p.add_argument("--ordering", choices=("custom_polar_first", "row_wise", "column_wise"))
    p.add_argument("--pixel-format", choices=PIXEL_FORMATS, default="png")
    _add_common(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("metrics", help="evaluation metrics with JSON/CSV reports")
    p.add_argument("--metric", required=True,
                   choices=("tangentfid", "tangentis", "fid", "is", "omnifid", "ds"))
    p.add_argument("--real", help="manifest of reference images")
    p.add_argument("--gen", help="manifest of generated images")
    p.add_argument("--real-features-dir", help="precomputed features for the real manifest")
    p.add_argument("--gen-features-dir", help="precomputed features for the generated manifest")
    p.add_argument("--real-features", help="tensor file with stacked real features")
    p.add_argument("--gen-features", help="tensor file with stacked generated features")
    p.add_argument("--logits", help="tensor file with class probabilities")
    p.add_argument("--input", help="ds: panorama image to score")
    p.add_argument("--pixel-format", choices=PIXEL_FORMATS, default="png")
    p.add_argument("--reference", choices=("adjacent", "global"), default="adjacent",
                   help="ds: normalization reference")
    p.add_argument("--count", type=int, default=18, help="expected tangent view count")
    p.add_argument("--splits", type=int, default=1, help="inception score splits")
    p.add_argument("--shrinkage", type=float, default=0.0,
                   help="covariance ridge lambda*I for small-sample FID variants")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default="-", help="report path, - for stdout")
    _add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("distortion", help="projection distortion table")
    p.add_argument("--theta", type=float, action="append",
                   help="angular radius in degrees (repeatable; default from representation)")
    p.add_argument("--representation", choices=("tangent", "cubemap"), default="tangent")
    p.add_argument("--fov", type=float, default=80.0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default="-")
    _add_common(p)
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("roundtrip", help="extract + stitch fidelity report")
    p.add_argument("--input", required=True)
    p.add_argument("--pixel-format", choices=PIXEL_FORMATS, default="png")
    p.add_argument("--width", type=int, help="output width (default: input width)")
    p.add_argument("--height", type=int, help="output height (default: input height)")
    p.add_argument("--weighting", choices=("center_cosine", "inverse_area_distortion", "uniform"),
                   default="center_cosine")
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--output", default="-", help="report path, - for stdout")
    p.add_argument("--output-image", help="optionally write the reconstructed panorama")
    _add_layout_args(p, 384)
    _add_common(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("tensor", help="operations on rank-3 tensor files")
    p.add_argument("op", choices=("pad", "crop", "rotate", "tile", "untile", "flow", "perturb"))
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--p", type=int, default=0, help="pad/crop columns per side")
    p.add_argument("--k", type=int, default=0, help="rotate columns")
    p.add_argument("--patch-px", type=int, default=0, help="tile: patch side length")
    p.add_argument("--halo", type=int, default=0, help="tile: circular halo columns per side")
    p.add_argument("--meta", help="tile/untile: patch layout JSON sidecar")
    p.add_argument("--eps", help="flow: noise tensor file")
    p.add_argument("--t", type=float, default=0.0, help="flow: interpolation time in [0, 1]")
    p.add_argument("--sigma", type=float, default=0.0, help="perturb: noise scale")
    _add_common(p)
    p.set_defaults(func=cmd_tensor)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PanogridError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"error: key: no precomputed features for id {exc.args[0]!r}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected failure path
        print(f"error: internal: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
