/**
 * Bound operations.
 *
 * Each binding is a pure passthrough: arguments are written as tensor
 * files, one core command runs, and the result is read back.  No
 * algorithm is reimplemented here, so every value equals the core's
 * output bit for bit.
 */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { invoke } from "./core.js";
import { CoreError } from "./errors.js";
import { BoundArray, readTensor, writeTensor } from "./tensorfile.js";

export { CoreError, isCoreError } from "./errors.js";
export { cliCommand, invoke, version } from "./core.js";
export {
    BoundArray,
    boundArray,
    decodeTensor,
    encodeTensor,
    readTensor,
    writeTensor,
} from "./tensorfile.js";

/** One tangent plane of a layout document. */
export interface PlaneDoc {
    lon_deg: number;
    lat_deg: number;
    fov_deg: number;
    resolution: number;
}

/** Layout JSON document as written and read by the core. */
export interface LayoutDoc {
    planes: PlaneDoc[];
    grid?: {
        rows: number;
        cols: number;
        tile_px: number;
        ordering: string;
        mapping: number[];
    };
}

/** Patch geometry sidecar produced by the tile operation. */
export interface PatchMeta {
    rows: number;
    cols: number;
    patch_px: number;
    halo: number;
}

/** Metric report document emitted by the core. */
export interface MetricReportDoc {
    metric: string;
    aggregate: number;
    breakdown: number[] | null;
    config: Record<string, unknown>;
    n_real: number;
    n_gen: number;
}

export interface ExtractOptions {
    /** Plane resolution in pixels (default 192). */
    tilePx?: number;
    /** Field of view in degrees (default 80). */
    fov?: number;
}

export interface StitchOptions {
    weighting?: "center_cosine" | "inverse_area_distortion" | "uniform";
    /** Exponent for center_cosine weights (default 2). */
    power?: number;
}

export interface TangentFidOptions {
    /** Expected view count (default 18). */
    count?: number;
    /** Covariance ridge lambda for small-sample runs (default 0). */
    shrinkage?: number;
}

export interface TangentIsOptions {
    count?: number;
    /** Inception-score splits (default 1). */
    splits?: number;
}

function withTempDir<T>(fn: (dir: string) => T): T {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "panogrid-"));
    try {
        return fn(dir);
    } finally {
        fs.rmSync(dir, { recursive: true, force: true });
    }
}

function tensorOp(op: string, z: BoundArray, extra: string[]): BoundArray {
    return withTempDir((dir) => {
        const input = path.join(dir, "in.tpaf");
        const output = path.join(dir, "out.tpaf");
        writeTensor(input, z);
        invoke(["tensor", op, "--input", input, "--output", output, ...extra]);
        return readTensor(output);
    });
}

/** Circular width padding: output column j holds input column (j-p) mod W. */
export function bind_circular_pad(z: BoundArray, p: number): BoundArray {
    return tensorOp("pad", z, ["--p", String(p)]);
}

/** Cyclic width rotation by k columns (positive shifts content east). */
export function bind_rotate_lon(z: BoundArray, k: number): BoundArray {
    return tensorOp("rotate", z, ["--k", String(k)]);
}

/** Cut a (C, H, W) tensor into square patches with circular halos. */
export function bind_tile(z: BoundArray, patchPx: number, halo = 0):
        { patches: BoundArray; meta: PatchMeta } {
    return withTempDir((dir) => {
        const input = path.join(dir, "in.tpaf");
        const output = path.join(dir, "patches.tpaf");
        const metaPath = path.join(dir, "meta.json");
        writeTensor(input, z);
        invoke(["tensor", "tile", "--input", input, "--output", output,
            "--patch-px", String(patchPx), "--halo", String(halo),
            "--meta", metaPath]);
        const meta = JSON.parse(fs.readFileSync(metaPath, "utf8")) as PatchMeta;
        return { patches: readTensor(output), meta };
    });
}

/**
 * Slice a (C, H, W) panorama into tangent views.  Returns the views in
 * plane order plus the layout document describing them.
 */
export function bind_extract(image: BoundArray, opts: ExtractOptions = {}):
        { views: BoundArray[]; layout: LayoutDoc } {
    if (image.shape.length !== 3) {
        throw new CoreError("dimension",
            `panorama tensor must be rank-3 (C, H, W), got rank ${image.shape.length}`);
    }
    return withTempDir((dir) => {
        const input = path.join(dir, "pano.tpaf");
        const outDir = path.join(dir, "views");
        writeTensor(input, image);
        const args = ["extract", "--input", input, "--output-dir", outDir,
            "--pixel-format", "tpaf"];
        if (opts.tilePx !== undefined) args.push("--tile-px", String(opts.tilePx));
        if (opts.fov !== undefined) args.push("--fov", String(opts.fov));
        invoke(args);
        const layout = JSON.parse(
            fs.readFileSync(path.join(outDir, "layout.json"), "utf8")) as LayoutDoc;
        const views = layout.planes.map((_, i) =>
            readTensor(path.join(outDir, `plane_${String(i).padStart(2, "0")}.tpaf`)));
        return { views, layout };
    });
}

/**
 * Blend tangent views back into a (C, height, width) panorama.  The
 * layout document must describe the views, index-aligned.
 */
export function bind_stitch(views: BoundArray[], layout: LayoutDoc,
        width: number, height: number, opts: StitchOptions = {}): BoundArray {
    if (views.length !== layout.planes.length) {
        throw new CoreError("count",
            `${layout.planes.length} layout planes but ${views.length} views`);
    }
    return withTempDir((dir) => {
        const inDir = path.join(dir, "views");
        fs.mkdirSync(inDir);
        views.forEach((v, i) =>
            writeTensor(path.join(inDir, `plane_${String(i).padStart(2, "0")}.tpaf`), v));
        fs.writeFileSync(path.join(inDir, "layout.json"),
            JSON.stringify(layout, null, 2) + "\n");
        const output = path.join(dir, "out.tpaf");
        const args = ["stitch", "--input-dir", inDir, "--output", output,
            "--pixel-format", "tpaf", "--width", String(width), "--height", String(height)];
        if (opts.weighting !== undefined) args.push("--weighting", opts.weighting);
        if (opts.power !== undefined) args.push("--power", String(opts.power));
        invoke(args);
        return readTensor(output);
    });
}

/**
 * Per-tangent Frechet distance.  real and gen are (views, n, d)
 * feature stacks; the report aggregate is the 95% upper confidence
 * bound over views.
 */
export function bind_tangent_fid(real: BoundArray, gen: BoundArray,
        opts: TangentFidOptions = {}): MetricReportDoc {
    return withTempDir((dir) => {
        const realPath = path.join(dir, "real.tpaf");
        const genPath = path.join(dir, "gen.tpaf");
        writeTensor(realPath, real);
        writeTensor(genPath, gen);
        const args = ["metrics", "--metric", "tangentfid",
            "--real-features", realPath, "--gen-features", genPath, "--output", "-"];
        if (opts.count !== undefined) args.push("--count", String(opts.count));
        if (opts.shrinkage !== undefined) args.push("--shrinkage", String(opts.shrinkage));
        return JSON.parse(invoke(args)) as MetricReportDoc;
    });
}

/**
 * Per-tangent inception score.  logits is a (views, n, k) stack of
 * class probabilities; the report aggregate is the 95% lower
 * confidence bound over views.
 */
export function bind_tangent_is(logits: BoundArray,
        opts: TangentIsOptions = {}): MetricReportDoc {
    return withTempDir((dir) => {
        const logitsPath = path.join(dir, "logits.tpaf");
        writeTensor(logitsPath, logits);
        const args = ["metrics", "--metric", "tangentis",
            "--logits", logitsPath, "--output", "-"];
        if (opts.count !== undefined) args.push("--count", String(opts.count));
        if (opts.splits !== undefined) args.push("--splits", String(opts.splits));
        return JSON.parse(invoke(args)) as MetricReportDoc;
    });
}
