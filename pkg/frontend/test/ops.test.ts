/**
 * Differential suite: every bound operation must equal the core's own
 * output bit for bit.  Reference values come either from the index
 * formulas the core documents (pad, rotate, tile) or from a second,
 * direct invocation of the core on files this test writes itself
 * (extract, stitch, tangent metrics).
 */

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, test } from "vitest";

import { invoke } from "../src/core.js";
import {
    BoundArray,
    LayoutDoc,
    MetricReportDoc,
    bind_circular_pad,
    bind_extract,
    bind_rotate_lon,
    bind_stitch,
    bind_tangent_fid,
    bind_tangent_is,
    bind_tile,
    boundArray,
    encodeTensor,
    writeTensor,
} from "../src/index.js";
import { Rng, mulberry32, randFloats, randInt } from "./rand.js";

const CASES = 100;

function at3(arr: BoundArray, c: number, h: number, j: number): number {
    const [, H, W] = arr.shape;
    return arr.data[(c * H + h) * W + j];
}

function mod(a: number, m: number): number {
    return ((a % m) + m) % m;
}

function randomTensor3(rng: Rng, maxC: number, maxH: number, maxW: number): BoundArray {
    const c = randInt(rng, 1, maxC);
    const h = randInt(rng, 1, maxH);
    const w = randInt(rng, 1, maxW);
    return boundArray([c, h, w], randFloats(rng, c * h * w, -5, 5));
}

describe("fixture examples", () => {
    test("circular pad of [1,2,3,4] with p=1", () => {
        const out = bind_circular_pad(boundArray([1, 1, 4], [1, 2, 3, 4]), 1);
        expect(out.shape).toEqual([1, 1, 6]);
        expect(Array.from(out.data)).toEqual([4, 1, 2, 3, 4, 1]);
    });

    test("18 uniform logit views score 1.0", () => {
        const logits = boundArray([18, 12, 10], new Float32Array(18 * 12 * 10).fill(0.1));
        const report = bind_tangent_is(logits);
        expect(report.metric).toBe("tangent_is");
        expect(report.breakdown).toHaveLength(18);
        expect(report.aggregate).toBeCloseTo(1.0, 9);
    });
});

describe("index-formula differentials", () => {
    test(`circular pad: ${CASES} random tensors`, () => {
        const rng = mulberry32(1001);
        for (let iter = 0; iter < CASES; iter++) {
            const z = randomTensor3(rng, 3, 3, 8);
            const [c, h, w] = z.shape;
            const p = randInt(rng, 0, w);
            const out = bind_circular_pad(z, p);
            expect(out.shape).toEqual([c, h, w + 2 * p]);
            for (let ci = 0; ci < c; ci++)
                for (let hi = 0; hi < h; hi++)
                    for (let j = 0; j < w + 2 * p; j++) {
                        expect(at3(out, ci, hi, j)).toBe(at3(z, ci, hi, mod(j - p, w)));
                    }
        }
    });

    test(`rotate: ${CASES} random tensors`, () => {
        const rng = mulberry32(1002);
        for (let iter = 0; iter < CASES; iter++) {
            const z = randomTensor3(rng, 3, 3, 8);
            const [c, h, w] = z.shape;
            const k = randInt(rng, -2 * w, 2 * w);
            const out = bind_rotate_lon(z, k);
            expect(out.shape).toEqual(z.shape);
            for (let ci = 0; ci < c; ci++)
                for (let hi = 0; hi < h; hi++)
                    for (let j = 0; j < w; j++) {
                        expect(at3(out, ci, hi, j)).toBe(at3(z, ci, hi, mod(j - k, w)));
                    }
        }
    });

    test(`tile: ${CASES} random tensors`, () => {
        const rng = mulberry32(1003);
        for (let iter = 0; iter < CASES; iter++) {
            const c = randInt(rng, 1, 2);
            const patch = randInt(rng, 1, 3);
            const rows = randInt(rng, 1, 2);
            const cols = randInt(rng, 1, 3);
            const h = rows * patch;
            const w = cols * patch;
            const halo = randInt(rng, 0, Math.min(w, 2));
            const z = boundArray([c, h, w], randFloats(rng, c * h * w, -5, 5));
            const { patches, meta } = bind_tile(z, patch, halo);
            expect(meta).toEqual({ rows, cols, patch_px: patch, halo });
            expect(patches.shape).toEqual([rows * cols, c, patch, patch + 2 * halo]);
            const pw = patch + 2 * halo;
            for (let r = 0; r < rows; r++)
                for (let q = 0; q < cols; q++)
                    for (let ci = 0; ci < c; ci++)
                        for (let i = 0; i < patch; i++)
                            for (let t = 0; t < pw; t++) {
                                const got = patches.data[
                                    (((r * cols + q) * c + ci) * patch + i) * pw + t];
                                const want = at3(z, ci, r * patch + i,
                                    mod(q * patch + t - halo, w));
                                expect(got).toBe(want);
                            }
        }
    });
});

describe("direct-invocation differentials", () => {
    function tmpDir(): string {
        return fs.mkdtempSync(path.join(os.tmpdir(), "panogrid-diff-"));
    }

    test(`extract and stitch: ${CASES} random panoramas`, () => {
        const rng = mulberry32(2001);
        for (let iter = 0; iter < CASES; iter++) {
            const pano = boundArray([3, 8, 16], randFloats(rng, 3 * 8 * 16, 0, 1));
            const { views, layout } = bind_extract(pano, { tilePx: 8 });
            expect(views).toHaveLength(18);
            expect(views[0].shape).toEqual([3, 8, 8]);

            const dir = tmpDir();
            try {
                // run the same extraction directly on our own files
                const input = path.join(dir, "pano.tpaf");
                const outDir = path.join(dir, "views");
                writeTensor(input, pano);
                invoke(["extract", "--input", input, "--output-dir", outDir,
                    "--pixel-format", "tpaf", "--tile-px", "8"]);
                for (let i = 0; i < 18; i++) {
                    const ref = fs.readFileSync(
                        path.join(outDir, `plane_${String(i).padStart(2, "0")}.tpaf`));
                    expect(encodeTensor(views[i]).equals(ref)).toBe(true);
                }
                const refLayout = JSON.parse(
                    fs.readFileSync(path.join(outDir, "layout.json"), "utf8")) as LayoutDoc;
                expect(layout).toEqual(refLayout);

                const recon = bind_stitch(views, layout, 16, 8);
                expect(recon.shape).toEqual([3, 8, 16]);
                const refOut = path.join(dir, "recon.tpaf");
                invoke(["stitch", "--input-dir", outDir, "--output", refOut,
                    "--pixel-format", "tpaf", "--width", "16", "--height", "8"]);
                expect(encodeTensor(recon).equals(fs.readFileSync(refOut))).toBe(true);
            } finally {
                fs.rmSync(dir, { recursive: true, force: true });
            }
        }
    });

    test(`tangent fid: ${CASES} random feature stacks`, () => {
        const rng = mulberry32(2002);
        for (let iter = 0; iter < CASES; iter++) {
            const real = boundArray([6, 8, 3], randFloats(rng, 6 * 8 * 3, -2, 2));
            const gen = boundArray([6, 8, 3], randFloats(rng, 6 * 8 * 3, -2, 2));
            const shrinkage = iter % 2 === 0 ? 0 : 0.1;
            const report = bind_tangent_fid(real, gen, { count: 6, shrinkage });

            const dir = tmpDir();
            try {
                const realPath = path.join(dir, "real.tpaf");
                const genPath = path.join(dir, "gen.tpaf");
                writeTensor(realPath, real);
                writeTensor(genPath, gen);
                const ref = JSON.parse(invoke(["metrics", "--metric", "tangentfid",
                    "--real-features", realPath, "--gen-features", genPath,
                    "--count", "6", "--shrinkage", String(shrinkage),
                    "--output", "-"])) as MetricReportDoc;
                expect(report).toEqual(ref);
                expect(report.breakdown).toHaveLength(6);
            } finally {
                fs.rmSync(dir, { recursive: true, force: true });
            }
        }
    });

    test(`tangent is: ${CASES} random logit stacks`, () => {
        const rng = mulberry32(2003);
        for (let iter = 0; iter < CASES; iter++) {
            // random rows normalized to probability vectors
            const views = 6, n = 10, k = 5;
            const data = new Float32Array(views * n * k);
            for (let row = 0; row < views * n; row++) {
                const vals = Array.from({ length: k }, () => 0.05 + rng());
                const sum = vals.reduce((a, b) => a + b, 0);
                for (let j = 0; j < k; j++) {
                    data[row * k + j] = Math.fround(vals[j] / sum);
                }
            }
            const logits = boundArray([views, n, k], data);
            const splits = iter % 2 === 0 ? 1 : 2;
            const report = bind_tangent_is(logits, { count: views, splits });

            const dir = tmpDir();
            try {
                const logitsPath = path.join(dir, "logits.tpaf");
                writeTensor(logitsPath, logits);
                const ref = JSON.parse(invoke(["metrics", "--metric", "tangentis",
                    "--logits", logitsPath, "--count", String(views),
                    "--splits", String(splits), "--output", "-"])) as MetricReportDoc;
                expect(report).toEqual(ref);
                expect(report.breakdown).toHaveLength(views);
            } finally {
                fs.rmSync(dir, { recursive: true, force: true });
            }
        }
    });
});
