import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, describe, expect, test } from "vitest";

import { cliCommand, invoke, version } from "../src/core.js";
import { CoreError, isCoreError } from "../src/errors.js";
import { bind_circular_pad, bind_extract, bind_tangent_fid } from "../src/index.js";
import { boundArray } from "../src/tensorfile.js";

const here = path.dirname(fileURLToPath(import.meta.url));

describe("version", () => {
    test("matches the core exactly", () => {
        expect(version()).toBe("0.1.0");
    });

    test("matches this package's own version", () => {
        const pkg = JSON.parse(
            fs.readFileSync(path.join(here, "..", "package.json"), "utf8"));
        expect(version()).toBe(pkg.version);
    });
});

describe("command resolution", () => {
    afterEach(() => {
        delete process.env.PANOGRID_CLI;
    });

    test("defaults to the module runner", () => {
        expect(cliCommand()).toEqual(["python3", "-m", "panogrid"]);
    });

    test("PANOGRID_CLI overrides, whitespace separated", () => {
        process.env.PANOGRID_CLI = "python3 -m panogrid";
        expect(cliCommand()).toEqual(["python3", "-m", "panogrid"]);
        expect(version()).toBe("0.1.0");
    });

    test("unreachable command is an io error", () => {
        process.env.PANOGRID_CLI = "/nonexistent/panogrid-cli";
        try {
            version();
            expect.unreachable();
        } catch (err) {
            expect(isCoreError(err)).toBe(true);
            expect((err as CoreError).code).toBe("io");
        }
    });
});

describe("core error mapping", () => {
    function catchCore(fn: () => unknown): CoreError {
        try {
            fn();
        } catch (err) {
            expect(err).toBeInstanceOf(CoreError);
            return err as CoreError;
        }
        return expect.unreachable() as never;
    }

    test("range violation carries the core code and message", () => {
        const z = boundArray([1, 1, 4], [1, 2, 3, 4]);
        const err = catchCore(() => bind_circular_pad(z, 9));
        expect(err.code).toBe("range");
        expect(err.message).toBe("pad width 9 exceeds tensor width 4");
    });

    test("missing input surfaces as io", () => {
        const err = catchCore(() =>
            invoke(["metrics", "--metric", "tangentfid", "--output", "-"]));
        expect(err.code).toBe("io");
        expect(err.message).toContain("tangentfid needs");
    });

    test("shape violations surface as dimension", () => {
        const flat = boundArray([2, 4], [0, 0, 0, 0, 0, 0, 0, 0]);
        const err = catchCore(() => bind_extract(flat));
        expect(err.code).toBe("dimension");
    });

    test("wrong view count surfaces as dimension", () => {
        const stack = boundArray([3, 4, 2], new Float32Array(24).fill(0.5));
        const err = catchCore(() => bind_tangent_fid(stack, stack));
        expect(err.code).toBe("dimension");
        expect(err.message).toContain("expected 18");
    });
});
