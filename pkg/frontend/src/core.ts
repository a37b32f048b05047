/**
 * Process boundary to the core toolkit.
 *
 * The core is driven through its command-line interface; no math lives
 * on this side.  Failures print one "error: <code>: <message>" line to
 * stderr with a stable code, which is rethrown here as a CoreError.
 */

import { spawnSync } from "node:child_process";

import { CoreError } from "./errors.js";

/**
 * Command used to reach the core.  Override with the PANOGRID_CLI
 * environment variable (whitespace-separated), e.g. a direct path to
 * the installed `panogrid` script.
 */
export function cliCommand(): string[] {
    const env = process.env.PANOGRID_CLI;
    if (env && env.trim().length > 0) {
        return env.trim().split(/\s+/);
    }
    return ["python3", "-m", "panogrid"];
}

const ERROR_LINE = /^error: ([a-z]+): ([\s\S]*)$/m;

/**
 * Run one core command; returns stdout.  A nonzero exit rethrows the
 * core's error line as CoreError(code, message).
 */
export function invoke(args: string[]): string {
    const [cmd, ...prefix] = cliCommand();
    const res = spawnSync(cmd, [...prefix, ...args], {
        encoding: "utf8",
        maxBuffer: 1 << 26,
    });
    if (res.error) {
        throw new CoreError("io", `cannot run core command ${cmd}: ${res.error.message}`);
    }
    if (res.status !== 0) {
        const match = ERROR_LINE.exec(res.stderr ?? "");
        if (match) {
            throw new CoreError(match[1], match[2].trim());
        }
        throw new CoreError("internal",
            `core exited with status ${res.status}: ${(res.stderr ?? "").trim()}`);
    }
    return res.stdout;
}

/** Core library version; the bindings must match it exactly. */
export function version(): string {
    const out = invoke(["--version"]).trim();
    const sep = out.lastIndexOf(" ");
    return sep >= 0 ? out.slice(sep + 1) : out;
}
