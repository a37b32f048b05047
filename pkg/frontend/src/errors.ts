/**
 * Error surface of the bindings.
 *
 * Every failure raised by the core carries a stable code string
 * ("range", "io", "format", ...); the bindings rethrow it as a
 * CoreError holding the same code and message, so callers dispatch on
 * the failure class without parsing text.
 */

export class CoreError extends Error {
    /** Stable core error code, e.g. "range", "dimension", "io". */
    readonly code: string;
    /** Failing byte offset for "format" errors, -1 otherwise. */
    readonly offset: number;

    constructor(code: string, message: string, offset = -1) {
        super(message);
        this.name = "CoreError";
        this.code = code;
        this.offset = offset;
    }
}

/** Narrowing helper for catch blocks. */
export function isCoreError(err: unknown): err is CoreError {
    return err instanceof CoreError;
}
