/**
 * The tensor file format shared with the core library.
 *
 *     magic "TPAF" | version u32 | dtype tag u32 | rank u32 | dims u32*rank
 *     payload (row-major little-endian float32) | crc32 u32 of the payload
 *
 * Arrays cross the process boundary through these files only, so the
 * encoder must be byte-identical to the core writer: same header, same
 * payload order, same checksum.
 */

import * as fs from "node:fs";
import CRC32 from "crc-32";

import { CoreError } from "./errors.js";

export const MAGIC = "TPAF";
export const VERSION = 1;
export const DTYPE_F32 = 1;
export const MAX_RANK = 8;

// the payload fast path copies Float32Array buffers directly
const platformIsLE = new Uint8Array(new Uint32Array([1]).buffer)[0] === 1;
if (!platformIsLE) {
    throw new Error("tensor codec requires a little-endian platform");
}

/**
 * A dense row-major float32 array with its shape.  Values observed
 * through the bindings equal core-library values bit for bit.
 */
export interface BoundArray {
    readonly shape: readonly number[];
    readonly data: Float32Array;
}

function elementCount(shape: readonly number[]): number {
    return shape.reduce((acc, d) => acc * d, 1);
}

/** Build a BoundArray, checking shape/data consistency. */
export function boundArray(shape: readonly number[], data: Float32Array | number[]): BoundArray {
    const arr = data instanceof Float32Array ? data : Float32Array.from(data);
    const count = elementCount(shape);
    if (shape.length < 1 || shape.length > MAX_RANK) {
        throw new CoreError("dimension", `tensor rank ${shape.length} outside 1..${MAX_RANK}`);
    }
    for (const d of shape) {
        if (!Number.isInteger(d) || d < 1 || d >= 2 ** 32) {
            throw new CoreError("dimension", `bad dimension ${d} in shape [${shape.join(", ")}]`);
        }
    }
    if (count !== arr.length) {
        throw new CoreError("dimension",
            `shape [${shape.join(", ")}] holds ${count} elements, data has ${arr.length}`);
    }
    return { shape: [...shape], data: arr };
}

function crc32(buf: Uint8Array): number {
    return CRC32.buf(buf) >>> 0;
}

/** Encode a BoundArray into tensor-file bytes. */
export function encodeTensor(arr: BoundArray): Buffer {
    const { shape, data } = boundArray(arr.shape, arr.data);
    const header = Buffer.alloc(16 + 4 * shape.length);
    header.write(MAGIC, 0, "ascii");
    header.writeUInt32LE(VERSION, 4);
    header.writeUInt32LE(DTYPE_F32, 8);
    header.writeUInt32LE(shape.length, 12);
    shape.forEach((d, i) => header.writeUInt32LE(d, 16 + 4 * i));
    const payload = Buffer.from(data.buffer, data.byteOffset, data.byteLength);
    const trailer = Buffer.alloc(4);
    trailer.writeUInt32LE(crc32(payload), 0);
    return Buffer.concat([header, payload, trailer]);
}

/** Decode tensor-file bytes; offsets in errors match the core reader. */
export function decodeTensor(blob: Buffer): BoundArray {
    const need = (upto: number, what: string) => {
        if (blob.length < upto) {
            throw new CoreError("format", `truncated tensor file: ${what}`, blob.length);
        }
    };
    need(4, "magic");
    if (blob.toString("ascii", 0, 4) !== MAGIC) {
        throw new CoreError("format", `bad magic ${blob.subarray(0, 4).toString("hex")}`, 0);
    }
    need(8, "version");
    const version = blob.readUInt32LE(4);
    if (version !== VERSION) {
        throw new CoreError("format", `unsupported version ${version}`, 4);
    }
    need(12, "dtype tag");
    const dtype = blob.readUInt32LE(8);
    if (dtype !== DTYPE_F32) {
        throw new CoreError("format", `unsupported dtype tag ${dtype}`, 8);
    }
    need(16, "rank");
    const rank = blob.readUInt32LE(12);
    if (rank < 1 || rank > MAX_RANK) {
        throw new CoreError("format", `rank ${rank} outside 1..${MAX_RANK}`, 12);
    }
    need(16 + 4 * rank, "dims");
    const shape: number[] = [];
    for (let i = 0; i < rank; i++) {
        const d = blob.readUInt32LE(16 + 4 * i);
        if (d === 0) {
            throw new CoreError("format", `dimension ${i} is zero`, 16 + 4 * i);
        }
        shape.push(d);
    }
    const headerEnd = 16 + 4 * rank;
    const payloadEnd = headerEnd + 4 * elementCount(shape);
    if (blob.length < payloadEnd + 4) {
        throw new CoreError("format",
            `payload or checksum truncated: need ${payloadEnd + 4} bytes, file has ${blob.length}`,
            blob.length);
    }
    if (blob.length > payloadEnd + 4) {
        throw new CoreError("format",
            `${blob.length - payloadEnd - 4} trailing bytes after checksum`, payloadEnd + 4);
    }
    const payload = blob.subarray(headerEnd, payloadEnd);
    const stored = blob.readUInt32LE(payloadEnd);
    const actual = crc32(payload);
    if (stored !== actual) {
        throw new CoreError("checksum",
            `payload CRC32 mismatch: stored 0x${stored.toString(16)}, computed 0x${actual.toString(16)}`);
    }
    // copy out of the file buffer so the result owns aligned memory
    const data = new Float32Array(payload.length / 4);
    data.set(new Float32Array(payload.buffer.slice(
        payload.byteOffset, payload.byteOffset + payload.byteLength)));
    return { shape, data };
}

/** Write a BoundArray as a tensor file. */
export function writeTensor(path: string, arr: BoundArray): void {
    try {
        fs.writeFileSync(path, encodeTensor(arr));
    } catch (err) {
        throw new CoreError("io", `cannot write tensor file ${path}: ${err}`);
    }
}

/** Read a tensor file into a BoundArray. */
export function readTensor(path: string): BoundArray {
    let blob: Buffer;
    try {
        blob = fs.readFileSync(path);
    } catch (err) {
        throw new CoreError("io", `cannot read tensor file ${path}: ${err}`);
    }
    return decodeTensor(blob);
}
