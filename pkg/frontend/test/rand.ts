/** Deterministic PRNG helpers so differential cases are reproducible. */

export type Rng = () => number;

/** mulberry32: small seeded generator, uniform in [0, 1). */
export function mulberry32(seed: number): Rng {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) >>> 0;
        let t = a;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}

/** Integer in [lo, hi] inclusive. */
export function randInt(rng: Rng, lo: number, hi: number): number {
    return lo + Math.floor(rng() * (hi - lo + 1));
}

/** Float32 values uniform in [lo, hi). */
export function randFloats(rng: Rng, n: number, lo = -1, hi = 1): Float32Array {
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
        out[i] = Math.fround(lo + rng() * (hi - lo));
    }
    return out;
}
