/**
 * splitmix64, bit-for-bit compatible with the Python core.
 *
 * Room seeds are full 64-bit values, so all arithmetic runs on BigInt
 * and only the final modulo is narrowed to a Number.
 */
export const MASK64 = 0xffffffffffffffffn;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;
export class SplitMix64 {
    constructor(seed) {
        this.state = seed & MASK64;
    }
    nextU64() {
        this.state = (this.state + GAMMA) & MASK64;
        let z = this.state;
        z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
        z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
        return z ^ (z >> 31n);
    }
    /** Uniform-ish draw in [0, n); n is a small alternative count. */
    below(n) {
        return Number(this.nextU64() % BigInt(n));
    }
}
