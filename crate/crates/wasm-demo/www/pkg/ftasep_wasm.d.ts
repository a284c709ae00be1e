/* tslint:disable */
/* eslint-disable */

/**
 * Occupancies of a ring sampled at evenly spaced times, row-major.
 */
export class SpaceTime {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Absorption time, `NaN` if the ring was still active at the last row.
     */
    readonly absorbed_at: number;
    readonly cells: Uint8Array;
    readonly events: bigint;
    readonly rows: number;
    readonly sites: number;
}

/**
 * `h(t, 0)` from a product initial law of density `rho`, as `[t, h]` pairs.
 */
export function height_at_origin(rho: number, seed: bigint, horizon: number, points: number): Float64Array;

/**
 * Frozen-law probability of `word` on a grid of densities in (0, 1/2).
 * Returns `[rho, P(word), P(word) - P(word 0) - P(word 1)]` per grid point.
 */
export function limit_curve(word: string, steps: number): Float64Array;

/**
 * Runs a ring of `len` sites with `k` particles from the uniform sector law.
 */
export function ring_space_time(len: number, k: number, seed: bigint, rows: number, dt: number): SpaceTime;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_spacetime_free: (a: number, b: number) => void;
    readonly height_at_origin: (a: number, b: bigint, c: number, d: number) => [number, number, number, number];
    readonly limit_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly ring_space_time: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number];
    readonly spacetime_absorbed_at: (a: number) => number;
    readonly spacetime_cells: (a: number) => [number, number];
    readonly spacetime_events: (a: number) => bigint;
    readonly spacetime_rows: (a: number) => number;
    readonly spacetime_sites: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
