/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_spacetime_free: (a: number, b: number) => void;
export const height_at_origin: (a: number, b: bigint, c: number, d: number) => [number, number, number, number];
export const limit_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const ring_space_time: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number];
export const spacetime_absorbed_at: (a: number) => number;
export const spacetime_cells: (a: number) => [number, number];
export const spacetime_events: (a: number) => bigint;
export const spacetime_rows: (a: number) => number;
export const spacetime_sites: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
