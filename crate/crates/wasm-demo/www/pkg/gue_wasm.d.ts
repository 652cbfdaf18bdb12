/* tslint:disable */
/* eslint-disable */

export class Resummed {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly alpha: Float64Array;
    readonly partial_sums: Float64Array;
    readonly reference: number;
}

export function density_curve(n: number, from: number, to: number, points: number): Float64Array;

export function laplace_series(n: number, s: number, depth: number): Float64Array;

export function resummation(n: number, family: string, param: number, terms: number): Resummed;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_resummed_free: (a: number, b: number) => void;
    readonly density_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly laplace_series: (a: number, b: number, c: number) => [number, number, number, number];
    readonly resummation: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly resummed_alpha: (a: number) => [number, number];
    readonly resummed_partial_sums: (a: number) => [number, number];
    readonly resummed_reference: (a: number) => number;
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
