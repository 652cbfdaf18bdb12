/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_resummed_free: (a: number, b: number) => void;
export const density_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const laplace_series: (a: number, b: number, c: number) => [number, number, number, number];
export const resummation: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const resummed_alpha: (a: number) => [number, number];
export const resummed_partial_sums: (a: number) => [number, number];
export const resummed_reference: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
