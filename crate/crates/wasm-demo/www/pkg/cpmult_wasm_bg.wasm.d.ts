/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const deviation_curve: (a: number) => [number, number];
export const scalar_family: (a: number) => [number, number];
export const subset_bound: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
