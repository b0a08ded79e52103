/* tslint:disable */
/* eslint-disable */

/**
 * L² deviations of the scalar family `(id, c·id)` on the flip system for
 * `steps + 1` equally spaced `c ∈ [0, 1]`.
 */
export function deviation_curve(steps: number): string;

/**
 * `F = (id, c·id)` on `Z/2` acting on `M_2` by the flip.
 */
export function scalar_family(c: number): string;

/**
 * `h_F` on `Z/3` acting on `C³`, for the subset given by the low three bits
 * of `mask` and `Φ = (1 − mix)·id + mix·τ(·)1`.
 */
export function subset_bound(mask: number, mix: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly deviation_curve: (a: number) => [number, number];
    readonly scalar_family: (a: number) => [number, number];
    readonly subset_bound: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
