/* tslint:disable */
/* eslint-disable */

/**
 * `[E_C, E_J1_L, dE_J, alpha]` of a Chip A device at the nominal 10 pH, or
 * an empty array for an unknown junction length.
 */
export function chip_a_params(junction_um: number): Float64Array;

/**
 * Rows of `[flux, I_max (µA), I_min (µA), eta]` over `points` fluxes.
 */
export function diode_curve(e_c: number, e_j1_left: number, d_ej: number, alpha: number, start: number, stop: number, points: number): Float64Array;

/**
 * U(φ) and the lowest `levels` densities on `points` phases over [−π, π).
 * Layout: φ (points), U − min U (points), energies − E₀ (levels), then one
 * density per level (points each).
 */
export function potential_and_densities(e_c: number, e_j1_left: number, d_ej: number, alpha: number, ng: number, flux: number, levels: number, points: number): Float64Array;

/**
 * ω_{i0} for i = 1..levels over `points` fluxes in [start, stop] (Φ₀).
 * Row-major: `points` rows of `levels − 1` values, GHz.
 */
export function transition_curves(e_c: number, e_j1_left: number, d_ej: number, alpha: number, ng: number, start: number, stop: number, points: number, levels: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly chip_a_params: (a: number) => [number, number];
    readonly diode_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly potential_and_densities: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly transition_curves: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
