/* tslint:disable */
/* eslint-disable */

/**
 * Labels accepted by [`state_table`].
 */
export function catalog_labels(): string[];

/**
 * Flattened rows `α, y₁, y₂, y₃` of figure `id` over `start..=stop`.
 */
export function figure_curves(id: number, start: number, stop: number, step: number): Float64Array;

/**
 * Checks every bound on `count` Haar-random `qubits`-qubit states at one α.
 * Returns JSON `{states, rows, exact, estimates, violations, warnings,
 * min_exact_gap, failures: [{state, id, gap}]}`.
 */
export function random_check(qubits: number, count: number, seed: number, alpha: number, trials: number): string;

/**
 * Measure listing and every bound row of a catalog state at one α, as JSON
 * `{state, alpha, listing: [{label, value, status}], bounds: [...], notes}`.
 */
export function state_table(label: string, alpha: number, trials: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly catalog_labels: () => [number, number];
    readonly figure_curves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly random_check: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly state_table: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
