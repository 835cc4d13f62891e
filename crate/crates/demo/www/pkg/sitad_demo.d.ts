/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Generates `n` descriptors and indexes them.
     */
    constructor(n: number, dim: number, max_weight: number, density: number, seed: number);
    /**
     * A stored descriptor to use as a query.
     */
    sample(row: number): string;
    /**
     * JSON matches and counters for `query` (`d:f` pairs) at threshold `eps`.
     */
    search(query: string, eps: string): string;
    /**
     * JSON summary of the database and index sizes.
     */
    summary(): string;
    /**
     * JSON list of evaluated tree nodes for the same search.
     */
    trace(query: string, eps: string): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly demo_sample: (a: number, b: number) => [number, number];
    readonly demo_search: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_summary: (a: number) => [number, number, number, number];
    readonly demo_trace: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
