/**
 * True and kernel-estimated blip on a grid over `[-1, 1]`, with the
 * cross-validated risk of every candidate bandwidth.
 */
export class BlipCurves {
    static __wrap(ptr) {
        const obj = Object.create(BlipCurves.prototype);
        obj.__wbg_ptr = ptr;
        BlipCurvesFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        BlipCurvesFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_blipcurves_free(ptr, 0);
    }
    /**
     * Bandwidth used for `estimate`.
     * @returns {number}
     */
    get bandwidth() {
        const ret = wasm.blipcurves_bandwidth(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get candidates() {
        const ret = wasm.blipcurves_candidates(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get estimate() {
        const ret = wasm.blipcurves_estimate(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get risks() {
        const ret = wasm.blipcurves_risks(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Bandwidth with the smallest cross-validated risk.
     * @returns {number}
     */
    get selected() {
        const ret = wasm.blipcurves_selected(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get truth() {
        const ret = wasm.blipcurves_truth(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get w() {
        const ret = wasm.blipcurves_w(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) BlipCurves.prototype[Symbol.dispose] = BlipCurves.prototype.free;

/**
 * Counts from a batch of replicates, so a page can accumulate batches.
 */
export class CoverageBatch {
    static __wrap(ptr) {
        const obj = Object.create(CoverageBatch.prototype);
        obj.__wbg_ptr = ptr;
        CoverageBatchFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CoverageBatchFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_coveragebatch_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get classical_covered() {
        const ret = wasm.__wbg_get_coveragebatch_classical_covered(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get classical_ok() {
        const ret = wasm.__wbg_get_coveragebatch_classical_ok(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get classical_width_sum() {
        const ret = wasm.__wbg_get_coveragebatch_classical_width_sum(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get online_covered() {
        const ret = wasm.__wbg_get_coveragebatch_online_covered(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get online_ok() {
        const ret = wasm.__wbg_get_coveragebatch_online_ok(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get online_width_sum() {
        const ret = wasm.__wbg_get_coveragebatch_online_width_sum(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get truth() {
        const ret = wasm.__wbg_get_coveragebatch_truth(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set classical_covered(arg0) {
        wasm.__wbg_set_coveragebatch_classical_covered(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set classical_ok(arg0) {
        wasm.__wbg_set_coveragebatch_classical_ok(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set classical_width_sum(arg0) {
        wasm.__wbg_set_coveragebatch_classical_width_sum(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set online_covered(arg0) {
        wasm.__wbg_set_coveragebatch_online_covered(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set online_ok(arg0) {
        wasm.__wbg_set_coveragebatch_online_ok(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set online_width_sum(arg0) {
        wasm.__wbg_set_coveragebatch_online_width_sum(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set truth(arg0) {
        wasm.__wbg_set_coveragebatch_truth(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) CoverageBatch.prototype[Symbol.dispose] = CoverageBatch.prototype.free;

/**
 * One online run: the running estimate and interval after each scored
 * observation, plus the final interval and the true optimal value.
 */
export class Trajectory {
    static __wrap(ptr) {
        const obj = Object.create(Trajectory.prototype);
        obj.__wbg_ptr = ptr;
        TrajectoryFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        TrajectoryFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_trajectory_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get estimate() {
        const ret = wasm.trajectory_estimate(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get j() {
        const ret = wasm.trajectory_j(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get lower() {
        const ret = wasm.trajectory_lower(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get rule() {
        const ret = wasm.trajectory_rule(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get truth() {
        const ret = wasm.trajectory_truth(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get upper() {
        const ret = wasm.trajectory_upper(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) Trajectory.prototype[Symbol.dispose] = Trajectory.prototype.free;

/**
 * @param {string} dgp
 * @param {number} n
 * @param {number} ell
 * @param {bigint} seed
 * @param {number} batch
 * @param {number} count
 * @returns {CoverageBatch}
 */
export function coverageBatch(dgp, n, ell, seed, batch, count) {
    const ptr0 = passStringToWasm0(dgp, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.coverageBatch(ptr0, len0, n, ell, seed, batch, count);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return CoverageBatch.__wrap(ret[0]);
}

/**
 * @param {string} dgp
 * @param {number} n
 * @param {bigint} seed
 * @param {number} h
 * @param {number} points
 * @returns {BlipCurves}
 */
export function fitBlip(dgp, n, seed, h, points) {
    const ptr0 = passStringToWasm0(dgp, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.fitBlip(ptr0, len0, n, seed, h, points);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return BlipCurves.__wrap(ret[0]);
}

/**
 * @param {string} dgp
 * @param {number} n
 * @param {number} ell
 * @param {bigint} seed
 * @param {number} alpha
 * @returns {Trajectory}
 */
export function onlineRun(dgp, n, ell, seed, alpha) {
    const ptr0 = passStringToWasm0(dgp, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.onlineRun(ptr0, len0, n, ell, seed, alpha);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Trajectory.__wrap(ret[0]);
}

/**
 * @returns {number}
 */
export function propensityFloor() {
    const ret = wasm.propensityFloor();
    return ret;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./optvalue_wasm_bg.js": import0,
    };
}

const BlipCurvesFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_blipcurves_free(ptr, 1));
const CoverageBatchFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_coveragebatch_free(ptr, 1));
const TrajectoryFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_trajectory_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('optvalue_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
