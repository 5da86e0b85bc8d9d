/** Dataset-server API client and node payload decoding. */

import { Vec3 } from './math.js';
import {
    GuidancePayload, HierarchyRecord, Manifest, POINT_RECORD_BYTES, Scene,
} from './types.js';

export interface DecodedNode {
    /** World-frame positions, xyz interleaved. */
    positions: Float32Array;
    /** RGB bytes, interleaved, same ordering as positions. */
    colors: Uint8Array;
    count: number;
    byteLength: number;
}

/** Decode the 16-byte point records of a node blob into world-frame arrays. */
export function decodeNodePayload(buf: ArrayBuffer,
                                  rootMin: Vec3): DecodedNode {
    if (buf.byteLength % POINT_RECORD_BYTES !== 0) {
        throw new Error('node payload is not a whole number of records');
    }
    const count = buf.byteLength / POINT_RECORD_BYTES;
    const view = new DataView(buf);
    const positions = new Float32Array(count * 3);
    const colors = new Uint8Array(count * 3);
    for (let i = 0; i < count; i++) {
        const base = i * POINT_RECORD_BYTES;
        positions[i * 3] = view.getFloat32(base, true) + rootMin[0];
        positions[i * 3 + 1] = view.getFloat32(base + 4, true) + rootMin[1];
        positions[i * 3 + 2] = view.getFloat32(base + 8, true) + rootMin[2];
        colors[i * 3] = view.getUint8(base + 12);
        colors[i * 3 + 1] = view.getUint8(base + 13);
        colors[i * 3 + 2] = view.getUint8(base + 14);
    }
    return { positions, colors, count, byteLength: buf.byteLength };
}

export class DatasetClient {
    constructor(readonly baseUrl: string = '') {}

    private async getJson<T>(path: string): Promise<T> {
        const resp = await fetch(this.baseUrl + path);
        if (!resp.ok) throw new Error(`${path}: HTTP ${resp.status}`);
        return resp.json() as Promise<T>;
    }

    manifest(): Promise<Manifest> {
        return this.getJson('/api/manifest');
    }

    hierarchy(): Promise<HierarchyRecord[]> {
        return this.getJson('/api/hierarchy');
    }

    scene(): Promise<Scene> {
        return this.getJson('/api/scene');
    }

    async node(name: string): Promise<ArrayBuffer> {
        const resp = await fetch(`${this.baseUrl}/api/nodes/${name}`);
        if (!resp.ok) throw new Error(`node ${name}: HTTP ${resp.status}`);
        return resp.arrayBuffer();
    }

    guidance(position: Vec3): Promise<GuidancePayload> {
        const [x, y, z] = position;
        return this.getJson(`/api/guidance?x=${x}&y=${y}&z=${z}`);
    }

    assetUrl(ref: string): string {
        return `${this.baseUrl}/api/assets/${ref}`;
    }
}
