/** Rebuild node geometry from the manifest + hierarchy index. */

import { Aabb, aabbOctant, Vec3 } from './math.js';
import { HierarchyRecord, LodNode, Manifest, POINT_RECORD_BYTES } from './types.js';

export function manifestBounds(manifest: Manifest): Aabb {
    return {
        min: manifest.bounds.min as Vec3,
        max: manifest.bounds.max as Vec3,
    };
}

export function nodeBounds(root: Aabb, name: string): Aabb {
    if (!name.startsWith('r')) throw new Error(`bad node name ${name}`);
    let b = root;
    for (const ch of name.slice(1)) {
        const d = ch.charCodeAt(0) - 48;
        if (d < 0 || d > 7) throw new Error(`bad node name ${name}`);
        b = aabbOctant(b, d);
    }
    return b;
}

export const nodeSpacing = (rootSpacing: number, level: number): number =>
    rootSpacing / 2 ** level;

export function buildNodes(manifest: Manifest,
                           records: HierarchyRecord[]): LodNode[] {
    const root = manifestBounds(manifest);
    return records.map((rec) => {
        if (rec.level !== rec.name.length - 1) {
            throw new Error(`node ${rec.name}: level does not match name`);
        }
        if (rec.byte_size !== rec.num_points * POINT_RECORD_BYTES) {
            throw new Error(`node ${rec.name}: byte_size/num_points mismatch`);
        }
        return {
            ...rec,
            bounds: nodeBounds(root, rec.name),
            spacing: nodeSpacing(manifest.root_spacing, rec.level),
        };
    });
}

export const parentName = (name: string): string | null =>
    name.length > 1 ? name.slice(0, -1) : null;
