/** Client-side LOD node selection; the same rule the server pipeline uses.
 *
 * Candidates: the root unconditionally, plus every node whose cube intersects
 * the frustum and whose projected extent is at least minPixels. Ranked by
 * descending extent (ties by name, root first); admission walks the ranking,
 * passing over nodes whose parent was not admitted, and ends at the first
 * parent-admitted node that does not fit the remaining point budget.
 */

import {
    Aabb, degToRad, vadd, vcross, vdot, Vec3, vnorm, vnormalize, vscale, vsub,
} from './math.js';
import { parentName } from './hierarchy.js';
import { LodNode } from './types.js';

export interface CameraView {
    position: Vec3;
    forward: Vec3;
    right: Vec3;
    up: Vec3;
    verticalFov: number;
    aspect: number;
    viewportHeight: number;
    near: number;
    far: number;
}

export interface ViewOptions {
    verticalFov?: number;
    aspect?: number;
    viewportHeight?: number;
    near?: number;
    far?: number;
}

export function makeView(position: Vec3, forward: Vec3, up: Vec3,
                         opts: ViewOptions = {}): CameraView {
    const f = vnormalize(forward);
    const r = vnormalize(vcross(f, up));
    return {
        position,
        forward: f,
        right: r,
        up: vcross(r, f),
        verticalFov: opts.verticalFov ?? 60,
        aspect: opts.aspect ?? 16 / 9,
        viewportHeight: opts.viewportHeight ?? 1080,
        near: opts.near ?? 0.1,
        far: opts.far ?? 1000,
    };
}

export const tanHalfFov = (view: CameraView): number =>
    Math.tan(degToRad(view.verticalFov) / 2);

interface Plane {
    n: Vec3;       // inward normal
    p: Vec3;       // point on the plane
}

export function frustumPlanes(view: CameraView): Plane[] {
    const { forward: f, right: r, up: u, position: pos } = view;
    const tv = tanHalfFov(view);
    const th = tv * view.aspect;
    const planes: Plane[] = [
        { n: f, p: vadd(pos, vscale(f, view.near)) },
        { n: vscale(f, -1), p: vadd(pos, vscale(f, view.far)) },
    ];
    const side = (axis: Vec3, edge: Vec3): Plane => {
        let n = vcross(axis, edge);
        if (vdot(n, f) < 0) n = vscale(n, -1);
        return { n: vscale(n, 1 / vnorm(n)), p: pos };
    };
    planes.push(side(u, vsub(f, vscale(r, th))));
    planes.push(side(u, vadd(f, vscale(r, th))));
    planes.push(side(r, vsub(f, vscale(u, tv))));
    planes.push(side(r, vadd(f, vscale(u, tv))));
    return planes;
}

/** Conservative p-vertex test. */
export function aabbIntersectsFrustum(b: Aabb, planes: Plane[]): boolean {
    for (const { n, p } of planes) {
        let s = 0;
        for (let k = 0; k < 3; k++) {
            const pv = n[k] >= 0 ? b.max[k] : b.min[k];
            s += (pv - p[k]) * n[k];
        }
        if (s < 0) return false;
    }
    return true;
}

/** Screen-space node diameter in pixels; Infinity when the camera is inside. */
export function projectedExtent(view: CameraView, b: Aabb): number {
    let d = 0;
    let r = 0;
    for (let k = 0; k < 3; k++) {
        const gap = Math.max(b.min[k] - view.position[k],
                             view.position[k] - b.max[k], 0);
        d += gap * gap;
        const edge = b.max[k] - b.min[k];
        r += edge * edge;
    }
    const dist = Math.sqrt(d);
    if (dist === 0) return Infinity;
    const radius = 0.5 * Math.sqrt(r);
    return (view.viewportHeight * radius) / (dist * tanHalfFov(view));
}

export interface Selection {
    nodeNames: string[];
    totalPointsSelected: number;
    bytesSelected: number;
}

export function selectNodes(nodes: LodNode[], view: CameraView,
                            pointBudget: number,
                            minPixels = 0): Selection {
    if (pointBudget <= 0) throw new Error('pointBudget must be > 0');
    const root = nodes.find((n) => n.name === 'r');
    if (!root) throw new Error('hierarchy has no root node');
    if (root.num_points > pointBudget) {
        throw new Error('budget below root size');
    }

    const planes = frustumPlanes(view);
    const scored: Array<{ node: LodNode; ext: number }> = [];
    for (const node of nodes) {
        const ext = projectedExtent(view, node.bounds);
        const ok = node.name === 'r'
            || (ext >= minPixels && aabbIntersectsFrustum(node.bounds, planes));
        if (ok) scored.push({ node, ext });
    }
    scored.sort((a, b) => {
        if (a.node.name === 'r') return -1;
        if (b.node.name === 'r') return 1;
        if (a.ext !== b.ext) return b.ext - a.ext;
        return a.node.name < b.node.name ? -1 : 1;
    });

    const admitted = new Set<string>();
    const selected: LodNode[] = [];
    let remaining = pointBudget;
    for (const { node } of scored) {
        const parent = parentName(node.name);
        if (parent !== null && !admitted.has(parent)) continue;
        if (node.num_points > remaining) break;
        admitted.add(node.name);
        selected.push(node);
        remaining -= node.num_points;
    }
    return {
        nodeNames: selected.map((n) => n.name),
        totalPointsSelected: selected.reduce((s, n) => s + n.num_points, 0),
        bytesSelected: selected.reduce((s, n) => s + n.byte_size, 0),
    };
}

/** Pixel size so a point roughly covers its spacing on screen; in [1, 16]. */
export function adaptivePointSize(node: LodNode, view: CameraView): number {
    let d = 0;
    for (let k = 0; k < 3; k++) {
        const gap = Math.max(node.bounds.min[k] - view.position[k],
                             view.position[k] - node.bounds.max[k], 0);
        d += gap * gap;
    }
    const dist = Math.sqrt(d);
    if (dist === 0) return 16;
    const size = (view.viewportHeight * node.spacing)
        / (dist * 2 * tanHalfFov(view));
    return Math.min(Math.max(size, 1), 16);
}
