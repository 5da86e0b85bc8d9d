/** Arc-length-parameterized tour path: centripetal Catmull-Rom spline in
 * Hermite form with duplicated phantom endpoints, flattened adaptively to a
 * millimeter-accurate polyline for constant-speed traversal.
 */

import { signedDeg, vdist, Vec3 } from './math.js';
import { Scene, Waypoint } from './types.js';

export const ARC_TOLERANCE = 1e-3; // meters

function hermiteTangents(controls: Vec3[]): Vec3[] {
    const ext = [controls[0], ...controls, controls[controls.length - 1]];
    const d: number[] = [];
    for (let i = 0; i < ext.length - 1; i++) {
        d.push(Math.sqrt(vdist(ext[i], ext[i + 1]))); // |dP|^(1/2)
    }
    const tangents: Vec3[] = [];
    for (let i = 0; i < controls.length; i++) {
        const p0 = ext[i];
        const p1 = ext[i + 1];
        const p2 = ext[i + 2];
        const d01 = d[i];
        const d12 = d[i + 1];
        const t: Vec3 = [0, 0, 0];
        for (let k = 0; k < 3; k++) {
            if (d01 > 0) t[k] += (p1[k] - p0[k]) / d01;
            if (d12 > 0) t[k] += (p2[k] - p1[k]) / d12;
            if (d01 + d12 > 0) t[k] -= (p2[k] - p0[k]) / (d01 + d12);
        }
        tangents.push(t);
    }
    return tangents;
}

function evalSegment(p1: Vec3, p2: Vec3, m1: Vec3, m2: Vec3, u: number): Vec3 {
    const u2 = u * u;
    const u3 = u2 * u;
    const h00 = 2 * u3 - 3 * u2 + 1;
    const h10 = u3 - 2 * u2 + u;
    const h01 = -2 * u3 + 3 * u2;
    const h11 = u3 - u2;
    return [
        h00 * p1[0] + h10 * m1[0] + h01 * p2[0] + h11 * m2[0],
        h00 * p1[1] + h10 * m1[1] + h01 * p2[1] + h11 * m2[1],
        h00 * p1[2] + h10 * m1[2] + h01 * p2[2] + h11 * m2[2],
    ];
}

function flattenSegment(p1: Vec3, p2: Vec3, m1: Vec3, m2: Vec3,
                        tol: number): Vec3[] {
    const out: Vec3[] = [];
    const recurse = (u0: number, q0: Vec3, u1: number, q1: Vec3,
                     depth: number): void => {
        const um = 0.5 * (u0 + u1);
        const qm = evalSegment(p1, p2, m1, m2, um);
        const flat = Math.abs(vdist(q0, qm) + vdist(qm, q1)
            - vdist(q0, q1)) < tol;
        if ((flat && depth >= 4) || depth >= 16) {
            out.push(q1);
            return;
        }
        recurse(u0, q0, um, qm, depth + 1);
        recurse(um, qm, u1, q1, depth + 1);
    };
    const q0 = evalSegment(p1, p2, m1, m2, 0);
    const q1 = evalSegment(p1, p2, m1, m2, 1);
    recurse(0, q0, 1, q1, 0);
    return out;
}

export class TourPath {
    readonly controls: Vec3[];
    readonly yaws: number[];
    readonly pitches: number[];
    readonly totalLength: number;
    readonly waypointArcs: number[];
    private samples: Vec3[];
    private sampleArcs: number[];

    constructor(waypoints: Waypoint[]) {
        if (waypoints.length < 2) {
            throw new Error('a tour path needs at least 2 waypoints');
        }
        this.controls = waypoints.map((w) => [...w.position] as Vec3);
        this.yaws = waypoints.map((w) => w.yaw_deg);
        this.pitches = waypoints.map((w) => w.pitch_deg);
        const tangents = hermiteTangents(this.controls);

        const samples: Vec3[] = [this.controls[0]];
        const arcs: number[] = [0];
        const waypointArcs: number[] = [0];
        const tol = ARC_TOLERANCE / Math.max(this.controls.length - 1, 1);
        for (let i = 0; i < this.controls.length - 1; i++) {
            for (const q of flattenSegment(this.controls[i],
                                           this.controls[i + 1], tangents[i],
                                           tangents[i + 1], tol)) {
                arcs.push(arcs[arcs.length - 1]
                    + vdist(q, samples[samples.length - 1]));
                samples.push(q);
            }
            waypointArcs.push(arcs[arcs.length - 1]);
        }
        this.samples = samples;
        this.sampleArcs = arcs;
        this.totalLength = arcs[arcs.length - 1];
        this.waypointArcs = waypointArcs;
    }

    /** Position/yaw/pitch at arc length s (clamped to [0, totalLength]). */
    sample(s: number): [Vec3, number, number] {
        s = Math.min(Math.max(s, 0), this.totalLength);
        let k = upperBound(this.sampleArcs, s) - 1;
        k = Math.min(Math.max(k, 0), this.samples.length - 2);
        const seg = this.sampleArcs[k + 1] - this.sampleArcs[k];
        const u = seg === 0 ? 0 : (s - this.sampleArcs[k]) / seg;
        const a = this.samples[k];
        const b = this.samples[k + 1];
        const pos: Vec3 = [
            a[0] + u * (b[0] - a[0]),
            a[1] + u * (b[1] - a[1]),
            a[2] + u * (b[2] - a[2]),
        ];

        let j = upperBound(this.waypointArcs, s) - 1;
        j = Math.min(Math.max(j, 0), this.controls.length - 2);
        const span = this.waypointArcs[j + 1] - this.waypointArcs[j];
        let v = span === 0 ? 0 : (s - this.waypointArcs[j]) / span;
        v = Math.min(Math.max(v, 0), 1);
        const yaw = (((this.yaws[j]
            + v * signedDeg(this.yaws[j + 1] - this.yaws[j])) % 360) + 360)
            % 360;
        const pitch = this.pitches[j]
            + v * (this.pitches[j + 1] - this.pitches[j]);
        return [pos, yaw, pitch];
    }
}

/** First index whose value is strictly greater than x. */
function upperBound(arr: number[], x: number): number {
    let lo = 0;
    let hi = arr.length;
    while (lo < hi) {
        const mid = (lo + hi) >> 1;
        if (arr[mid] <= x) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

export function buildTourPath(scene: Scene): TourPath {
    if (!scene.tour || scene.tour.waypoint_ids.length < 2) {
        throw new Error('scene tour needs at least 2 waypoints');
    }
    const byId = new Map(scene.waypoints.map((w) => [w.id, w]));
    const waypoints = scene.tour.waypoint_ids.map((id) => {
        const wp = byId.get(id);
        if (!wp) throw new Error(`unknown waypoint ${id}`);
        return wp;
    });
    return new TourPath(waypoints);
}
