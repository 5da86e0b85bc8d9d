/** World-frame math helpers: right-handed, Z-up, meters. */

export type Vec3 = [number, number, number];

export const vadd = (a: Vec3, b: Vec3): Vec3 =>
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]];

export const vsub = (a: Vec3, b: Vec3): Vec3 =>
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]];

export const vscale = (a: Vec3, s: number): Vec3 =>
    [a[0] * s, a[1] * s, a[2] * s];

export const vdot = (a: Vec3, b: Vec3): number =>
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2];

export const vcross = (a: Vec3, b: Vec3): Vec3 => [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
];

export const vnorm = (a: Vec3): number => Math.sqrt(vdot(a, a));

export function vnormalize(a: Vec3): Vec3 {
    const n = vnorm(a);
    if (n === 0) throw new Error('cannot normalize a zero vector');
    return vscale(a, 1 / n);
}

export const vdist = (a: Vec3, b: Vec3): number => vnorm(vsub(a, b));

/** Wrap an angle to [0, 360). */
export const normalizeDeg = (a: number): number => ((a % 360) + 360) % 360;

/** Wrap an angle to (-180, 180]. */
export function signedDeg(a: number): number {
    const w = normalizeDeg(a);
    return w > 180 ? w - 360 : w;
}

export const degToRad = (d: number): number => (d * Math.PI) / 180;
export const radToDeg = (r: number): number => (r * 180) / Math.PI;

export interface Aabb {
    min: Vec3;
    max: Vec3;
}

export const aabbCenter = (b: Aabb): Vec3 => [
    0.5 * (b.min[0] + b.max[0]),
    0.5 * (b.min[1] + b.max[1]),
    0.5 * (b.min[2] + b.max[2]),
];

/** Child cube for octant digit = 4*(x hi) + 2*(y hi) + 1*(z hi). */
export function aabbOctant(b: Aabb, digit: number): Aabb {
    const c = aabbCenter(b);
    const lo: Vec3 = [...b.min];
    const hi: Vec3 = [...c];
    const bits: Array<[number, number]> = [[0, 4], [1, 2], [2, 1]];
    for (const [axis, bit] of bits) {
        if (digit & bit) {
            lo[axis] = c[axis];
            hi[axis] = b.max[axis];
        }
    }
    return { min: lo, max: hi };
}

/** Euclidean distance from a point to the box (0 inside). */
export function aabbDistance(b: Aabb, p: Vec3): number {
    let s = 0;
    for (let k = 0; k < 3; k++) {
        const gap = Math.max(b.min[k] - p[k], p[k] - b.max[k], 0);
        s += gap * gap;
    }
    return Math.sqrt(s);
}
