/** Client-side interaction engine: the same state machine the headless
 * pipeline implements, re-expressed in TypeScript. Pure functions over
 * `SessionState`; the renderer and UI layer never mutate engine state
 * directly.
 *
 * Frame: Z-up meters; yaw 0 looks along +Y and grows clockwise from above,
 * so forward = (sin yaw, cos yaw, 0); pitch positive upward, clamped ±89°.
 */

import {
    degToRad, normalizeDeg, radToDeg, signedDeg, vdist, vdot, Vec3, vnorm,
    vscale, vsub,
} from './math.js';
import { Scene } from './types.js';
import { TourPath } from './path.js';

export const ARRIVAL_THRESHOLD_M = 1.0;
export const COORDINATE_PRECISION_M = 0.001;

export interface Kinematics {
    eyeHeight: number;
    walkSpeed: number;
    rotateSensitivity: number;
    gravityEnabled: boolean;
    floorZ: number;
}

export const DEFAULT_KINEMATICS: Kinematics = {
    eyeHeight: 1.7,
    walkSpeed: 1.6,
    rotateSensitivity: 0.15,
    gravityEnabled: true,
    floorZ: 0,
};

export interface CameraPose {
    position: Vec3;
    yawDeg: number;
    pitchDeg: number;
}

export function makePose(position: Vec3, yawDeg: number,
                         pitchDeg: number): CameraPose {
    return {
        position,
        yawDeg: normalizeDeg(yawDeg),
        pitchDeg: Math.min(Math.max(pitchDeg, -89), 89),
    };
}

export function poseForward(pose: CameraPose): Vec3 {
    const yaw = degToRad(pose.yawDeg);
    const pitch = degToRad(pose.pitchDeg);
    return [
        Math.cos(pitch) * Math.sin(yaw),
        Math.cos(pitch) * Math.cos(yaw),
        Math.sin(pitch),
    ];
}

export interface GuidanceState {
    exitId: string;
    bearingDeg: number;
    relativeBearingDeg: number;
    distanceM: number;
    arrived: boolean;
}

export type Mode = 'free' | 'tour' | 'escape';

export interface SessionState {
    pose: CameraPose;
    mode: Mode;
    tourProgress: number;
    viewed: Set<string>;
    guidance: GuidanceState | null;
    clock: number;
}

export function initialState(pose: CameraPose): SessionState {
    return {
        pose, mode: 'free', tourProgress: 0,
        viewed: new Set(), guidance: null, clock: 0,
    };
}

function requireMode(state: SessionState, mode: Mode): void {
    if (state.mode !== mode) {
        throw new Error(`operation requires mode ${mode}, state is ${state.mode}`);
    }
}

const clamp1 = (v: number): number => Math.min(Math.max(v, -1), 1);

export function stepFree(state: SessionState, move: [number, number],
                         look: [number, number], dt: number,
                         cfg: Kinematics = DEFAULT_KINEMATICS): SessionState {
    requireMode(state, 'free');
    if (dt <= 0) throw new Error('dt must be > 0');
    const mx = clamp1(move[0]);
    const my = clamp1(move[1]);
    const yaw = normalizeDeg(state.pose.yawDeg + look[0] * cfg.rotateSensitivity);
    const pitch = state.pose.pitchDeg + look[1] * cfg.rotateSensitivity;

    const yr = degToRad(yaw);
    const fwd = [Math.sin(yr), Math.cos(yr)];
    const right = [Math.cos(yr), -Math.sin(yr)];
    const step = cfg.walkSpeed * dt;
    const x = state.pose.position[0] + step * (mx * right[0] + my * fwd[0]);
    const y = state.pose.position[1] + step * (mx * right[1] + my * fwd[1]);
    const z = cfg.gravityEnabled ? cfg.floorZ + cfg.eyeHeight
        : state.pose.position[2];
    return {
        ...state,
        pose: makePose([x, y, z], yaw, pitch),
        clock: state.clock + dt,
    };
}

export function teleport(state: SessionState, scene: Scene,
                         waypointId: string): SessionState {
    const wp = scene.waypoints.find((w) => w.id === waypointId);
    if (!wp) throw new Error(`unknown waypoint ${waypointId}`);
    return {
        ...state,
        pose: makePose([...wp.position], wp.yaw_deg, wp.pitch_deg),
        mode: 'free', guidance: null, tourProgress: 0,
    };
}

// --- auto tour --------------------------------------------------------------

export function startTour(state: SessionState, path: TourPath): SessionState {
    const [pos, yaw, pitch] = path.sample(0);
    return {
        ...state, mode: 'tour', tourProgress: 0, guidance: null,
        pose: makePose(pos, yaw, pitch),
    };
}

export function stepTour(state: SessionState, dt: number, path: TourPath,
                         speedMps: number, paused = false): SessionState {
    requireMode(state, 'tour');
    if (dt <= 0) throw new Error('dt must be > 0');
    if (paused) return { ...state, clock: state.clock + dt };
    const progress = Math.min(state.tourProgress + speedMps * dt,
                              path.totalLength);
    const [pos, yaw, pitch] = path.sample(progress);
    return {
        ...state,
        mode: progress >= path.totalLength ? 'free' : 'tour',
        tourProgress: progress,
        pose: makePose(pos, yaw, pitch),
        clock: state.clock + dt,
    };
}

// --- hotspots ---------------------------------------------------------------

/** Distance along a unit ray to a sphere, or null; 0 if origin inside. */
export function raySphereHit(origin: Vec3, direction: Vec3, center: Vec3,
                             radius: number): number | null {
    const oc = vsub(origin, center);
    const c = vdot(oc, oc) - radius * radius;
    if (c <= 0) return 0;
    const b = vdot(oc, direction);
    const disc = b * b - c;
    if (disc < 0) return null;
    const t = -b - Math.sqrt(disc);
    return t >= 0 ? t : null;
}

export function pickHotspot(scene: Scene, origin: Vec3, direction: Vec3,
                            maxRange: number): string | null {
    if (maxRange <= 0) throw new Error('maxRange must be > 0');
    const n = vnorm(direction);
    if (n === 0) throw new Error('ray direction must be nonzero');
    const dir = vscale(direction, 1 / n);
    let best: { t: number; id: string } | null = null;
    for (const hs of scene.hotspots) {
        const t = raySphereHit(origin, dir, hs.position, hs.trigger_radius);
        if (t === null || t > maxRange) continue;
        if (best === null || t < best.t || (t === best.t && hs.id < best.id)) {
            best = { t, id: hs.id };
        }
    }
    return best ? best.id : null;
}

/** Log a hotspot as viewed (idempotent); returns [inCategory, total]. */
export function markViewed(state: SessionState, scene: Scene,
                           hotspotId: string): [SessionState, [number, number]] {
    const hs = scene.hotspots.find((h) => h.id === hotspotId);
    if (!hs) throw new Error(`unknown hotspot ${hotspotId}`);
    const viewed = new Set(state.viewed);
    viewed.add(hotspotId);
    let inCat = 0;
    let total = 0;
    for (const h of scene.hotspots) {
        if (h.category !== hs.category) continue;
        total += 1;
        if (viewed.has(h.id)) inCat += 1;
    }
    return [{ ...state, viewed }, [inCat, total]];
}

// --- evacuation -------------------------------------------------------------

export function nearestExit(scene: Scene, position: Vec3): string {
    if (scene.exits.length === 0) throw new Error('scene defines no exits');
    let best: { d: number; id: string } | null = null;
    for (const e of scene.exits) {
        const d = vdist(e.position, position);
        if (best === null || d < best.d || (d === best.d && e.id < best.id)) {
            best = { d, id: e.id };
        }
    }
    return best!.id;
}

function guidanceFor(state: SessionState, scene: Scene,
                     exitId: string): GuidanceState {
    const exit = scene.exits.find((e) => e.id === exitId)!;
    const delta = vsub(exit.position, state.pose.position);
    const distance = vnorm(delta);
    const bearing = normalizeDeg(radToDeg(Math.atan2(delta[0], delta[1])));
    return {
        exitId,
        bearingDeg: bearing,
        relativeBearingDeg: signedDeg(bearing - state.pose.yawDeg),
        distanceM: distance,
        arrived: distance <= ARRIVAL_THRESHOLD_M,
    };
}

/** Enter escape mode; the target exit is fixed for the episode. */
export function startEscape(state: SessionState, scene: Scene): SessionState {
    const target = nearestExit(scene, state.pose.position);
    const st: SessionState = { ...state, mode: 'escape' };
    return { ...st, guidance: guidanceFor(st, scene, target) };
}

export function updateGuidance(state: SessionState,
                               scene: Scene): [SessionState, GuidanceState] {
    requireMode(state, 'escape');
    if (!state.guidance) throw new Error('escape mode without a guidance target');
    const g = guidanceFor(state, scene, state.guidance.exitId);
    if (g.arrived) {
        return [{ ...state, mode: 'free', guidance: null }, g];
    }
    return [{ ...state, guidance: g }, g];
}

export function stepEscape(state: SessionState, move: [number, number],
                           look: [number, number], dt: number, scene: Scene,
                           cfg: Kinematics = DEFAULT_KINEMATICS):
        [SessionState, GuidanceState] {
    requireMode(state, 'escape');
    const walked = stepFree({ ...state, mode: 'free' }, move, look, dt, cfg);
    return updateGuidance({ ...walked, mode: 'escape',
                            guidance: state.guidance }, scene);
}

// --- measurement ------------------------------------------------------------

export const measureDistance = (a: Vec3, b: Vec3): number => vdist(a, b);

/** Shoelace area of the polygon projected onto its best-fit plane.
 *
 * The plane normal comes from Newell's method; for planar inputs this is the
 * exact polygon plane, matching the pipeline's least-squares fit.
 */
export function measureArea(polygon: Vec3[]): number {
    if (polygon.length < 3) throw new Error('area needs at least 3 points');
    const n: Vec3 = [0, 0, 0];
    const centroid: Vec3 = [0, 0, 0];
    for (let i = 0; i < polygon.length; i++) {
        const p = polygon[i];
        const q = polygon[(i + 1) % polygon.length];
        n[0] += (p[1] - q[1]) * (p[2] + q[2]);
        n[1] += (p[2] - q[2]) * (p[0] + q[0]);
        n[2] += (p[0] - q[0]) * (p[1] + q[1]);
        for (let k = 0; k < 3; k++) centroid[k] += p[k] / polygon.length;
    }
    const mag = vnorm(n);
    let scale = 0;
    for (const p of polygon) scale = Math.max(scale, vdist(p, centroid));
    if (mag <= 1e-12 * scale * scale * polygon.length) {
        throw new Error('degenerate polygon: points are collinear');
    }
    // the Newell normal's magnitude is twice the projected polygon area
    return 0.5 * mag;
}

export function queryCoordinate(p: Vec3): Vec3 {
    if (!p.every(Number.isFinite)) throw new Error('pick must be finite');
    return p.map((v) =>
        Math.round(v / COORDINATE_PRECISION_M) * COORDINATE_PRECISION_M) as Vec3;
}
