/** Scripted end-to-end session against the fixture dataset: visit every
 * waypoint, view a hotspot, ride the auto tour to completion, then escape
 * to the nearest exit under guidance. The dataset client is a local fake
 * serving the fixture JSON plus synthesized node blobs, so the whole
 * session runs headless and offline.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';

import { DatasetClient } from '../src/client.js';
import { Vec3 } from '../src/math.js';
import {
    HierarchyRecord, Manifest, POINT_RECORD_BYTES, Scene,
} from '../src/types.js';
import { Viewer } from '../src/viewer.js';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');
const readJson = <T>(name: string): T =>
    JSON.parse(readFileSync(join(FIXTURES, name), 'utf8')) as T;

const manifest = readJson<Manifest>('manifest.json');
const records = readJson<HierarchyRecord[]>('hierarchy.json');
const scene = readJson<Scene>('scene.json');

/** Deterministic blob per node: the right record count, bytes irrelevant. */
function synthPayload(rec: HierarchyRecord): ArrayBuffer {
    const buf = new ArrayBuffer(rec.num_points * POINT_RECORD_BYTES);
    const view = new DataView(buf);
    let s = 0;
    for (const ch of rec.name) s = (s * 31 + ch.charCodeAt(0)) >>> 0;
    for (let i = 0; i < rec.num_points; i++) {
        s = (s * 1664525 + 1013904223) >>> 0;
        const base = i * POINT_RECORD_BYTES;
        view.setFloat32(base, (s % 1000) / 100, true);
        view.setFloat32(base + 4, (s % 997) / 100, true);
        view.setFloat32(base + 8, (s % 991) / 100, true);
        view.setUint8(base + 12, s & 0xff);
        view.setUint8(base + 13, (s >> 8) & 0xff);
        view.setUint8(base + 14, (s >> 16) & 0xff);
    }
    return buf;
}

function fakeClient(): DatasetClient {
    const byName = new Map(records.map((r) => [r.name, r]));
    return {
        baseUrl: '',
        manifest: async () => manifest,
        hierarchy: async () => records,
        scene: async () => scene,
        node: async (name: string) => {
            const rec = byName.get(name);
            if (!rec) throw new Error(`no such node ${name}`);
            return synthPayload(rec);
        },
        guidance: async () => {
            throw new Error('bot session computes guidance locally');
        },
        assetUrl: (ref: string) => `/api/assets/${ref}`,
    } as unknown as DatasetClient;
}

const BUDGET = 50_000;

async function drawnWithinBudget(viewer: Viewer, now: number): Promise<void> {
    // two frames: the first kicks off fetches, the second draws from cache
    await viewer.frame(now);
    const frame = await viewer.frame(now + 1);
    expect(frame.drawnPoints).toBeLessThanOrEqual(BUDGET);
    expect(frame.drawnPoints).toBeGreaterThan(0);
    expect(frame.pending).toHaveLength(0);
}

describe('scripted bot session', () => {
    it('runs the full visit end to end', async () => {
        const viewer = new Viewer(fakeClient(), { pointBudget: BUDGET });
        await viewer.load();
        let now = 0;

        // --- the demo scene is the advertised size -------------------------
        expect(viewer.scene.waypoints).toHaveLength(22);
        const info = viewer.scene.hotspots.filter(
            (h) => h.category === 'info');
        expect(info).toHaveLength(51);

        // --- teleport to every waypoint; stay under budget at each ---------
        for (const wp of viewer.scene.waypoints) {
            viewer.teleportTo(wp.id);
            expect(viewer.state.pose.position).toEqual(wp.position);
            await drawnWithinBudget(viewer, (now += 10));
        }

        // --- view one hotspot; counters advance to 1 of 51 -----------------
        const hs = viewer.scene.hotspots.find((h) => h.id === 'eq00')!;
        const origin: Vec3 = [hs.position[0], hs.position[1] - 3,
                              hs.position[2]];
        const progress = viewer.interact(origin, [0, 1, 0]);
        expect(progress).toEqual([1, 51]);
        expect(viewer.state.viewed.size).toBe(1);
        expect(viewer.activePanel?.title).toBe(hs.title);
        expect(viewer.categoryProgress.get(hs.category)?.[0]).toBe(1);
        viewer.closePanel();
        expect(viewer.activePanel).toBeNull();

        // --- auto tour to completion, sampling the budget along the way ----
        viewer.startAutoTour();
        expect(viewer.state.mode).toBe('tour');
        let ticks = 0;
        while (viewer.state.mode === 'tour') {
            viewer.tickTour(0.5);
            ticks += 1;
            expect(ticks).toBeLessThan(10_000);
            if (ticks % 20 === 0) {
                await drawnWithinBudget(viewer, (now += 10));
            }
        }
        expect(viewer.state.mode).toBe('free');
        await drawnWithinBudget(viewer, (now += 10));

        // --- escape: follow the HUD until arrival --------------------------
        viewer.beginEscape();
        expect(viewer.state.mode).toBe('escape');
        expect(viewer.hud).not.toBeNull();
        const distances: number[] = [viewer.hud!.distanceM];
        let steps = 0;
        while (viewer.state.mode === 'escape') {
            // steer straight at the exit, then walk forward
            const turn = viewer.hud!.relativeBearingDeg / 0.15;
            viewer.walk([0, 1], [turn, 0], 0.25);
            distances.push(viewer.hud!.distanceM);
            steps += 1;
            expect(steps).toBeLessThan(2_000);
            if (steps % 10 === 0) {
                await drawnWithinBudget(viewer, (now += 10));
            }
        }
        for (let i = 1; i < distances.length; i++) {
            expect(distances[i]).toBeLessThan(distances[i - 1]);
        }
        expect(viewer.hud!.arrived).toBe(true);
        expect(distances[distances.length - 1]).toBeLessThanOrEqual(1.0);
        expect(viewer.state.mode).toBe('free');
    }, 120_000);
});
