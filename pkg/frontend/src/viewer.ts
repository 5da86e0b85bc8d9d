/** Viewer session state and the per-frame streaming logic, kept free of any
 * DOM or WebGL dependency so it is fully testable headlessly. The renderer
 * subscribes to the outputs (which nodes to draw, at what point size).
 */

import { DatasetClient, DecodedNode, decodeNodePayload } from './client.js';
import {
    GuidanceState, SessionState, initialState, makePose, markViewed,
    pickHotspot, poseForward, startEscape, startTour, stepEscape, stepFree,
    stepTour, teleport, updateGuidance,
} from './engine.js';
import { buildNodes, manifestBounds } from './hierarchy.js';
import { Vec3 } from './math.js';
import { buildTourPath, TourPath } from './path.js';
import { LruCache } from './lru.js';
import {
    CameraView, adaptivePointSize, makeView, selectNodes, ViewOptions,
} from './select.js';
import { HOTSPOT_CATEGORIES, LodNode, Manifest, Scene } from './types.js';

export interface FrameResult {
    /** Nodes ready to draw this frame, with their pixel sizes. */
    draw: Array<{ node: LodNode; data: DecodedNode; pointSize: number }>;
    drawnPoints: number;
    /** Selected but not yet loaded (fetches in flight or backed off). */
    pending: string[];
    /** Bytes newly fetched since the previous frame. */
    newBytes: number;
    degraded: boolean;
}

export interface ViewerOptions {
    pointBudget?: number;
    minPixels?: number;
    cacheBytes?: number;
    view?: ViewOptions;
    retryBackoffMs?: number;
}

export class Viewer {
    state: SessionState;
    scene!: Scene;
    manifest!: Manifest;
    nodes!: LodNode[];
    readonly layerVisible = new Map<string, boolean>();
    readonly categoryProgress = new Map<string, [number, number]>();
    hud: GuidanceState | null = null;
    activePanel: { title: string; body: string; imageUrl?: string } | null = null;

    readonly pointBudget: number;
    readonly minPixels: number;
    private readonly viewOpts: ViewOptions;
    private readonly retryBackoffMs: number;
    private cache: LruCache<DecodedNode>;
    private inflight = new Set<string>();
    private failedUntil = new Map<string, number>();
    private fetchedBytes = 0;
    private lastFetchedBytes = 0;
    private tourPath: TourPath | null = null;

    constructor(private client: DatasetClient, opts: ViewerOptions = {}) {
        this.pointBudget = opts.pointBudget ?? 500_000;
        this.minPixels = opts.minPixels ?? 0;
        this.viewOpts = opts.view ?? {};
        this.retryBackoffMs = opts.retryBackoffMs ?? 2000;
        this.cache = new LruCache(opts.cacheBytes ?? 256 * 1024 * 1024);
        this.state = initialState(makePose([0, 0, 1.7], 0, 0));
        for (const c of HOTSPOT_CATEGORIES) this.layerVisible.set(c, true);
    }

    async load(): Promise<void> {
        const [manifest, records, scene] = await Promise.all([
            this.client.manifest(), this.client.hierarchy(),
            this.client.scene(),
        ]);
        this.manifest = manifest;
        this.nodes = buildNodes(manifest, records);
        this.scene = scene;
        for (const c of HOTSPOT_CATEGORIES) {
            const total = scene.hotspots.filter(
                (h) => h.category === c).length;
            this.categoryProgress.set(c, [0, total]);
        }
        const wp = scene.waypoints[0];
        if (wp) {
            this.state = initialState(
                makePose([...wp.position], wp.yaw_deg, wp.pitch_deg));
        }
    }

    cameraView(): CameraView {
        return makeView([...this.state.pose.position], poseForward(this.state.pose),
                        [0, 0, 1], this.viewOpts);
    }

    /** One streaming frame: select, fetch what's missing, report drawables. */
    async frame(now: number = Date.now()): Promise<FrameResult> {
        const view = this.cameraView();
        const sel = selectNodes(this.nodes, view, this.pointBudget,
                                this.minPixels);
        const byName = new Map(this.nodes.map((n) => [n.name, n]));
        const draw: FrameResult['draw'] = [];
        const pending: string[] = [];
        const fetches: Promise<void>[] = [];
        let degraded = false;

        for (const name of sel.nodeNames) {
            const node = byName.get(name)!;
            const cached = this.cache.get(name);
            if (cached) {
                draw.push({ node, data: cached,
                            pointSize: adaptivePointSize(node, view) });
                continue;
            }
            pending.push(name);
            const retryAt = this.failedUntil.get(name);
            if (retryAt !== undefined && now < retryAt) {
                degraded = true;
                continue;
            }
            if (!this.inflight.has(name)) {
                this.inflight.add(name);
                fetches.push(this.fetchNode(node, now));
            }
        }
        await Promise.all(fetches);
        const newBytes = this.fetchedBytes - this.lastFetchedBytes;
        this.lastFetchedBytes = this.fetchedBytes;
        return {
            draw,
            drawnPoints: draw.reduce((s, d) => s + d.data.count, 0),
            pending,
            newBytes,
            degraded,
        };
    }

    private async fetchNode(node: LodNode, now: number): Promise<void> {
        try {
            const buf = await this.client.node(node.name);
            const rootMin = manifestBounds(this.manifest).min;
            this.cache.set(node.name, decodeNodePayload(buf, rootMin),
                           buf.byteLength);
            this.fetchedBytes += buf.byteLength;
            this.failedUntil.delete(node.name);
        } catch {
            this.failedUntil.set(node.name, now + this.retryBackoffMs);
        } finally {
            this.inflight.delete(node.name);
        }
    }

    // --- interaction (thin wrappers keeping HUD/panels in sync) -------------

    walk(move: [number, number], look: [number, number], dt: number): void {
        if (this.state.mode === 'free') {
            this.state = stepFree(this.state, move, look, dt);
        } else if (this.state.mode === 'escape') {
            const [next, g] = stepEscape(this.state, move, look, dt,
                                         this.scene);
            this.state = next;
            this.hud = next.mode === 'escape' ? g : { ...g };
        }
    }

    teleportTo(waypointId: string): void {
        this.state = teleport(this.state, this.scene, waypointId);
        this.hud = null;
    }

    startAutoTour(): void {
        this.tourPath = this.tourPath ?? buildTourPath(this.scene);
        this.state = startTour(this.state, this.tourPath);
        this.hud = null;
    }

    tickTour(dt: number, paused = false): void {
        if (this.state.mode !== 'tour' || !this.tourPath) return;
        this.state = stepTour(this.state, dt, this.tourPath,
                              this.scene.tour?.speed_mps ?? 1, paused);
    }

    beginEscape(): void {
        this.state = startEscape(this.state, this.scene);
        this.hud = this.state.guidance;
    }

    refreshGuidance(): void {
        if (this.state.mode !== 'escape') return;
        const [next, g] = updateGuidance(this.state, this.scene);
        this.state = next;
        this.hud = next.mode === 'escape' ? g : { ...g };
    }

    /** Pick along a world ray; opens the hotspot panel and updates counters.
     * Returns the category progress after the pick, or null on a miss. */
    interact(origin: Vec3, direction: Vec3,
             maxRange = 25): [number, number] | null {
        const id = pickHotspot(this.scene, origin, direction, maxRange);
        if (id === null) return null;
        const hs = this.scene.hotspots.find((h) => h.id === id)!;
        const [next, progress] = markViewed(this.state, this.scene, id);
        this.state = next;
        this.categoryProgress.set(hs.category, progress);
        this.activePanel = {
            title: hs.title,
            body: hs.body,
            imageUrl: hs.image_ref
                ? this.client.assetUrl(hs.image_ref) : undefined,
        };
        return progress;
    }

    closePanel(): void {
        this.activePanel = null;
    }

    /** Display-only: toggling never touches engine state or counters. */
    toggleLayer(category: string): void {
        this.layerVisible.set(category, !this.layerVisible.get(category));
    }
}
