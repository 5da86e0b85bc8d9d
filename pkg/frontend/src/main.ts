/** Browser wiring: canvas, pointer lock, keyboard movement, HUD, layer panel
 * and navigation menus. All simulation logic lives in viewer.ts/engine.ts;
 * this file only translates DOM events into engine calls and engine state into
 * DOM updates.
 */

import { Viewer } from './viewer.js';
import { DatasetClient } from './client.js';
import { PointCloudRenderer } from './renderer.js';
import { poseForward } from './engine.js';
import { HOTSPOT_CATEGORIES } from './types.js';

const params = new URLSearchParams(window.location.search);
const pointBudget = Number(params.get('budget') ?? '500000');

const canvas = document.getElementById('view') as HTMLCanvasElement;
const hudEl = document.getElementById('hud')!;
const panelEl = document.getElementById('panel')!;
const layersEl = document.getElementById('layers')!;
const navEl = document.getElementById('nav')!;
const statusEl = document.getElementById('status')!;

const client = new DatasetClient('');
const viewer = new Viewer(client, { pointBudget });
const renderer = new PointCloudRenderer(canvas);

const keys = new Set<string>();
let lookDx = 0;
let lookDy = 0;

function wireInput(): void {
    canvas.addEventListener('click', () => {
        if (document.pointerLockElement !== canvas) {
            canvas.requestPointerLock();
        } else {
            const f = poseForward(viewer.state.pose);
            const progress = viewer.interact(
                [...viewer.state.pose.position], f);
            renderPanel();
            if (progress) renderLayers();
        }
    });
    document.addEventListener('mousemove', (e) => {
        if (document.pointerLockElement !== canvas) return;
        lookDx += e.movementX;
        lookDy -= e.movementY;
    });
    document.addEventListener('keydown', (e) => {
        keys.add(e.code);
        if (e.code === 'Escape') {
            viewer.closePanel();
            renderPanel();
        }
        if (e.code === 'KeyT') viewer.startAutoTour();
        if (e.code === 'KeyE') {
            viewer.beginEscape();
            renderHud();
        }
    });
    document.addEventListener('keyup', (e) => keys.delete(e.code));
    window.addEventListener('resize', () =>
        renderer.resize(window.innerWidth, window.innerHeight));
}

function moveInput(): [number, number] {
    const mx = (keys.has('KeyD') ? 1 : 0) - (keys.has('KeyA') ? 1 : 0);
    const my = (keys.has('KeyW') ? 1 : 0) - (keys.has('KeyS') ? 1 : 0);
    return [mx, my];
}

function renderHud(): void {
    if (viewer.state.mode === 'escape' && viewer.hud) {
        const g = viewer.hud;
        const arrow = g.relativeBearingDeg >= 0 ? '↻' : '↺';
        hudEl.textContent = `EXIT ${g.exitId} — ${g.distanceM.toFixed(1)} m `
            + `${arrow} ${Math.abs(g.relativeBearingDeg).toFixed(0)}°`;
        hudEl.classList.add('visible');
    } else if (viewer.hud?.arrived) {
        hudEl.textContent = 'You have reached the exit.';
        hudEl.classList.add('visible');
    } else {
        hudEl.classList.remove('visible');
    }
}

function renderPanel(): void {
    if (!viewer.activePanel) {
        panelEl.classList.remove('visible');
        return;
    }
    const { title, body, imageUrl } = viewer.activePanel;
    panelEl.innerHTML = '';
    const h = document.createElement('h2');
    h.textContent = title;
    const p = document.createElement('p');
    p.textContent = body;
    panelEl.append(h, p);
    if (imageUrl) {
        const img = document.createElement('img');
        img.src = imageUrl;
        panelEl.append(img);
    }
    panelEl.classList.add('visible');
}

function renderLayers(): void {
    layersEl.innerHTML = '';
    for (const cat of HOTSPOT_CATEGORIES) {
        const [seen, total] = viewer.categoryProgress.get(cat) ?? [0, 0];
        const row = document.createElement('label');
        const box = document.createElement('input');
        box.type = 'checkbox';
        box.checked = viewer.layerVisible.get(cat) ?? true;
        box.addEventListener('change', () => viewer.toggleLayer(cat));
        row.append(box, ` ${cat} (${seen}/${total})`);
        layersEl.append(row);
    }
}

function renderNav(): void {
    navEl.innerHTML = '';
    for (const wp of viewer.scene.waypoints) {
        const btn = document.createElement('button');
        btn.textContent = wp.name;
        btn.addEventListener('click', () => {
            viewer.teleportTo(wp.id);
            renderHud();
        });
        navEl.append(btn);
    }
}

let lastTime = performance.now();

async function tick(now: number): Promise<void> {
    const dt = Math.min((now - lastTime) / 1000, 0.1);
    lastTime = now;

    if (dt > 0) {
        const look: [number, number] = [lookDx, lookDy];
        lookDx = 0;
        lookDy = 0;
        if (viewer.state.mode === 'tour') {
            viewer.tickTour(dt);
        } else {
            viewer.walk(moveInput(), look, dt);
        }
        renderHud();
    }

    const frame = await viewer.frame(now);
    renderer.updateCamera(viewer.state.pose);
    renderer.apply(frame);
    renderer.render();
    statusEl.textContent = `${frame.drawnPoints.toLocaleString()} pts`
        + ` / budget ${viewer.pointBudget.toLocaleString()}`
        + (frame.degraded ? ' (degraded)' : '');
    requestAnimationFrame(tick);
}

async function start(): Promise<void> {
    await viewer.load();
    renderer.resize(window.innerWidth, window.innerHeight);
    wireInput();
    renderLayers();
    renderNav();
    requestAnimationFrame(tick);
}

start().catch((err) => {
    statusEl.textContent = `failed to load dataset: ${err}`;
});
