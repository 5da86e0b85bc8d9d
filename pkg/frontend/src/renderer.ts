/** Thin three.js boundary. Everything upstream works in the world frame
 * (right-handed, Z-up, meters); this module owns the one conversion into the
 * renderer's native Y-up frame and the GPU buffer lifecycle per node.
 */

import * as THREE from 'three';

import { DecodedNode } from './client.js';
import { CameraPose, poseForward } from './engine.js';
import { Vec3 } from './math.js';
import { FrameResult } from './viewer.js';

/** World Z-up -> renderer Y-up: (x, y, z) -> (x, z, -y). */
export const worldToRender = (p: Vec3): Vec3 => [p[0], p[2], -p[1]];

export class PointCloudRenderer {
    readonly scene = new THREE.Scene();
    readonly camera: THREE.PerspectiveCamera;
    private renderer: THREE.WebGLRenderer;
    private nodeObjects = new Map<string, THREE.Points>();

    constructor(canvas: HTMLCanvasElement, verticalFov = 60) {
        this.renderer = new THREE.WebGLRenderer({ canvas, antialias: false });
        this.camera = new THREE.PerspectiveCamera(
            verticalFov, canvas.clientWidth / canvas.clientHeight, 0.1, 1000);
        this.scene.background = new THREE.Color(0x101418);
    }

    resize(width: number, height: number): void {
        this.renderer.setSize(width, height, false);
        this.camera.aspect = width / height;
        this.camera.updateProjectionMatrix();
    }

    updateCamera(pose: CameraPose): void {
        const eye = worldToRender(pose.position);
        this.camera.position.set(eye[0], eye[1], eye[2]);
        const f = poseForward(pose);
        const target = worldToRender([
            pose.position[0] + f[0],
            pose.position[1] + f[1],
            pose.position[2] + f[2],
        ]);
        this.camera.up.set(0, 1, 0);
        this.camera.lookAt(target[0], target[1], target[2]);
    }

    /** Sync drawable node set with the streaming frame result. */
    apply(frame: FrameResult): void {
        const wanted = new Set(frame.draw.map((d) => d.node.name));
        for (const [name, obj] of this.nodeObjects) {
            if (!wanted.has(name)) {
                this.scene.remove(obj);
                obj.geometry.dispose();
                (obj.material as THREE.Material).dispose();
                this.nodeObjects.delete(name);
            }
        }
        for (const { node, data, pointSize } of frame.draw) {
            const existing = this.nodeObjects.get(node.name);
            if (existing) {
                (existing.material as THREE.PointsMaterial).size = pointSize;
                continue;
            }
            this.nodeObjects.set(node.name, this.makePoints(data, pointSize));
            this.scene.add(this.nodeObjects.get(node.name)!);
        }
    }

    private makePoints(data: DecodedNode, pointSize: number): THREE.Points {
        const positions = new Float32Array(data.count * 3);
        const colors = new Float32Array(data.count * 3);
        for (let i = 0; i < data.count; i++) {
            positions[i * 3] = data.positions[i * 3];
            positions[i * 3 + 1] = data.positions[i * 3 + 2];
            positions[i * 3 + 2] = -data.positions[i * 3 + 1];
            colors[i * 3] = data.colors[i * 3] / 255;
            colors[i * 3 + 1] = data.colors[i * 3 + 1] / 255;
            colors[i * 3 + 2] = data.colors[i * 3 + 2] / 255;
        }
        const geometry = new THREE.BufferGeometry();
        geometry.setAttribute('position',
                              new THREE.BufferAttribute(positions, 3));
        geometry.setAttribute('color', new THREE.BufferAttribute(colors, 3));
        const material = new THREE.PointsMaterial({
            size: pointSize, sizeAttenuation: false, vertexColors: true,
        });
        return new THREE.Points(geometry, material);
    }

    render(): void {
        this.renderer.render(this.scene, this.camera);
    }
}
