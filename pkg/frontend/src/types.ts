/** JSON payloads served by the dataset server, plus derived client types. */

import type { Aabb, Vec3 } from './math.js';

export interface Manifest {
    version: number;
    bounds: { min: number[]; max: number[] };
    root_spacing: number;
    total_points: number;
    record: string;
    hierarchy_digest: string;
    overflow_nodes: string[];
}

export interface HierarchyRecord {
    name: string;
    level: number;
    num_points: number;
    byte_offset: number;
    byte_size: number;
    child_mask: number;
}

/** Hierarchy record with geometry recomputed from the octant path. */
export interface LodNode extends HierarchyRecord {
    bounds: Aabb;
    spacing: number;
}

export interface Waypoint {
    id: string;
    name: string;
    position: Vec3;
    yaw_deg: number;
    pitch_deg: number;
    sequence: number;
}

export interface Hotspot {
    id: string;
    category: string;
    position: Vec3;
    trigger_radius: number;
    title: string;
    body: string;
    image_ref?: string;
}

export interface ExitPoint {
    id: string;
    name: string;
    position: Vec3;
}

export interface TourSpec {
    waypoint_ids: string[];
    speed_mps: number;
}

export interface Scene {
    version: number;
    waypoints: Waypoint[];
    tour: TourSpec | null;
    hotspots: Hotspot[];
    exits: ExitPoint[];
}

export const HOTSPOT_CATEGORIES = [
    'info', 'fire_extinguisher', 'first_aid', 'hs_notice',
] as const;

export interface GuidancePayload {
    exit_id: string;
    bearing_deg: number;
    distance_m: number;
    arrived: boolean;
}

export const POINT_RECORD_BYTES = 16;
