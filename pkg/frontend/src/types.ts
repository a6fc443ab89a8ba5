/** Payload shapes of the session service. The browser never recomputes any
 * of this; it only renders what the service sends. */

export type Waypoint = [number, number, number, number]; // x, y, z, speed

export interface TrajectoryDoc {
  waypoints: Waypoint[];
}

export interface PoseDoc {
  position: [number, number, number];
  orientation: [number, number, number, number]; // quaternion x, y, z, w
}

export type ShapeName = "sphere" | "rect_plane" | "cylinder" | "cone" | "cuboid";

export interface SceneObjectDoc {
  id: string;
  name: string;
  shape: ShapeName;
  dimensions: Record<string, number | number[]>;
  pose: PoseDoc;
  fragility: number;
  influence_radius?: number;
}

export interface SceneDoc {
  objects: SceneObjectDoc[];
}

export interface CheckOutcomeDoc {
  constraint_index: number;
  kind: "distance" | "cartesian" | "speed";
  measured: number;
  threshold: number;
  passed: boolean;
}

export interface ReportDoc {
  agent: string;
  round: number;
  passed: boolean;
  outcomes: CheckOutcomeDoc[];
  trajectory: TrajectoryDoc;
}

export interface HistoryEntryDoc {
  command: string;
  agent: string;
  round: number;
}

export interface SessionStateDoc {
  session_id: string;
  scene: SceneDoc;
  initial_trajectory: TrajectoryDoc;
  current_trajectory: TrajectoryDoc;
  history: HistoryEntryDoc[];
  pending: ReportDoc[];
}

export interface CommandResponseDoc {
  round: number;
  best_agent: string;
  reports: ReportDoc[];
}
