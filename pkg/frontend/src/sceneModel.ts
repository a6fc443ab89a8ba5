/** Pure view model: service documents in, drawable descriptions out.
 *
 * No DOM and no three.js here, so every mapping rule (agent colors, speed
 * marker sizing, candidate visibility) is testable headlessly. All geometry
 * is passed through untouched; the math stays server-side.
 */

import type { ReportDoc, SceneObjectDoc, SessionStateDoc, Waypoint } from "./types.js";

export const AGENT_COLORS: Record<string, string> = {
  parallel: "#2f7fe0",
  sequential: "#e0762f",
  parallel_priority: "#8a2fe0",
  parallel_importance: "#2fb06b",
};

export const TRAJECTORY_COLORS = {
  initial: "#9aa0a6",
  current: "#111111",
};

export interface PolylineModel {
  id: string;
  points: [number, number, number][];
  color: string;
  /** per-waypoint marker radius encoding the speed channel */
  markerSizes: number[];
  dashed: boolean;
}

export interface ObjectModel {
  id: string;
  label: string;
  shape: SceneObjectDoc["shape"];
  dimensions: Record<string, number | number[]>;
  position: [number, number, number];
  quaternion: [number, number, number, number];
}

export interface SceneModel {
  objects: ObjectModel[];
  polylines: PolylineModel[];
}

/** Marker radius per waypoint: linear in speed, clamped to a visible range. */
export function speedMarkerSizes(waypoints: Waypoint[], scale = 0.02): number[] {
  return waypoints.map(([, , , v]) => scale * (0.5 + Math.max(0, v)));
}

function polyline(
  id: string,
  waypoints: Waypoint[],
  color: string,
  dashed = false,
): PolylineModel {
  return {
    id,
    points: waypoints.map(([x, y, z]) => [x, y, z]),
    color,
    markerSizes: speedMarkerSizes(waypoints),
    dashed,
  };
}

export function agentColor(agent: string): string {
  return AGENT_COLORS[agent] ?? "#666666";
}

/** Everything drawable for a session state plus the candidate toggles. */
export function buildSceneModel(
  state: SessionStateDoc,
  visibleAgents: ReadonlySet<string>,
): SceneModel {
  const objects: ObjectModel[] = state.scene.objects.map((o) => ({
    id: o.id,
    label: o.name,
    shape: o.shape,
    dimensions: o.dimensions,
    position: o.pose.position,
    quaternion: o.pose.orientation,
  }));

  const polylines: PolylineModel[] = [
    polyline("initial", state.initial_trajectory.waypoints, TRAJECTORY_COLORS.initial, true),
    polyline("current", state.current_trajectory.waypoints, TRAJECTORY_COLORS.current),
  ];
  for (const report of state.pending) {
    if (visibleAgents.has(report.agent)) {
      polylines.push(
        polyline(`candidate:${report.agent}`, report.trajectory.waypoints, agentColor(report.agent)),
      );
    }
  }
  return { objects, polylines };
}

export interface BadgeModel {
  kind: string;
  passed: boolean;
  text: string;
}

/** Per-constraint pass/fail badges for one candidate. */
export function badges(report: ReportDoc): BadgeModel[] {
  return report.outcomes.map((o) => ({
    kind: o.kind,
    passed: o.passed,
    text: `${o.kind} ${o.measured >= 0 ? "+" : ""}${o.measured.toFixed(3)} (need ${o.threshold})`,
  }));
}
