/** Page wiring: session setup, command box, candidate panel, 3D view. */

import { SessionApi } from "./api.js";
import { buildSceneModel } from "./sceneModel.js";
import { SessionStore } from "./state.js";
import { Viewer } from "./render.js";
import { renderCandidates, renderErrorBanner, renderHistory } from "./ui.js";
import type { SceneDoc, TrajectoryDoc } from "./types.js";

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const serviceUrl =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8800";
const store = new SessionStore(new SessionApi(serviceUrl));
const viewer = new Viewer($<HTMLCanvasElement>("view"));

const EXAMPLE_SCENE: SceneDoc = {
  objects: [
    {
      id: "ball_1",
      name: "red ball",
      shape: "sphere",
      dimensions: { radius: 0.3 },
      pose: { position: [1.0, 0.55, 0.0], orientation: [0, 0, 0, 1] },
      fragility: 0.7,
    },
    {
      id: "box_1",
      name: "blue box",
      shape: "cuboid",
      dimensions: { half_extents: [0.35, 0.25, 0.15] },
      pose: { position: [2.2, -0.5, -0.1], orientation: [0, 0, 0, 1] },
      fragility: 0.3,
    },
  ],
};

function exampleTrajectory(): TrajectoryDoc {
  const waypoints: TrajectoryDoc["waypoints"] = [];
  for (let i = 0; i < 32; i++) {
    const t = i / 31;
    waypoints.push([t * 3.0, 0.25 * Math.sin(t * Math.PI * 2), 0.15 * t, 0.8]);
  }
  return { waypoints };
}

$<HTMLTextAreaElement>("scene-input").value = JSON.stringify(EXAMPLE_SCENE, null, 2);
$<HTMLTextAreaElement>("trajectory-input").value = JSON.stringify(exampleTrajectory());

$("load-button").addEventListener("click", () => {
  let scene: SceneDoc, trajectory: TrajectoryDoc;
  try {
    scene = JSON.parse($<HTMLTextAreaElement>("scene-input").value);
    trajectory = JSON.parse($<HTMLTextAreaElement>("trajectory-input").value);
  } catch (err) {
    alert(`not valid JSON: ${err}`);
    return;
  }
  void store.createSession(scene, trajectory);
});

const commandInput = $<HTMLInputElement>("command-input");
$("command-button").addEventListener("click", () => {
  if (commandInput.value.trim()) void store.submitCommand(commandInput.value.trim());
});
commandInput.addEventListener("keydown", (e) => {
  if (e.key === "Enter" && commandInput.value.trim()) {
    void store.submitCommand(commandInput.value.trim());
  }
});

$("undo-button").addEventListener("click", () => void store.undo());

store.subscribe((view) => {
  renderErrorBanner($("error-banner"), view);
  renderCandidates($("candidates"), store, view);
  renderHistory($("history"), view);
  $("session-label").textContent = view.sessionId
    ? `session ${view.sessionId.slice(0, 8)}…`
    : "no session";
  ($("command-button") as HTMLButtonElement).disabled = view.busy || !view.sessionId;
  ($("undo-button") as HTMLButtonElement).disabled =
    view.busy || !(view.state && view.state.history.length > 0);
  if (view.state) {
    viewer.setModel(buildSceneModel(view.state, view.visibleAgents));
  }
});
