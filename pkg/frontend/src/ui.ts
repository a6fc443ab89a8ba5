/** DOM builders for the panel widgets. Kept free of three.js so they run
 * under a headless DOM in tests. */

import { agentColor, badges } from "./sceneModel.js";
import type { SessionStore, ViewState } from "./state.js";
import type { ReportDoc } from "./types.js";

export function renderErrorBanner(el: HTMLElement, view: ViewState) {
  el.textContent = view.lastError ?? "";
  el.style.display = view.lastError ? "block" : "none";
}

export function renderHistory(el: HTMLElement, view: ViewState) {
  el.replaceChildren();
  const history = view.state?.history ?? [];
  for (const entry of history) {
    const li = document.createElement("li");
    li.textContent = `"${entry.command}" — ${entry.agent} (round ${entry.round + 1})`;
    el.appendChild(li);
  }
}

function candidateCard(report: ReportDoc, store: SessionStore, view: ViewState): HTMLElement {
  const card = document.createElement("div");
  card.className = "candidate";
  card.dataset.agent = report.agent;
  if (report.passed) card.classList.add("all-passed");
  if (view.selectedAgent === report.agent) card.classList.add("selected");

  const header = document.createElement("div");
  header.className = "candidate-header";

  const chip = document.createElement("span");
  chip.className = "chip";
  chip.style.background = agentColor(report.agent);

  const name = document.createElement("span");
  name.className = "agent-name";
  name.textContent = report.agent.replace(/_/g, " ");

  const toggle = document.createElement("input");
  toggle.type = "checkbox";
  toggle.checked = view.visibleAgents.has(report.agent);
  toggle.title = "show in 3D view";
  toggle.addEventListener("change", () => store.toggleAgent(report.agent));

  header.append(toggle, chip, name);
  card.appendChild(header);

  const badgeRow = document.createElement("div");
  badgeRow.className = "badges";
  for (const badge of badges(report)) {
    const span = document.createElement("span");
    span.className = `badge ${badge.passed ? "pass" : "fail"}`;
    span.textContent = badge.text;
    badgeRow.appendChild(span);
  }
  card.appendChild(badgeRow);

  const actions = document.createElement("div");
  const acceptButton = document.createElement("button");
  acceptButton.textContent = report.passed ? "accept ✓" : "accept (not all checks pass)";
  acceptButton.addEventListener("click", () => void store.accept(report.agent));
  const selectButton = document.createElement("button");
  selectButton.textContent = "focus";
  selectButton.addEventListener("click", () => store.select(report.agent));
  actions.append(acceptButton, selectButton);
  card.appendChild(actions);
  return card;
}

export function renderCandidates(el: HTMLElement, store: SessionStore, view: ViewState) {
  el.replaceChildren();
  const reports = view.state?.pending ?? [];
  if (!reports.length) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = view.state
      ? "No pending candidates — type a command."
      : "No session — load a scene and a trajectory.";
    el.appendChild(empty);
    return;
  }
  for (const report of reports) {
    el.appendChild(candidateCard(report, store, view));
  }
}
