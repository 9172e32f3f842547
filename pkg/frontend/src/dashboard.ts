/** Experiment dashboard: progress cards plus owner forms. */

import type { ExperimentViewT, TaskSummaryT } from "./api.js";

export interface DashboardData {
  role: "owner" | "judge";
  experiments: ExperimentViewT[];
  pendingTasks: TaskSummaryT[];
}

function experimentCard(exp: ExperimentViewT): HTMLElement {
  const card = document.createElement("article");
  card.className = "experiment-card";
  card.dataset.experimentId = exp.experiment_id;

  const title = document.createElement("h3");
  title.textContent = exp.name;

  const progress = document.createElement("p");
  const [done, total] = exp.progress;
  progress.className = "progress";
  progress.textContent = `${done} / ${total} tasks done`;

  const state = document.createElement("p");
  state.className = `state state-${exp.state}`;
  state.textContent = exp.state;

  card.append(title, state, progress);
  if (exp.state === "complete") {
    const link = document.createElement("a");
    link.href = `#/experiments/${exp.experiment_id}/report`;
    link.textContent = "View precision report";
    card.append(link);
  }
  return card;
}

function ownerForms(): HTMLElement {
  const wrap = document.createElement("section");
  wrap.className = "owner-forms";
  for (const [name, fields] of [
    ["register-tool", ["name", "version", "description"]],
    ["create-experiment", ["tool_id", "name", "results"]],
    ["invite-judges", ["experiment_id", "user_ids"]],
  ] as const) {
    const form = document.createElement("form");
    form.className = name;
    for (const f of fields) {
      const input = document.createElement("input");
      input.name = f;
      input.placeholder = f;
      form.append(input);
    }
    const btn = document.createElement("button");
    btn.type = "submit";
    btn.textContent = name.replace(/-/g, " ");
    form.append(btn);
    wrap.append(form);
  }
  return wrap;
}

export function renderDashboard(data: DashboardData): HTMLElement {
  const root = document.createElement("div");
  root.className = "dashboard";

  if (data.experiments.length === 0 && data.pendingTasks.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent =
      data.role === "owner"
        ? "No experiments yet. Register a tool, then upload detector results."
        : "No judging assignments yet.";
    root.append(empty);
  }

  for (const exp of data.experiments) root.append(experimentCard(exp));

  if (data.pendingTasks.length > 0) {
    const list = document.createElement("ul");
    list.className = "task-queue";
    for (const t of data.pendingTasks) {
      const li = document.createElement("li");
      const a = document.createElement("a");
      a.href = `#/tasks/${t.task_id}`;
      a.textContent = `${t.experiment_name}: ${t.task_id} (${t.status})`;
      li.append(a);
      list.append(li);
    }
    root.append(list);
  }

  if (data.role === "owner") root.append(ownerForms());
  return root;
}
