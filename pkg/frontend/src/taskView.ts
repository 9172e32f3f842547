/** Split-screen clone-pair validation page.
 *
 * Two source panes side by side, a decision form (clone yes/no, optional
 * clone type, optional comment), and a single-flight submit guard so a
 * double-click can never send two judgments.
 */

import type { Judgment, TaskView } from "./api.js";
import { highlightJava } from "./highlight.js";

/** The only assignable clone types; exact-match clones are resolved
 * automatically and are deliberately absent. */
export const CLONE_TYPE_OPTIONS: ReadonlyArray<{ value: "T2" | "T3" | "T4"; label: string }> = [
  { value: "T2", label: "Type II" },
  { value: "T3", label: "Type III" },
  { value: "T4", label: "Type IV" },
];

export interface TaskPageHooks {
  submit: (taskId: string, judgment: Judgment) => Promise<void>;
  onSubmitted?: (taskId: string) => void;
}

function pane(side: "left" | "right", view: TaskView): HTMLElement {
  const src = view[side];
  const el = document.createElement("section");
  el.className = `pane pane-${side}`;
  const header = document.createElement("header");
  header.textContent = `${src.folder_name}/${src.file_name} : ${src.start_line}–${src.end_line}`;
  const pre = document.createElement("pre");
  pre.className = "code";
  pre.innerHTML = highlightJava(src.source);
  el.append(header, pre);
  return el;
}

export function renderTaskPage(view: TaskView, hooks: TaskPageHooks): HTMLElement {
  const root = document.createElement("div");
  root.className = "task-page";
  root.dataset.taskId = view.task_id;

  const split = document.createElement("div");
  split.className = "split";
  split.append(pane("left", view), pane("right", view));

  const form = document.createElement("form");
  form.className = "decision";

  const cloneYes = document.createElement("input");
  cloneYes.type = "radio";
  cloneYes.name = "is_clone";
  cloneYes.value = "true";
  cloneYes.id = "clone-yes";
  const cloneNo = document.createElement("input");
  cloneNo.type = "radio";
  cloneNo.name = "is_clone";
  cloneNo.value = "false";
  cloneNo.id = "clone-no";

  const yesLabel = document.createElement("label");
  yesLabel.htmlFor = "clone-yes";
  yesLabel.textContent = "Clone";
  const noLabel = document.createElement("label");
  noLabel.htmlFor = "clone-no";
  noLabel.textContent = "Not a clone";

  const typeSelect = document.createElement("select");
  typeSelect.name = "clone_type";
  typeSelect.disabled = true; // enabled only once "clone" is chosen
  const unset = document.createElement("option");
  unset.value = "";
  unset.textContent = "(unspecified)";
  typeSelect.append(unset);
  for (const opt of CLONE_TYPE_OPTIONS) {
    const o = document.createElement("option");
    o.value = opt.value;
    o.textContent = opt.label;
    typeSelect.append(o);
  }

  const comment = document.createElement("textarea");
  comment.name = "comment";
  comment.placeholder = "Optional comment";

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit judgment";
  submit.disabled = true;

  const status = document.createElement("p");
  status.className = "status";

  function syncControls(): void {
    const chosen = cloneYes.checked || cloneNo.checked;
    submit.disabled = !chosen || inFlight;
    typeSelect.disabled = !cloneYes.checked;
    if (!cloneYes.checked) typeSelect.value = "";
  }

  cloneYes.addEventListener("change", syncControls);
  cloneNo.addEventListener("change", syncControls);

  let inFlight = false;
  let submitted = false;

  async function doSubmit(): Promise<void> {
    if (inFlight || submitted) return; // double-click / double-submit guard
    if (!cloneYes.checked && !cloneNo.checked) return;
    inFlight = true;
    syncControls();
    const judgment: Judgment = { is_clone: cloneYes.checked };
    if (cloneYes.checked && typeSelect.value) {
      judgment.clone_type = typeSelect.value as Judgment["clone_type"];
    }
    if (comment.value.trim()) judgment.comment = comment.value.trim();
    try {
      await hooks.submit(view.task_id, judgment);
      submitted = true;
      status.textContent = "Judgment recorded.";
      hooks.onSubmitted?.(view.task_id);
    } catch (err) {
      // decision state is preserved; the judge may retry
      status.textContent = `Submission failed — ${String(err)}. Try again.`;
    } finally {
      inFlight = false;
      syncControls();
    }
  }

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void doSubmit();
  });

  // keyboard shortcuts for high-volume judging: c = clone, n = not a clone,
  // enter submits (native form behavior)
  root.addEventListener("keydown", (ev) => {
    const kev = ev as KeyboardEvent;
    if (kev.key === "c") {
      cloneYes.checked = true;
      syncControls();
    } else if (kev.key === "n") {
      cloneNo.checked = true;
      syncControls();
    }
  });

  form.append(cloneYes, yesLabel, cloneNo, noLabel, typeSelect, comment, submit, status);
  root.append(split, form);
  return root;
}
