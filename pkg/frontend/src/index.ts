export { ApiClient, ApiError } from "./api.js";
export type { Judgment, TaskView, ExperimentViewT, ReportT } from "./api.js";
export { highlightJava } from "./highlight.js";
export { CLONE_TYPE_OPTIONS, renderTaskPage } from "./taskView.js";
export { renderDashboard } from "./dashboard.js";
