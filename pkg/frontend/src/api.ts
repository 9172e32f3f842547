/** Typed client for the study service JSON API. */

import { z } from "zod";

export const SourcePane = z.object({
  folder_name: z.string(),
  file_name: z.string(),
  start_line: z.number(),
  end_line: z.number(),
  source: z.string(),
  problem: z.string().optional(),
});

export const TaskViewSchema = z.object({
  task_id: z.string(),
  experiment_id: z.string(),
  status: z.enum(["pending", "done"]),
  clone_type_options: z.array(z.string()),
  left: SourcePane,
  right: SourcePane,
});
export type TaskView = z.infer<typeof TaskViewSchema>;

export const TaskSummary = z.object({
  task_id: z.string(),
  experiment_id: z.string(),
  experiment_name: z.string(),
  status: z.enum(["pending", "done"]),
});
export type TaskSummaryT = z.infer<typeof TaskSummary>;

export const ExperimentView = z.object({
  experiment_id: z.string(),
  tool_id: z.string(),
  name: z.string(),
  state: z.enum(["created", "sampling", "judging", "complete"]),
  uploaded_pair_count: z.number(),
  filtered_pair_count: z.number(),
  sample_size: z.number(),
  manual_count: z.number(),
  judges: z.array(z.string()),
  progress: z.tuple([z.number(), z.number()]),
  report_available: z.boolean(),
});
export type ExperimentViewT = z.infer<typeof ExperimentView>;

export const Report = z.object({
  sample_size: z.number(),
  auto_counts: z.record(z.string(), z.number()),
  manual_count: z.number(),
  tp: z.number(),
  fp: z.number(),
  precision: z.number(),
  effort_reduction: z.number(),
});
export type ReportT = z.infer<typeof Report>;

export interface Judgment {
  is_clone: boolean;
  clone_type?: "T2" | "T3" | "T4";
  comment?: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private token: string | null = null;

  constructor(private baseUrl: string) {}

  setToken(token: string): void {
    this.token = token;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const h: Record<string, string> = { ...extra };
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request(path: string, init: RequestInit = {}): Promise<unknown> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      const body = await res.text();
      throw new ApiError(res.status, `${res.status} ${path}: ${body}`);
    }
    return res.json();
  }

  private async postJson(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(body),
    });
  }

  async register(name: string, email: string): Promise<{ user_id: string; token: string }> {
    const out = z
      .object({ user_id: z.string(), token: z.string() })
      .parse(await this.postJson("/users", { name, email }));
    return out;
  }

  async createTool(name: string, version: string, description = ""): Promise<string> {
    const out = z
      .object({ tool_id: z.string() })
      .parse(await this.postJson("/tools", { name, version, description }));
    return out.tool_id;
  }

  async createExperiment(
    toolId: string,
    name: string,
    resultsCsv: string,
    idempotencyKey?: string,
  ): Promise<ExperimentViewT> {
    const form = new FormData();
    form.set("tool_id", toolId);
    form.set("name", name);
    form.set("results", new Blob([resultsCsv], { type: "text/csv" }), "results.csv");
    const extra: Record<string, string> = {};
    if (idempotencyKey) extra["Idempotency-Key"] = idempotencyKey;
    const out = await this.request("/experiments", {
      method: "POST",
      headers: this.headers(extra),
      body: form,
    });
    return ExperimentView.parse(out);
  }

  async getExperiment(experimentId: string): Promise<ExperimentViewT> {
    return ExperimentView.parse(
      await this.request(`/experiments/${experimentId}`, { headers: this.headers() }),
    );
  }

  async inviteJudges(experimentId: string, userIds: string[]): Promise<ExperimentViewT> {
    return ExperimentView.parse(
      await this.postJson(`/experiments/${experimentId}/judges`, { user_ids: userIds }),
    );
  }

  async judgeTasks(judgeId: string): Promise<TaskSummaryT[]> {
    const out = z
      .object({ tasks: z.array(TaskSummary) })
      .parse(await this.request(`/judges/${judgeId}/tasks`, { headers: this.headers() }));
    return out.tasks;
  }

  async getTask(taskId: string): Promise<TaskView> {
    return TaskViewSchema.parse(
      await this.request(`/tasks/${taskId}`, { headers: this.headers() }),
    );
  }

  async submitJudgment(taskId: string, judgment: Judgment): Promise<void> {
    await this.postJson(`/tasks/${taskId}/judgment`, judgment);
  }

  async report(experimentId: string): Promise<ReportT> {
    return Report.parse(
      await this.request(`/experiments/${experimentId}/report`, { headers: this.headers() }),
    );
  }
}
