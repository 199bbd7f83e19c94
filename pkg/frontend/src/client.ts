import type { Outcome, PlanSummary, SessionView, Transcript } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

/** Thin typed wrapper over the session HTTP API. Performs no cost math. */
export class SessionClient {
  constructor(private readonly baseUrl: string = "") {}

  async listPlans(): Promise<PlanSummary[]> {
    const body = await asJson<{ plans: PlanSummary[] }>(
      await fetch(`${this.baseUrl}/plans`),
    );
    return body.plans;
  }

  startSession(planId: string): Promise<SessionView> {
    return this.request("/sessions", { plan_id: planId });
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return asJson(await fetch(`${this.baseUrl}/sessions/${sessionId}`));
  }

  submitOutcome(
    sessionId: string,
    kind: string,
    outcome: Outcome,
  ): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}/events`, { kind, outcome });
  }

  async getTranscript(sessionId: string): Promise<Transcript> {
    return asJson(await fetch(`${this.baseUrl}/sessions/${sessionId}/transcript`));
  }

  private async request<T>(path: string, payload: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    return asJson<T>(resp);
  }
}
