import { SessionClient } from "./client.js";
import type { Outcome, SessionView, Transcript } from "./types.js";

/**
 * Drives one troubleshooting session. Keeps only the session id and the
 * server's latest view; every transition and every cost figure comes from
 * the server, so refreshing mid-session resumes at the same prompt.
 */
export class Walker {
  private view: SessionView | null = null;
  private inFlight = false;

  constructor(private readonly client: SessionClient) {}

  get sessionId(): string | null {
    return this.view?.session_id ?? null;
  }

  get currentView(): SessionView | null {
    return this.view;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  async start(planId: string): Promise<SessionView> {
    this.view = await this.client.startSession(planId);
    return this.view;
  }

  /** Re-fetch server state, e.g. after a page reload with a known id. */
  async resume(sessionId: string): Promise<SessionView> {
    this.view = await this.client.getSession(sessionId);
    return this.view;
  }

  /**
   * Report the outcome of the prompted action. While a submission is in
   * flight further calls are ignored (returns null), so a double-click
   * sends a single event.
   */
  async submit(outcome: Outcome): Promise<SessionView | null> {
    if (this.inFlight) return null;
    const view = this.view;
    if (!view || view.done || !view.prompt) {
      throw new Error("no prompt is pending");
    }
    this.inFlight = true;
    try {
      this.view = await this.client.submitOutcome(
        view.session_id,
        view.prompt.pending,
        outcome,
      );
      return this.view;
    } finally {
      this.inFlight = false;
    }
  }

  /** Server transcript, verbatim; replayable to the same final cost. */
  async exportTranscript(): Promise<Transcript> {
    const view = this.view;
    if (!view) throw new Error("no session");
    return this.client.getTranscript(view.session_id);
  }
}
