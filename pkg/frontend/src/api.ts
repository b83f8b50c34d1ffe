/**
 * Thin client for the design service.  The fetch function and the
 * delay are injectable so the polling flow is testable without a
 * network or timers.
 */

import type { DesignSpec, Session } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
  pollMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ApiClient {
  private baseUrl: string;
  private fetchFn: FetchLike;
  private pollMs: number;
  private sleep: (ms: number) => Promise<void>;

  constructor(opts: ApiOptions = {}) {
    this.baseUrl = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = opts.fetchFn ?? ((url, init) => fetch(url, init));
    this.pollMs = opts.pollMs ?? 500;
    this.sleep = opts.sleep ?? defaultSleep;
  }

  async schema(): Promise<Record<string, unknown>> {
    const res = await this.fetchFn(`${this.baseUrl}/schema`);
    if (!res.ok) throw new Error(`schema fetch failed: ${res.status}`);
    return res.json();
  }

  async submitDesign(spec: DesignSpec): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/designs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
    if (!res.ok) {
      const body = await res.text();
      throw new Error(`submit failed (${res.status}): ${body}`);
    }
    const doc = await res.json();
    return doc.id as string;
  }

  async getSession(id: string): Promise<Session> {
    const res = await this.fetchFn(`${this.baseUrl}/designs/${id}`);
    if (!res.ok) throw new Error(`session fetch failed: ${res.status}`);
    return res.json();
  }

  /** Poll until the session leaves the queue; reports each state change. */
  async waitForResult(
    id: string,
    onUpdate?: (s: Session) => void,
    maxPolls = 2400,
  ): Promise<Session> {
    let last: Session | null = null;
    for (let i = 0; i < maxPolls; i++) {
      const session = await this.getSession(id);
      if (!last || last.status !== session.status) onUpdate?.(session);
      last = session;
      if (session.status === "done" || session.status === "failed") return session;
      await this.sleep(this.pollMs);
    }
    throw new Error(`session ${id} did not settle after ${maxPolls} polls`);
  }

  async requestVerify(id: string, nGrid: number[], reps: number): Promise<void> {
    const res = await this.fetchFn(`${this.baseUrl}/designs/${id}/verify`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ n_grid: nGrid, reps }),
    });
    if (!res.ok) {
      const body = await res.text();
      throw new Error(`verify failed (${res.status}): ${body}`);
    }
  }

  /** Poll until oracle rows are attached. */
  async waitForOracle(id: string, maxPolls = 2400): Promise<Session> {
    for (let i = 0; i < maxPolls; i++) {
      const session = await this.getSession(id);
      if (session.oracle && session.oracle.length > 0) return session;
      if (session.status === "failed") return session;
      await this.sleep(this.pollMs);
    }
    throw new Error(`oracle for ${id} did not arrive after ${maxPolls} polls`);
  }
}
